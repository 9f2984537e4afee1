#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace patchwork {

/// Philox4x32-10 (Salmon et al., SC'11). Counter-based: the output block is
/// a pure function of (key, counter), so a trial's random stream depends only
/// on the seed and the trial index, never on thread scheduling.
class Philox4x32 {
  public:
    using result_type = uint32_t;
    using Block = std::array<uint32_t, 4>;
    using Key = std::array<uint32_t, 2>;

    static Block block(Block ctr, Key key) {
        for (int round = 0; round < 10; round++) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            uint64_t p0 = uint64_t{0xD2511F53u} * ctr[0];
            uint64_t p1 = uint64_t{0xCD9E8D57u} * ctr[2];
            uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
            uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    /// Stream `stream` of generator `seed`.
    explicit Philox4x32(uint64_t seed = 0, uint64_t stream = 0)
        : key_{uint32_t(seed), uint32_t(seed >> 32)}, stream_(stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<uint32_t>::max(); }

    result_type operator()() {
        if (idx_ == 4) {
            buf_ = block({uint32_t(ctr_), uint32_t(ctr_ >> 32), uint32_t(stream_), uint32_t(stream_ >> 32)}, key_);
            ctr_++;
            idx_ = 0;
        }
        return buf_[idx_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        uint64_t hi = (*this)() >> 5, lo = (*this)() >> 6;
        return (double(hi) * 67108864.0 + double(lo)) * (1.0 / 9007199254740992.0);
    }

    /// True with probability p. p is resolved to 2^-32.
    bool bernoulli_fast(uint32_t threshold) { return (*this)() < threshold; }

    static uint32_t threshold(double p) {
        if (p <= 0) return 0;
        if (p >= 1) return std::numeric_limits<uint32_t>::max();
        return uint32_t(p * 4294967296.0);
    }

  private:
    Key key_;
    uint64_t stream_;
    uint64_t ctr_ = 0;
    Block buf_{};
    int idx_ = 4;
};

}  // namespace patchwork
