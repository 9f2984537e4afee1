#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "patchwork/errors.hpp"

namespace patchwork {

/// Signed Pauli product i^k * P_0 (x) P_1 (x) ... (x) P_{n-1}.
///
/// Letters are stored in symplectic form: qubit q carries X if bit q of `xs`
/// is set, Z if bit q of `zs` is set, Y if both. The phase exponent k counts
/// factors of i relative to the letter product (Y counted as Y, not XZ).
///
/// Text form: an optional sign (`+`, `-`, `i`, `+i`, `-i`) followed by one
/// letter per qubit from `IXYZ`; `_` is accepted for identity. Qubit 0 is the
/// leftmost letter.
class PauliString {
  public:
    PauliString() = default;
    explicit PauliString(size_t n) : n_(n), xs_(words(n), 0), zs_(words(n), 0) {}

    static PauliString from_str(std::string_view text) {
        size_t pos = 0;
        uint8_t k = 0;
        auto eat = [&](char c) {
            if (pos < text.size() && text[pos] == c) {
                pos++;
                return true;
            }
            return false;
        };
        if (eat('-')) {
            k = 2;
            if (eat('i')) k = 3;
        } else if (eat('+')) {
            if (eat('i')) k = 1;
        } else if (eat('i')) {
            k = 1;
        }
        std::string_view body = text.substr(pos);
        if (body.empty()) throw ParseError("empty Pauli string '" + std::string(text) + "'");
        PauliString p(body.size());
        for (size_t q = 0; q < body.size(); q++) {
            char c = body[q];
            if (c == '_') c = 'I';
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
                throw ParseError("bad Pauli letter '" + std::string(1, body[q]) + "' in '" + std::string(text) + "'");
            p.set(q, c);
        }
        p.k_ = k;
        return p;
    }

    static PauliString single(size_t n, size_t q, char letter) {
        PauliString p(n);
        p.set(q, letter);
        return p;
    }

    /// Z on every qubit in `support`.
    static PauliString z_on(size_t n, const std::vector<size_t> &support) {
        PauliString p(n);
        for (auto q : support) p.set(q, 'Z');
        return p;
    }

    size_t num_qubits() const { return n_; }

    bool xbit(size_t q) const { return (xs_[q >> 6] >> (q & 63)) & 1; }
    bool zbit(size_t q) const { return (zs_[q >> 6] >> (q & 63)) & 1; }

    char letter(size_t q) const {
        static constexpr char table[4] = {'I', 'X', 'Z', 'Y'};
        return table[xbit(q) | (zbit(q) << 1)];
    }

    void set(size_t q, char c) {
        if (q >= n_) throw DimensionError("qubit " + std::to_string(q) + " out of range");
        bool x = c == 'X' || c == 'Y';
        bool z = c == 'Z' || c == 'Y';
        uint64_t m = uint64_t{1} << (q & 63);
        xs_[q >> 6] = (xs_[q >> 6] & ~m) | (x ? m : 0);
        zs_[q >> 6] = (zs_[q >> 6] & ~m) | (z ? m : 0);
    }

    uint8_t phase_exp() const { return k_; }
    void set_phase_exp(uint8_t k) { k_ = k & 3; }
    std::complex<double> phase() const {
        static const std::complex<double> units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return units[k_];
    }
    /// +1 / -1 for Hermitian strings; throws for +-i.
    int sign() const {
        if (k_ & 1) throw InvariantError("Pauli string " + str() + " is not Hermitian");
        return k_ == 0 ? 1 : -1;
    }

    size_t weight() const {
        size_t w = 0;
        for (size_t i = 0; i < xs_.size(); i++) w += std::popcount(xs_[i] | zs_[i]);
        return w;
    }
    bool is_identity() const { return weight() == 0; }
    size_t count(char c) const {
        size_t m = 0;
        for (size_t q = 0; q < n_; q++) m += letter(q) == c;
        return m;
    }

    /// Same letters, phase +1.
    PauliString axis() const {
        PauliString p = *this;
        p.k_ = 0;
        return p;
    }
    PauliString negated() const {
        PauliString p = *this;
        p.k_ = (k_ + 2) & 3;
        return p;
    }
    PauliString times_i(int power = 1) const {
        PauliString p = *this;
        p.k_ = (k_ + power) & 3;
        return p;
    }

    bool commutes(const PauliString &o) const {
        check_dims(o);
        uint64_t acc = 0;
        for (size_t i = 0; i < xs_.size(); i++) acc ^= (xs_[i] & o.zs_[i]) ^ (zs_[i] & o.xs_[i]);
        return (std::popcount(acc) & 1) == 0;
    }

    PauliString &operator*=(const PauliString &o) {
        check_dims(o);
        uint64_t cnt1 = 0, cnt2 = 0;
        for (size_t i = 0; i < xs_.size(); i++) {
            uint64_t x1 = xs_[i], z1 = zs_[i];
            uint64_t x2 = o.xs_[i], z2 = o.zs_[i];
            xs_[i] = x1 ^ x2;
            zs_[i] = z1 ^ z2;
            uint64_t x1z2 = x1 & z2;
            uint64_t anti = (x2 & z1) ^ x1z2;
            cnt2 ^= (cnt1 ^ xs_[i] ^ zs_[i] ^ x1z2) & anti;
            cnt1 ^= anti;
        }
        uint32_t log_i = std::popcount(cnt1) + 2 * std::popcount(cnt2);
        k_ = (k_ + o.k_ + log_i) & 3;
        return *this;
    }
    friend PauliString operator*(PauliString a, const PauliString &b) { return a *= b; }

    /// Group inverse: conjugate phase, same letters.
    PauliString inverse() const {
        PauliString p = *this;
        p.k_ = (4 - k_) & 3;
        return p;
    }

    /// Same letters ignoring phase.
    bool same_axis(const PauliString &o) const { return n_ == o.n_ && xs_ == o.xs_ && zs_ == o.zs_; }

    bool operator==(const PauliString &o) const { return same_axis(o) && k_ == o.k_; }
    bool operator!=(const PauliString &o) const { return !(*this == o); }

    /// Lexicographic order on (letters, phase), for use as map keys.
    bool operator<(const PauliString &o) const {
        if (n_ != o.n_) return n_ < o.n_;
        if (xs_ != o.xs_) return xs_ < o.xs_;
        if (zs_ != o.zs_) return zs_ < o.zs_;
        return k_ < o.k_;
    }

    std::string str(bool with_sign = true) const {
        static const char *prefix[4] = {"+", "+i", "-", "-i"};
        std::string s = with_sign ? prefix[k_] : "";
        for (size_t q = 0; q < n_; q++) s += letter(q);
        return s;
    }

    /// Restrict to a sub-register: result qubit j takes letter of qubit qubits[j].
    PauliString select(const std::vector<size_t> &qubits) const {
        PauliString p(qubits.size());
        for (size_t j = 0; j < qubits.size(); j++) p.set(j, letter(qubits[j]));
        p.k_ = k_;
        return p;
    }

    /// Embed into a larger register: qubit j goes to position qubits[j].
    PauliString embed(size_t n, const std::vector<size_t> &qubits) const {
        if (qubits.size() != n_) throw DimensionError("embed: qubit map has wrong length");
        PauliString p(n);
        for (size_t j = 0; j < n_; j++) {
            if (letter(j) != 'I' && p.letter(qubits[j]) != 'I')
                throw DimensionError("embed: qubit map is not injective");
            p.set(qubits[j], letter(j));
        }
        p.k_ = k_;
        return p;
    }

    const std::vector<uint64_t> &x_words() const { return xs_; }
    const std::vector<uint64_t> &z_words() const { return zs_; }

    size_t hash() const {
        size_t h = std::hash<size_t>{}(n_ * 4 + k_);
        for (size_t i = 0; i < xs_.size(); i++) {
            h ^= std::hash<uint64_t>{}(xs_[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= std::hash<uint64_t>{}(zs_[i] * 3) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

  private:
    static size_t words(size_t n) { return (n + 63) / 64; }
    void check_dims(const PauliString &o) const {
        if (n_ != o.n_)
            throw DimensionError("qubit count mismatch: " + std::to_string(n_) + " vs " + std::to_string(o.n_));
    }

    size_t n_ = 0;
    std::vector<uint64_t> xs_, zs_;
    uint8_t k_ = 0;
};

inline bool commutes(const PauliString &a, const PauliString &b) { return a.commutes(b); }
inline PauliString multiply(const PauliString &a, const PauliString &b) { return a * b; }

}  // namespace patchwork

template <>
struct std::hash<patchwork::PauliString> {
    size_t operator()(const patchwork::PauliString &p) const { return p.hash(); }
};
