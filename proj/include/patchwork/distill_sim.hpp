#pragma once

// Monte-Carlo estimate of acceptance and output error of a distillation
// circuit with faulty injected states.

#include <atomic>
#include <thread>
#include <unordered_map>

#include "patchwork/distill.hpp"
#include "patchwork/stats.hpp"

namespace patchwork {

/// Exact outcome of one error pattern: probability that every check reads
/// +1, and the fidelity of the accepted state with the ideal one.
struct PatternOutcome {
    double accept = 0, fidelity = 0;
};

class DistillationSimulator {
  public:
    explicit DistillationSimulator(DistillationCircuit c) : c_(std::move(c)) {
        if (c_.inputs() > 64) throw CapacityError("more than 64 injected states");
        if (c_.qubits > kDefaultSimBound) throw CapacityError("distillation circuit exceeds the simulator bound");
        auto [acc, state] = run(0);
        if (acc < 1 - 1e-9) throw InvariantError("distillation circuit rejects its error-free input");
        ideal_ = state;
    }

    const DistillationCircuit &circuit() const { return c_; }
    const std::vector<cplx> &ideal_output() const { return ideal_; }

    /// Bit j of `mask` marks injected state j as faulty: a Z error on the
    /// absorbed qubit or on the rotation axis (the rotation came out as
    /// P_{phi} P instead of P_{phi}).
    PatternOutcome outcome(uint64_t mask) const {
        auto [acc, state] = run(mask);
        PatternOutcome o{acc, 0};
        if (acc > 0) o.fidelity = LogicalState::fidelity(state, ideal_);
        return o;
    }

  private:
    std::pair<double, std::vector<cplx>> run(uint64_t mask) const {
        LogicalState s(c_.qubits);
        size_t bit = 0;
        for (size_t q = 0; q < c_.qubits; q++) s.prepare(q, c_.init[q]);
        for (size_t j = 0; j < c_.absorbed_qubit.size(); j++, bit++)
            if (mask >> bit & 1) s.apply_pauli(PauliString::single(c_.qubits, c_.absorbed_qubit[j], 'Z'));
        for (auto &r : c_.rotations) {
            s.apply_rotation(r);
            if (mask >> bit & 1) s.apply_pauli(r.axis);
            bit++;
        }
        for (auto &r : c_.correction) s.apply_rotation(r);
        double acc = 1;
        for (size_t q = 0; q < c_.stabilizers; q++) {
            PauliMeasurement m(PauliString::single(c_.qubits, q, 'X'));
            double pr = s.probability(m, 1);
            acc *= pr;
            if (pr < 1e-12) return {0.0, {}};
            s.measure(m, 1);
        }
        return {acc, s.amplitudes()};
    }

    DistillationCircuit c_;
    std::vector<cplx> ideal_;
};

struct MonteCarloResult {
    uint64_t seed = 0, trials = 0, accepted = 0, errors = 0;
    double p = 0;
    double acceptance = 0, output_error = 0;
    Interval acceptance_ci, error_ci;
    size_t chunks = 0, distinct_patterns = 0;
};

inline constexpr uint64_t kMonteCarloChunk = uint64_t{1} << 16;

/// Runs chunks of 2^16 trials; chunk i draws from Philox stream (seed, i).
/// Stops after the shortest prefix of chunks with at least
/// `target_accepted` accepted trials, so results do not depend on the
/// thread count. Every injected state is faulty with probability p.
inline MonteCarloResult distill_monte_carlo(const DistillationSimulator &sim, double p, uint64_t target_accepted,
                                            uint64_t seed, unsigned threads = 0, double z = 3.0) {
    if (p < 0 || p > 1) throw DimensionError("p must be in [0, 1]");
    if (target_accepted < 1) throw DimensionError("need at least one trial");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    size_t inputs = sim.circuit().inputs();
    uint32_t thr = Philox4x32::threshold(p);
    struct Chunk {
        uint64_t trials = 0, accepted = 0, errors = 0;
    };
    std::vector<Chunk> done;
    auto run_chunk = [&](uint64_t idx, std::unordered_map<uint64_t, PatternOutcome> &cache) {
        Philox4x32 rng(seed, idx);
        Chunk c;
        for (uint64_t t = 0; t < kMonteCarloChunk; t++) {
            uint64_t mask = 0;
            for (size_t j = 0; j < inputs; j++)
                if (rng.bernoulli_fast(thr)) mask |= uint64_t{1} << j;
            double ua = rng.uniform(), ue = rng.uniform();
            const PatternOutcome *o;
            auto it = cache.find(mask);
            if (it == cache.end()) it = cache.emplace(mask, sim.outcome(mask)).first;
            o = &it->second;
            c.trials++;
            if (ua < o->accept) {
                c.accepted++;
                if (ue < 1 - o->fidelity) c.errors++;
            }
        }
        return c;
    };
    uint64_t next = 0, acc = 0;
    size_t needed = 0;
    std::vector<std::unordered_map<uint64_t, PatternOutcome>> caches(threads);
    while (acc < target_accepted) {
        // estimate how many more chunks to run this round
        double rate = done.empty() ? 1.0 : std::max(1e-6, double(acc) / double(next * kMonteCarloChunk));
        uint64_t more = uint64_t(std::ceil(double(target_accepted - acc) / (rate * kMonteCarloChunk)));
        more = std::max<uint64_t>(more, threads);
        std::vector<Chunk> batch(more);
        std::atomic<uint64_t> cursor{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; w++)
            pool.emplace_back([&, w] {
                for (uint64_t i; (i = cursor.fetch_add(1)) < more;) batch[i] = run_chunk(next + i, caches[w]);
            });
        for (auto &t : pool) t.join();
        for (auto &c : batch) {
            done.push_back(c);
            if (acc < target_accepted) {
                acc += c.accepted;
                needed = done.size();
            }
        }
        next += more;
    }
    MonteCarloResult r;
    r.seed = seed;
    r.p = p;
    r.chunks = needed;
    for (size_t i = 0; i < needed; i++) {
        r.trials += done[i].trials;
        r.accepted += done[i].accepted;
        r.errors += done[i].errors;
    }
    std::unordered_map<uint64_t, int> seen;
    for (auto &c : caches)
        for (auto &kv : c) seen[kv.first] = 1;
    r.distinct_patterns = seen.size();
    r.acceptance = double(r.accepted) / double(r.trials);
    r.output_error = r.accepted ? double(r.errors) / double(r.accepted) : 0;
    r.acceptance_ci = wilson_interval(r.accepted, r.trials, z);
    r.error_ci = wilson_interval(r.errors, r.accepted, z);
    return r;
}

}  // namespace patchwork
