#pragma once

// Branch-by-branch replay of board schedules against ideal targets.

#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "patchwork/protocols.hpp"
#include "semantics.hpp"

namespace patchwork::board {

inline ValidationReport valid(const Protocol &p) {
    auto r = validate_schedule(p.schedule, p.initial);
    EXPECT_TRUE(r.ok) << p.name << ": " << r.violation;
    return r;
}

inline PauliString ops(const std::string &s) { return PauliString::from_str(s); }

/// Every outcome branch of the protocol against `target`, which may read
/// the branch outcomes (for projections).
inline double worst_replay(const Protocol &p, const std::function<void(LogicalState &, const std::vector<int> &)> &target,
                    int samples = 4, uint64_t seed = 7) {
    auto r = valid(p);
    size_t n = p.initial.register_size();
    size_t data = p.data_qubits.size();
    std::mt19937_64 rng(seed);
    double worst = 1;
    size_t branches = 0;
    for (int t = 0; t < samples; t++) {
        auto init = data ? LogicalState::with_data(n, semantics::random_state(rng, size_t{1} << data))
                         : LogicalState(n);
        for_each_branch(init, r.program, [&](const Transcript &tr) {
            LogicalState want = init;
            target(want, tr.outcomes);
            worst = std::min(worst, LogicalState::fidelity(tr.state.amplitudes(), want.amplitudes()));
            branches++;
        });
    }
    EXPECT_GT(branches, 0u);
    return worst;
}

inline void project(LogicalState &s, const PauliString &P, int outcome) {
    s.measure(PauliMeasurement(P), outcome, nullptr);
}

}  // namespace patchwork::board
