#include <gtest/gtest.h>

#include "patchwork/distill_sim.hpp"

using namespace patchwork;

namespace {

BinMatrix mat(const std::string &name) { return load_matrix(data_path("matrices/" + name)); }

DistillationCircuit circuit_15() { return extract_circuit(mat("m15.txt")); }

DistillationCircuit circuit_20() {
    auto M = mat("m20.txt");
    auto corr = find_correction(M, mat("m20_correction.txt"));
    return extract_circuit(M, 3, *corr.pairs);
}

/// Syndrome rule, independent of the state vector: faulty input j flips the
/// X checks of every row in column j. Returns {detected, logical flipped}.
std::pair<bool, bool> syndrome(const BinMatrix &M, uint64_t mask) {
    std::vector<uint8_t> v(M.rows(), 0);
    for (size_t j = 0; j < M.cols(); j++)
        if (mask >> j & 1)
            for (size_t r = 0; r < M.rows(); r++) v[r] ^= M(r, j);
    bool det = false, log = false;
    for (size_t r = 0; r < M.rows(); r++) (r < M.stabilizers ? det : log) |= bool(v[r]);
    return {det, log};
}

/// Pattern bits in the simulator are ordered absorbed columns first, then
/// rotations in column order. Map a column mask to the simulator mask.
uint64_t column_mask_to_sim(const BinMatrix &M, const DistillationCircuit &c, uint64_t cols) {
    std::vector<size_t> absorbed, explicit_cols;
    std::vector<bool> used(M.rows(), false);
    for (size_t j = 0; j < M.cols(); j++) {
        if (M.col_weight(j) == 1) {
            size_t r = 0;
            while (!M(r, j)) r++;
            if (!used[r]) {
                used[r] = true;
                absorbed.push_back(j);
                continue;
            }
        }
        explicit_cols.push_back(j);
    }
    EXPECT_EQ(absorbed.size(), c.absorbed_qubit.size());
    uint64_t out = 0;
    size_t bit = 0;
    for (auto j : absorbed) out |= uint64_t(cols >> j & 1) << bit++;
    for (auto j : explicit_cols) out |= uint64_t(cols >> j & 1) << bit++;
    return out;
}

/// Exact acceptance and conditional output error from the syndrome rule.
std::pair<double, double> exact_rates(const BinMatrix &M, double p) {
    double acc = 0, err = 0;
    size_t n = M.cols();
    for (uint64_t e = 0; e < (uint64_t{1} << n); e++) {
        auto [det, log] = syndrome(M, e);
        if (det) continue;
        int w = std::popcount(e);
        double pr = std::pow(p, w) * std::pow(1 - p, int(n) - w);
        acc += pr;
        if (log) err += pr;
    }
    return {acc, err / acc};
}

}  // namespace

TEST(Matrix, ParseAndWrite) {
    auto G = mat("g16.txt");
    EXPECT_EQ(G.rows(), 5u);
    EXPECT_EQ(G.cols(), 16u);
    std::ostringstream out;
    write_matrix(out, G);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_matrix(in), G);
    std::istringstream bad("matrix 2 3 strict\n101\n10\n");
    EXPECT_THROW(parse_matrix(bad), ParseError);
    std::istringstream bad2("matrix 1 3 code\n101\n");
    EXPECT_THROW(parse_matrix(bad2), ParseError);
}

TEST(Triorth, Classification) {
    EXPECT_TRUE(check_triorthogonal(mat("g16.txt")).ok);
    BinMatrix w4({"1111"});
    EXPECT_FALSE(check_triorthogonal(w4).ok);
    EXPECT_TRUE(check_triorthogonal(w4, TriorthLevel::semi).ok);
    auto S = mat("semi24.txt");
    auto rep = check_triorthogonal(S);
    EXPECT_FALSE(rep.ok);
    EXPECT_FALSE(rep.violation.empty());
    EXPECT_TRUE(check_triorthogonal(S, TriorthLevel::semi).ok);
    EXPECT_THROW(check_triorthogonal(BinMatrix()), DimensionError);
}

TEST(Triorth, EchelonMatchesBundledForm) {
    auto E = echelon(mat("g16.txt"));
    EXPECT_TRUE(E.same_entries(mat("g16_echelon.txt")));
    EXPECT_TRUE(check_triorthogonal(E).ok);
    auto S = mat("semi24.txt");
    EXPECT_TRUE(echelon(S).same_entries(S));
    EXPECT_TRUE(echelon(E).same_entries(E));
}

TEST(Triorth, PunctureReproducesCodes) {
    auto G = mat("g16.txt");
    auto m15 = puncture(G, 1), m14 = puncture(G, 2), m20 = puncture(mat("semi24.txt"), 4);
    EXPECT_TRUE(m15.same_entries(mat("m15.txt")));
    EXPECT_TRUE(m14.same_entries(mat("m14.txt")));
    EXPECT_TRUE(m20.same_entries(mat("m20.txt")));
    EXPECT_EQ(m15.stabilizers, 4u);
    EXPECT_EQ(m14.stabilizers, 3u);
    EXPECT_EQ(m20.stabilizers, 3u);
    for (auto *m : {&m15, &m14, &m20}) {
        EXPECT_EQ(m->cls, MatrixClass::code);
        for (size_t r = 0; r < m->rows(); r++) EXPECT_EQ(m->row_weight(r) % 2, r < m->stabilizers ? 0u : 1u);
    }
    // puncturing preserves the class of the parent
    EXPECT_TRUE(check_triorthogonal(g_form(m15)).ok);
    EXPECT_TRUE(check_triorthogonal(g_form(m14)).ok);
    EXPECT_FALSE(check_triorthogonal(g_form(m20)).ok);
    EXPECT_TRUE(check_triorthogonal(g_form(m20), TriorthLevel::semi).ok);
    EXPECT_THROW(puncture(G, 6), InvariantError);
}

TEST(Triorth, SteaneAtQuarterLevel) {
    auto S = mat("steane7.txt");
    EXPECT_TRUE(check_triorthogonal(g_form(S), TriorthLevel::quarter).ok);
    EXPECT_FALSE(check_triorthogonal(g_form(S)).ok);
}

TEST(Correction, SeedAndSearch) {
    auto M = mat("m20.txt");
    auto seeded = find_correction(M, mat("m20_correction.txt"));
    ASSERT_TRUE(seeded.pairs);
    EXPECT_TRUE(seeded.from_seed);
    EXPECT_EQ(seeded.pairs->size(), 4u);
    auto searched = find_correction(M);
    ASSERT_TRUE(searched.pairs);
    EXPECT_FALSE(searched.from_seed);
    EXPECT_TRUE(completes(M, *searched.pairs));
    EXPECT_LE(searched.pairs->size(), 4u);
    // strict codes need nothing
    auto none = find_correction(mat("m15.txt"));
    ASSERT_TRUE(none.pairs);
    EXPECT_TRUE(none.pairs->empty());
    // a width bound that is too small reports failure
    EXPECT_FALSE(find_correction(M, std::nullopt, 2).pairs);
}

TEST(Extract, Counts) {
    auto c15 = circuit_15();
    EXPECT_EQ(c15.qubits, 5u);
    EXPECT_EQ(c15.rotations.size(), 11u);
    EXPECT_EQ(c15.absorbed_qubit.size(), 4u);
    EXPECT_EQ(c15.inputs(), 15u);
    auto c20 = circuit_20();
    EXPECT_EQ(c20.qubits, 7u);
    EXPECT_EQ(c20.rotations.size(), 17u);
    EXPECT_EQ(c20.correction.size(), 4u);
    EXPECT_EQ(c20.inputs(), 20u);
    auto c7 = extract_circuit(mat("steane7.txt"), 2);
    EXPECT_EQ(c7.qubits, 4u);
    EXPECT_EQ(c7.rotations.size(), 4u);
    for (auto *c : {&c15, &c20, &c7}) {
        for (auto &a : c->rotations)
            for (auto &b : c->rotations) EXPECT_TRUE(a.axis.commutes(b.axis));
        for (auto &r : c->rotations) EXPECT_EQ(r.axis.count('X') + r.axis.count('Y'), 0u);
    }
    for (auto &r : circuit_15().rotations) EXPECT_EQ(r.angle, Angle::pi_over(3));
    // the first explicit 15-to-1 rotation acts on qubits 3, 4, 5
    EXPECT_EQ(c15.rotations[0].axis, PauliString::from_str("IIZZZ"));
}

TEST(Extract, IdealRunsAccept) {
    for (auto c : {circuit_15(), circuit_20(), extract_circuit(mat("m14.txt")), extract_circuit(mat("steane7.txt"), 2)}) {
        DistillationSimulator sim(c);
        auto o = sim.outcome(0);
        EXPECT_NEAR(o.accept, 1.0, 1e-12);
        EXPECT_NEAR(o.fidelity, 1.0, 1e-12);
    }
    // 20-to-4 without its Clifford correction does not accept deterministically
    EXPECT_THROW(DistillationSimulator(extract_circuit(mat("m20.txt"))), InvariantError);
}

TEST(Extract, IdealOutputs) {
    auto product = [](std::vector<std::array<cplx, 2>> qs) {
        std::vector<cplx> v{1.0};
        for (auto &q : qs) {
            std::vector<cplx> w;
            for (auto a : v)
                for (auto b : q) w.push_back(a * b);
            v = w;
        }
        return v;
    };
    auto plus = Prep::plus().amplitudes(), mbar = Prep::magic_bar().amplitudes();
    DistillationSimulator s15(circuit_15());
    EXPECT_NEAR(LogicalState::fidelity(s15.ideal_output(), product({plus, plus, plus, plus, mbar})), 1.0, 1e-12);
    DistillationSimulator s20(circuit_20());
    EXPECT_NEAR(LogicalState::fidelity(s20.ideal_output(), product({plus, plus, plus, mbar, mbar, mbar, mbar})), 1.0,
                1e-12);
}

TEST(Extract, FoldedCorrectionMatches) {
    auto c = circuit_20();
    auto f = fold_correction(c);
    EXPECT_TRUE(f.correction.empty());
    for (size_t q = 0; q < 3; q++) EXPECT_EQ(f.init[q].label, StateLabel::magic_bar);
    size_t neg = 0;
    for (auto &r : f.rotations) neg += r.angle == Angle::pi_over(3, -1);
    EXPECT_EQ(neg, 1u);
    EXPECT_EQ(f.rotations[0].axis, PauliString::from_str("ZZZIIII"));
    EXPECT_EQ(f.rotations[0].angle, Angle::pi_over(3, -1));
    DistillationSimulator a(c), b(f);
    EXPECT_NEAR(LogicalState::fidelity(a.ideal_output(), b.ideal_output()), 1.0, 1e-12);
}

TEST(Simulator, MatchesSyndromeRuleOnLowWeightPatterns) {
    for (auto [M, c] : {std::pair{mat("m15.txt"), circuit_15()}, std::pair{mat("m20.txt"), circuit_20()}}) {
        DistillationSimulator sim(c);
        size_t n = M.cols();
        size_t undetected_logical[4] = {0, 0, 0, 0};
        for (uint64_t e = 0; e < (uint64_t{1} << n); e++) {
            int w = std::popcount(e);
            if (w > 3) continue;
            auto [det, log] = syndrome(M, e);
            auto o = sim.outcome(column_mask_to_sim(M, c, e));
            EXPECT_NEAR(o.accept, det ? 0.0 : 1.0, 1e-9);
            if (!det) EXPECT_NEAR(o.fidelity, log ? 0.0 : 1.0, 1e-9);
            if (!det && log) undetected_logical[w]++;
        }
        if (n == 15) {
            EXPECT_EQ(undetected_logical[1] + undetected_logical[2], 0u);
            EXPECT_EQ(undetected_logical[3], 35u);
        } else {
            EXPECT_EQ(undetected_logical[1], 0u);
            EXPECT_EQ(undetected_logical[2], 22u);
        }
    }
}

TEST(MonteCarlo, ZeroNoise) {
    DistillationSimulator sim(circuit_15());
    auto r = distill_monte_carlo(sim, 0.0, 100000, 1, 2);
    EXPECT_EQ(r.accepted, r.trials);
    EXPECT_EQ(r.errors, 0u);
    EXPECT_EQ(r.acceptance, 1.0);
    EXPECT_LE(r.acceptance_ci.lo, 1.0);
    EXPECT_EQ(r.acceptance_ci.hi, 1.0);
    EXPECT_EQ(r.error_ci.lo, 0.0);
}

TEST(MonteCarlo, AgreesWithExactRatesAndThreadCount) {
    auto M = mat("m15.txt");
    DistillationSimulator sim(circuit_15());
    double p = 0.02;
    auto [acc, err] = exact_rates(M, p);
    auto r1 = distill_monte_carlo(sim, p, 400000, 42, 1);
    auto r4 = distill_monte_carlo(sim, p, 400000, 42, 4);
    EXPECT_EQ(r1.trials, r4.trials);
    EXPECT_EQ(r1.accepted, r4.accepted);
    EXPECT_EQ(r1.errors, r4.errors);
    EXPECT_GE(r1.accepted, 400000u);
    EXPECT_NEAR(r1.acceptance, acc, 4 * binomial_sigma(acc, r1.trials));
    EXPECT_NEAR(r1.output_error, err, 4 * binomial_sigma(err, r1.accepted));
    EXPECT_LE(r1.acceptance_ci.lo, acc);
    EXPECT_GE(r1.acceptance_ci.hi, acc);
}

TEST(Models, ErrorRates) {
    EXPECT_NEAR(error_model(find_protocol("15-to-1"), 1e-4).per_state, 3.5e-11, 1e-20);
    EXPECT_NEAR(error_model(find_protocol("116-to-12"), 1e-3).per_state, 4.125e-11, 1e-20);
    EXPECT_NEAR(error_model(find_protocol("225-to-1"), 1e-3).per_state / 1.5e-21, 1.0, 0.01);
    EXPECT_NEAR(error_model(find_protocol("14-to-2"), 1e-2).per_state, 7e-4, 1e-12);
    auto e20 = error_model(find_protocol("20-to-4"), 1e-2);
    EXPECT_NEAR(e20.total, 22e-4, 1e-12);
    EXPECT_NEAR(e20.per_state, 5.5e-4, 1e-12);
    EXPECT_TRUE(e20.correlated);
    EXPECT_NEAR(error_model(find_protocol("912-to-112"), 1e-3).per_state, 10.63e-18, 1e-25);
    EXPECT_THROW(find_protocol("3-to-1"), InvariantError);
    EXPECT_THROW(error_model(find_protocol("15-to-1"), 1.0), DimensionError);
}

TEST(Models, Costs) {
    EXPECT_NEAR(cost_per_state(15, 4, 1, 0), 126.5, 1e-12);
    // the generic formula: [1.5(64 + 112) + 4] * 848 / 112
    EXPECT_NEAR(cost_per_state(912, 64, 112, 0), 268.0 * 848 / 112, 1e-9);
    EXPECT_NEAR(std::pow(0.999, 912), 0.4015, 1e-4);
    // with the wide block: deterministic 1665.7, about 4148 after post-selection
    EXPECT_NEAR(block_cost_per_state(find_protocol("912-to-112"), 1e-3), 440.0 * 424 / 112 / std::pow(0.999, 912), 1e-9);
    EXPECT_NEAR(block_cost_per_state(find_protocol("912-to-112"), 1e-3) / 4146, 1.0, 0.001);
    EXPECT_EQ(cost_per_state(5, 5, 1, 0), 0.0);
    EXPECT_THROW(cost_per_state(15, 4, 1, 1.0), DimensionError);
    // wide 912-to-112 block: 2.5(m_x + k) tiles for (n - m_x)/2 ticks
    auto w = block_cost(find_protocol("912-to-112"));
    EXPECT_EQ(w.tiles, 440);
    EXPECT_EQ(w.ticks, 424);
    EXPECT_NEAR(block_cost_per_state(find_protocol("912-to-112"), 0), 1665.7, 0.1);
    auto &p116 = find_protocol("116-to-12");
    EXPECT_NEAR(block_cost_per_state(p116, 0, "compact"), 363.0, 1e-12);
    EXPECT_NEAR(block_cost_per_state(p116, 0, "wide"), 337.5, 1e-12);
    EXPECT_NEAR(success_probability(p116, 1e-3), 0.8904, 1e-4);
    EXPECT_NEAR(ticks_per_state(p116, 1e-3, "compact"), 9.27, 0.005);
    EXPECT_NEAR(ticks_per_state(p116, 1e-3, "wide"), 4.68, 0.005);
    EXPECT_NEAR(ticks_per_state(p116, 1e-3, "modified"), 4.96, 0.005);
    EXPECT_NEAR(success_probability(find_protocol("15-to-1"), 1e-3), 0.985, 0.0005);
    EXPECT_EQ(block_cost(find_protocol("15-to-1")).tiles * block_cost(find_protocol("15-to-1")).ticks, 121);
    EXPECT_EQ(block_cost(find_protocol("20-to-4")).tiles * block_cost(find_protocol("20-to-4")).ticks, 238);
    EXPECT_EQ(block_cost(find_protocol("7-to-1")).tiles * block_cost(find_protocol("7-to-1")).ticks, 28);
    // generic layout for an unregistered shape
    EXPECT_EQ(block_cost(find_protocol("14-to-2")).variant, "generic");
}

TEST(Pipeline, ConcatenatedThroughput) {
    auto &p = find_protocol("225-to-1");
    auto ideal = concatenated_throughput(p, 0.0, 300000);
    EXPECT_DOUBLE_EQ(ideal.level1_period, 1.0);
    EXPECT_NEAR(ideal.output_period, 15.0, 1e-3);
    EXPECT_NEAR(ideal.cost_d3, 2640, 0.5);
    EXPECT_EQ(ideal.skip_rate, 0.0);
    auto noisy = concatenated_throughput(p, 1e-3, 2000000);
    double q = std::pow(0.999, 15);
    EXPECT_NEAR(noisy.skip_rate, 1 - q, 0.001);
    EXPECT_NEAR(noisy.cost_d3, 2640 / q, 10);
    EXPECT_NEAR(noisy.cost_d3, 2680, 15);
    EXPECT_THROW(concatenated_throughput(find_protocol("15-to-1"), 0.0), InvariantError);
}
