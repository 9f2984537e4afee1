#include <gtest/gtest.h>

#include <cmath>

#include "patchwork/blocks.hpp"
#include "oracle.hpp"
#include "replay.hpp"

using namespace patchwork;
using namespace patchwork::board;
using namespace patchwork::blocks;

namespace {

const BlockKind kinds[] = {BlockKind::compact, BlockKind::intermediate, BlockKind::fast};

/// All 4^n - 1 non-identity axes on n qubits.
std::vector<PauliString> all_axes(size_t n) {
    std::vector<PauliString> out;
    size_t total = size_t{1} << (2 * n);
    for (size_t code = 1; code < total; code++) {
        PauliString p(n);
        for (size_t q = 0; q < n; q++) p.set(q, "IXYZ"[(code >> (2 * q)) & 3]);
        out.push_back(p);
    }
    return out;
}

double replay_rotation(const ConsumptionPlan &plan, int samples = 2) {
    size_t reg = plan.protocol.initial.register_size();
    PauliString P = plan.axis.embed(reg, blocks::data_range(plan.axis.num_qubits()));
    return worst_replay(plan.protocol, [&](LogicalState &s, const std::vector<int> &) {
        s.apply_rotation(PauliRotation(P, Angle::pi_over(3, plan.sign)));
    }, samples);
}

}  // namespace

// ---------------------------------------------------------------------------
// layouts

TEST(Layout, TileCountsMatchClosedForms) {
    for (size_t n = 1; n <= 512; n++) {
        EXPECT_EQ(layout(BlockKind::compact, n).tiles, size_t(std::ceil(1.5 * double(n))) + 3) << n;
        EXPECT_EQ(layout(BlockKind::intermediate, n).tiles, 2 * n + 4) << n;
        for (auto k : kinds) EXPECT_EQ(layout(k, n).tiles, tile_formula(k, n)) << kind_name(k) << " " << n;
    }
}

TEST(Layout, FastBlockMatchesSquareRootFormWhenHalfIsSquare) {
    for (size_t m = 1; m <= 16; m++) {
        size_t n = 2 * m * m;
        auto expect = 2 * double(n) + std::sqrt(8.0 * double(n)) + 1;
        EXPECT_DOUBLE_EQ(double(layout(BlockKind::fast, n).tiles), expect) << n;
    }
}

TEST(Layout, ReferenceSizes) {
    EXPECT_EQ(layout(BlockKind::compact, 100).tiles, 153u);
    EXPECT_EQ(layout(BlockKind::intermediate, 100).tiles, 204u);
    EXPECT_EQ(layout(BlockKind::fast, 100).tiles, 231u);
    EXPECT_EQ(layout(BlockKind::fast, 18).tiles, 49u);
}

TEST(Layout, InitialBoardsAreLegal) {
    for (auto k : kinds)
        for (size_t n = 1; n <= 24; n++) {
            auto s = layout(k, n);
            auto b = blocks::detail::initial_board(s, initial_state(s));
            EXPECT_LE(b.occupied_tiles(), s.tiles);
            std::set<Tile> foot(s.footprint.begin(), s.footprint.end());
            for (auto &t : s.data_tiles) EXPECT_TRUE(foot.count(t));
        }
    EXPECT_THROW(layout(BlockKind::compact, 0), DimensionError);
}

// ---------------------------------------------------------------------------
// deformation helpers

TEST(Helpers, PlainMoveKeepsOrientation) {
    Board b(2, 1, 1);
    b.place(square(0, {0, 0}, 0, 1, Side::top));
    ScheduleBuilder sb(b);
    sb.step();
    sb.deform(0, {{0, 0}, {1, 0}}, grow_square_corners(sb.board().patch(0), {1, 0}));
    sb.step();
    sb.deform(0, {{1, 0}}, shrink_corners(sb.board().patch(0), {{1, 0}}));
    auto &p = sb.board().patch(0);
    EXPECT_EQ(p.edges[p.edge_at({1, 0}, Side::top)].kind, EdgeKind::X);
    EXPECT_EQ(p.edges[p.edge_at({1, 0}, Side::left)].kind, EdgeKind::Z);
}

TEST(Helpers, FlipSwapsOrientationInEveryDirection) {
    for (int k = 0; k < 4; k++) {
        Side dir = Side(k);
        Board b(3, 3, 1);
        b.place(square(0, {1, 1}, 0, 1, Side::top));
        Tile t = neighbor({1, 1}, dir);
        ScheduleBuilder sb(b);
        sb.step();
        sb.deform(0, {{1, 1}, t}, grow_square_corners(sb.board().patch(0), t));
        sb.step();
        sb.deform(0, sb.board().patch(0).tiles, flip_corners(sb.board().patch(0), t));
        sb.step();
        sb.deform(0, {t}, shrink_corners(sb.board().patch(0), {t}));
        auto r = validate_schedule(sb.build(), b);
        ASSERT_TRUE(r.ok) << r.violation;
        EXPECT_EQ(r.duration, 2u);
        auto &p = sb.board().patch(0);
        EXPECT_EQ(p.edges[p.edge_at(t, Side::top)].kind, EdgeKind::Z) << k;
        EXPECT_EQ(p.edges[p.edge_at(t, Side::left)].kind, EdgeKind::X) << k;
    }
}

TEST(Helpers, ShrinkRefusesToDropTwoEdges) {
    auto p = make_patch(0, {{0, 0}, {1, 0}}, {0}, 1, Segment{{0, 0}, Side::top}, {1, 1, 3, 1});
    EXPECT_THROW(shrink_corners(p, {{1, 0}}), IllegalOpError);
}

// ---------------------------------------------------------------------------
// pre-rotations

TEST(PreRotation, ClearsEveryYWithAtMostTwoRotations) {
    for (size_t n = 1; n <= 5; n++)
        for (auto &P : all_axes(n)) {
            std::vector<char> facing(n, 'Z');
            auto pre = y_elimination(P, facing);
            EXPECT_LE(pre.size(), 2u);
            EXPECT_EQ(pre.empty(), P.count('Y') == 0);
            auto Q = conjugated(P, pre);
            EXPECT_EQ(Q.count('Y'), 0u) << P.str();
            EXPECT_EQ(Q.phase_exp() % 2, 0) << P.str();
        }
}

TEST(PreRotation, ConjugationAgreesWithDenseMatrices) {
    // R P R^dag for R = exp(-i pi/4 A) against the product form
    for (size_t n = 1; n <= 3; n++)
        for (auto &P : all_axes(n)) {
            auto pre = y_elimination(P, std::vector<char>(n, 'Z'));
            if (pre.empty()) continue;
            oracle::M M = oracle::pauli(P.str(false));
            for (auto &A : pre) {
                oracle::M R = oracle::rot(A.str(false), M_PI / 4);
                M = R * M * R.adjoint();
            }
            auto Q = conjugated(P, pre);
            EXPECT_TRUE(M.isApprox(double(Q.sign()) * oracle::pauli(Q.str(false)), 1e-12)) << P.str();
        }
}

// ---------------------------------------------------------------------------
// consumption schedules

TEST(Consumption, ExamplesFromTheLayouts) {
    auto c = layout(BlockKind::compact, 5);
    EXPECT_EQ(plan_consumption(c, PauliString::from_str("ZZZZZ")).ticks, 1u);
    auto m = layout(BlockKind::intermediate, 5);
    auto p = plan_consumption(m, PauliString::from_str("ZXZZX"));
    EXPECT_LE(p.ticks, 5u);
    EXPECT_EQ(p.patch_rotations, 2u);
    EXPECT_TRUE(p.pre_rotations.empty());
    auto f = layout(BlockKind::fast, 5);
    EXPECT_EQ(plan_consumption(f, PauliString::from_str("YXZIY")).ticks, 1u);
}

TEST(Consumption, WorstCaseOverEverySixQubitAxis) {
    for (auto k : kinds) {
        auto s = layout(k, 6);
        size_t worst = 0;
        for (auto &P : all_axes(6)) {
            auto plan = plan_consumption(s, P);
            EXPECT_LE(plan.ticks, worst_case_ticks(k)) << kind_name(k) << " " << P.str();
            worst = std::max(worst, plan.ticks);
        }
        EXPECT_EQ(worst, worst_case_ticks(k)) << kind_name(k);
    }
    EXPECT_EQ(plan_consumption(layout(BlockKind::compact, 6), PauliString::from_str("YIYZYY")).ticks, 9u);
}

TEST(Consumption, ScheduleImplementsTheRotation) {
    for (auto k : kinds)
        for (size_t n = 1; n <= 3; n++)
            for (auto &P : all_axes(n))
                for (int sign : {1, -1}) {
                    auto plan = plan_consumption(layout(k, n), P, sign);
                    EXPECT_NEAR(replay_rotation(plan, 1), 1.0, 1e-9) << kind_name(k) << " " << P.str() << " " << sign;
                }
}

TEST(Consumption, LargerAxesSampled) {
    std::mt19937_64 rng(11);
    for (auto k : kinds)
        for (size_t n : {4, 5}) {
            auto axes = all_axes(n);
            std::shuffle(axes.begin(), axes.end(), rng);
            for (size_t i = 0; i < 12; i++) {
                auto plan = plan_consumption(layout(k, n), axes[i]);
                EXPECT_NEAR(replay_rotation(plan, 1), 1.0, 1e-9) << kind_name(k) << " " << axes[i].str();
            }
        }
}

TEST(Consumption, StateCarriesOverBetweenRotations) {
    // a sequence of rotations, each starting where the last one left off
    for (auto k : {BlockKind::compact, BlockKind::intermediate}) {
        auto s = layout(k, 4);
        BlockState st = initial_state(s);
        for (auto text : {"XZXZ", "YXIZ", "ZZZZ", "XYYX"}) {
            auto plan = plan_consumption(s, PauliString::from_str(text), 1, st);
            EXPECT_NEAR(replay_rotation(plan, 1), 1.0, 1e-9) << kind_name(k) << " " << text;
            st = plan.after;
        }
    }
}

TEST(Consumption, IdentityAndWrongWidth) {
    auto s = layout(BlockKind::compact, 3);
    EXPECT_EQ(plan_consumption(s, PauliString(3)).ticks, 0u);
    EXPECT_THROW(plan_consumption(s, PauliString(4)), DimensionError);
}

// ---------------------------------------------------------------------------
// two-qubit device

TEST(ProofOfPrinciple, StepsTicksAndQubits) {
    auto p = proof_of_principle_scenario(3);
    auto r = valid(p.protocol);
    EXPECT_EQ(p.steps, 14u);
    EXPECT_EQ(r.duration, 7u);
    EXPECT_LE(r.footprint, 6u);
    EXPECT_EQ(p.protocol.initial.width() * p.protocol.initial.height(), 6);
    EXPECT_EQ(proof_of_principle_qubits(3), 48u);
    EXPECT_EQ(proof_of_principle_qubits(5), 140u);
    EXPECT_EQ(proof_of_principle_qubits(7), 280u);
    EXPECT_THROW(proof_of_principle_scenario(4), DimensionError);
}

TEST(ProofOfPrinciple, ImplementsTheThreeRotations) {
    auto p = proof_of_principle_scenario(3);
    double f = worst_replay(p.protocol, [&](LogicalState &s, const std::vector<int> &) {
        for (auto &r : p.rotations) s.apply_rotation(r);
    }, 4);
    EXPECT_NEAR(f, 1.0, 1e-9);
}
