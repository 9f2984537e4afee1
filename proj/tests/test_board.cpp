#include <gtest/gtest.h>

#include <cmath>

#include "patchwork/protocols.hpp"
#include "replay.hpp"

using namespace patchwork;
using namespace patchwork::board;

namespace {

Board two_squares() {
    Board b(3, 2, 2);
    b.place(square(0, {0, 0}, 0, 2, Side::top));
    b.place(square(1, {2, 0}, 1, 2, Side::top));
    return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// geometry

TEST(Geometry, BoundaryIsClockwiseFromTopOfFirstTile) {
    auto loop = boundary({{0, 0}, {1, 0}});
    ASSERT_EQ(loop.size(), 6u);
    EXPECT_EQ(loop[0].side, Side::top);
    EXPECT_EQ(loop[2].side, Side::right);
    for (size_t i = 0; i < loop.size(); i++) EXPECT_EQ(loop[i].to(), loop[(i + 1) % loop.size()].from());
}

TEST(Geometry, RejectsHolesAndDisconnectedTiles) {
    EXPECT_THROW(boundary({{0, 0}, {2, 0}}), IllegalOpError);
    std::vector<Tile> ring;
    for (int x = 0; x < 3; x++)
        for (int y = 0; y < 3; y++)
            if (x != 1 || y != 1) ring.push_back({x, y});
    EXPECT_THROW(boundary(ring), IllegalOpError);
    EXPECT_THROW(boundary({{0, 0}, {1, 1}}), IllegalOpError);
}

TEST(Geometry, StandardEdgeLabels) {
    auto e = standard_edges(2, {0, 1});
    ASSERT_EQ(e.size(), 6u);
    const char *want[] = {"X_", "Z_", "XX", "_Z", "_X", "ZZ"};
    for (size_t i = 0; i < 6; i++) EXPECT_EQ(e[i].op.str(), PauliString::from_str(want[i]).str()) << i;
}

TEST(Geometry, SquareSidesCarryTheRequestedOperators) {
    Patch p = square(0, {0, 0}, 0, 1, Side::top);
    EXPECT_EQ(p.edges[p.edge_at({0, 0}, Side::top)].kind, EdgeKind::X);
    EXPECT_EQ(p.edges[p.edge_at({0, 0}, Side::bottom)].kind, EdgeKind::X);
    EXPECT_EQ(p.edges[p.edge_at({0, 0}, Side::left)].kind, EdgeKind::Z);
    Patch q = square(0, {0, 0}, 0, 1, Side::right);
    EXPECT_EQ(q.edges[q.edge_at({0, 0}, Side::top)].kind, EdgeKind::Z);
}

// ---------------------------------------------------------------------------
// legality

TEST(Legality, InitOnOccupiedTile) {
    ScheduleBuilder b(two_squares());
    b.step();
    EXPECT_THROW(b.init(square(5, {0, 0}, 0, 2), Prep::zero()), IllegalOpError);
}

TEST(Legality, OutOfBounds) {
    Board b(2, 1, 1);
    EXPECT_THROW(b.place(square(0, {2, 0}, 0, 1)), IllegalOpError);
    Board c = two_squares();
    c.begin_group();
    op::Measure m{{{0, c.patch(0).edge_at({0, 0}, Side::top)}, {1, c.patch(1).edge_at({2, 0}, Side::top)}},
                  {{0, -1}, {1, -1}, {2, -1}}};
    EXPECT_THROW(c.apply(m), IllegalOpError);
}

TEST(Legality, DisconnectedAncilla) {
    Board c = two_squares();
    c.begin_group();
    op::Measure m{{{0, c.patch(0).edge_at({0, 0}, Side::bottom)}, {1, c.patch(1).edge_at({2, 0}, Side::bottom)}},
                  {{0, 1}, {2, 1}}};
    EXPECT_THROW(c.apply(m), IllegalOpError);
}

TEST(Legality, AncillaMustTouchEveryEdge) {
    Board c = two_squares();
    c.begin_group();
    op::Measure m{{{0, c.patch(0).edge_at({0, 0}, Side::right)}, {1, c.patch(1).edge_at({2, 0}, Side::bottom)}},
                  {{1, 0}}};
    EXPECT_THROW(c.apply(m), IllegalOpError);
}

TEST(Legality, AncillaOnOccupiedTile) {
    Board c = two_squares();
    c.begin_group();
    op::Measure m{{{0, c.patch(0).edge_at({0, 0}, Side::bottom)}, {1, c.patch(1).edge_at({2, 0}, Side::bottom)}},
                  {{0, 0}, {0, 1}, {1, 1}, {2, 1}}};
    EXPECT_THROW(c.apply(m), IllegalOpError);
}

TEST(Legality, SharedAncillaTileInOneStep) {
    Board c = two_squares();
    c.begin_group();
    auto e0 = c.patch(0).edge_at({0, 0}, Side::right);
    auto e1 = c.patch(1).edge_at({2, 0}, Side::left);
    c.apply(op::Measure{{{0, e0}, {1, e1}}, {{1, 0}}});
    auto f0 = c.patch(0).edge_at({0, 0}, Side::bottom);
    auto f1 = c.patch(1).edge_at({2, 0}, Side::bottom);
    // a disjoint path is fine; repeating it reuses its tiles
    EXPECT_NO_THROW(c.apply(op::Measure{{{0, f0}, {1, f1}}, {{0, 1}, {1, 1}, {2, 1}}}));
    EXPECT_THROW(c.apply(op::Measure{{{0, f0}, {1, f1}}, {{0, 1}, {1, 1}, {2, 1}}}), IllegalOpError);
    c.end_group();
    c.begin_group();
    EXPECT_NO_THROW(c.apply(op::Measure{{{0, f0}, {1, f1}}, {{0, 1}, {1, 1}, {2, 1}}}));
}

TEST(Legality, DirectMeasurementNeedsFacingEdges) {
    Board c = two_squares();
    c.begin_group();
    op::Measure m{{{0, c.patch(0).edge_at({0, 0}, Side::right)}, {1, c.patch(1).edge_at({2, 0}, Side::left)}}, {}};
    EXPECT_THROW(c.apply(m), IllegalOpError);
}

TEST(Legality, IdentityProductIsRejected) {
    Board c(3, 2, 2);
    c.place(make_patch(0, {{0, 0}, {1, 0}}, {0}, 2, Segment{{0, 0}, Side::top}, {1, 1, 1, 3}));
    c.place(square(1, {2, 1}, 1, 2));
    c.begin_group();
    // an X and the matching X edge of the same qubit multiply to identity
    auto x1 = c.patch(0).edge_at({0, 0}, Side::top), x2 = c.patch(0).edge_at({1, 0}, Side::right);
    EXPECT_EQ(c.patch(0).edges[x1].kind, EdgeKind::X);
    EXPECT_EQ(c.patch(0).edges[x2].kind, EdgeKind::X);
    EXPECT_THROW(c.apply(op::Measure{{{0, x1}, {0, x2}, {1, c.patch(1).edge_at({2, 1}, Side::top)}}, {{2, 0}}}),
                 IllegalOpError);
}

TEST(Legality, NonCommutingMeasurementsInOneStep) {
    Board c(2, 2, 3);
    c.place(square(0, {0, 0}, 0, 3, Side::top));
    c.place(square(1, {1, 0}, 1, 3, Side::top));
    c.place(square(2, {1, 1}, 2, 3, Side::top));
    c.begin_group();
    c.apply(op::Measure{{{0, c.patch(0).edge_at({0, 0}, Side::right)}, {1, c.patch(1).edge_at({1, 0}, Side::left)}}});
    // X on q0 anticommutes with the Z(x)Z just made
    op::Measure xz{{{0, c.patch(0).edge_at({0, 0}, Side::bottom)}, {2, c.patch(2).edge_at({1, 1}, Side::left)}},
                   {{0, 1}}};
    EXPECT_THROW(c.apply(xz), IllegalOpError);
    c.end_group();
    c.begin_group();
    EXPECT_NO_THROW(c.apply(xz));
}

TEST(Legality, GrowOntoOccupiedTileAndMixedDeform) {
    Board c = two_squares();
    c.begin_group();
    EXPECT_THROW(c.apply(op::Deform{0, {{0, 0}, {1, 0}, {2, 0}},
                                    corners_for({{0, 0}, {1, 0}, {2, 0}}, Segment{{0, 0}, Side::top}, {3, 1, 3, 1})}),
                 IllegalOpError);
    EXPECT_THROW(c.apply(op::Deform{0, {{0, 1}}, corners_for({{0, 1}}, Segment{{0, 1}, Side::top}, {1, 1, 1, 1})}),
                 IllegalOpError);
}

TEST(Legality, MultiQubitPatchStartsInPauliEigenstates) {
    Board c(2, 1, 2);
    c.begin_group();
    auto p = make_patch(0, {{0, 0}, {1, 0}}, {0, 1}, 2, Segment{{0, 0}, Side::top}, {1, 1, 1, 1, 1, 1});
    EXPECT_THROW(c.apply(op::Init{p, Prep::magic()}), IllegalOpError);
    EXPECT_NO_THROW(c.apply(op::Init{p, Prep::plus()}));
}

TEST(Legality, ValidatorReportsInsteadOfThrowing) {
    Schedule s;
    s.groups.push_back({{op::Init{square(0, {0, 0}, 0, 1), Prep::zero()}}});
    s.groups.push_back({{op::Init{square(1, {0, 0}, 0, 1), Prep::zero()}}});
    auto r = validate_schedule(s, Board(1, 1, 1));
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.group, 1u);
    EXPECT_FALSE(r.violation.empty());
}

// ---------------------------------------------------------------------------
// durations

TEST(Durations, NamedProtocols) {
    struct Want {
        Protocol p;
        size_t ticks;
    };
    std::vector<Want> cases{{bell_prep(), 1},        {move_patch(1), 1},
                            {move_patch(4), 1},      {corner_move(), 1},
                            {y_measurement(), 2},    {multi_patch_measurement(), 1},
                            {rotate_patch(), 3},     {selective_pi4(true), 1},
                            {auto_corrected_pi8(), 1}, {bell_measurement(), 2},
                            {multi_corner_measurement(), 1}};
    for (auto &c : cases) {
        auto r = valid(c.p);
        EXPECT_EQ(r.duration, c.ticks) << c.p.name;
        EXPECT_EQ(c.p.expected_ticks, c.ticks) << c.p.name;
    }
}

TEST(Durations, BellLadderTakesRootNPlusOne) {
    for (size_t k : {1, 2, 3, 4}) {
        auto p = bell_ladder(k, 3);
        auto r = valid(p);
        EXPECT_EQ(r.duration, k + 1) << k;
        // every patch of the inner unit is paired both up and down
        size_t pairs = 0;
        for (auto &g : p.schedule.groups)
            for (auto &o : g.ops) pairs += std::holds_alternative<op::Measure>(o);
        EXPECT_EQ(pairs, 2 * k * k);
    }
    auto two = bell_ladder(3, 2);
    EXPECT_EQ(valid(two).duration, 3u);
}

TEST(Durations, ClockIsAdditiveAndHistoryFree) {
    auto m = move_patch(2);
    auto first = valid(m);
    ASSERT_TRUE(first.final_board);
    // the same schedule from a board that has already run it
    Board after = *first.final_board;
    // move back: mirror image of the first move
    ScheduleBuilder back(after);
    back.step();
    back.deform(0, board::detail::row(0, 0, 2), Segment{{0, 0}, Side::top}, {3, 1, 3, 1});
    back.step();
    back.deform(0, {{0, 0}}, Segment{{0, 0}, Side::top}, {1, 1, 1, 1});
    Schedule returned = back.build();
    auto second = validate_schedule(returned, after);
    ASSERT_TRUE(second.ok) << second.violation;
    Schedule both = m.schedule;
    both.groups.insert(both.groups.end(), returned.groups.begin(), returned.groups.end());
    auto joined = validate_schedule(both, m.initial);
    ASSERT_TRUE(joined.ok) << joined.violation;
    EXPECT_EQ(joined.duration, first.duration + second.duration);
    EXPECT_EQ(joined.group_ticks.back(), 2u);
    // validating again gives the same answer
    auto again = validate_schedule(m.schedule, m.initial);
    EXPECT_EQ(again.duration, first.duration);
    EXPECT_EQ(again.group_ticks, first.group_ticks);
    // and so does validating from the returned board, whose clock is not 0
    Board later = *joined.final_board;
    EXPECT_EQ(later.clock(), 2);
    auto from_later = validate_schedule(m.schedule, later);
    ASSERT_TRUE(from_later.ok) << from_later.violation;
    EXPECT_EQ(from_later.duration, first.duration);
    EXPECT_EQ(from_later.group_ticks, first.group_ticks);
}

TEST(Durations, OpCosts) {
    Board b(2, 1, 1);
    b.place(square(0, {0, 0}, 0, 1));
    std::vector<Tile> both{{0, 0}, {1, 0}};
    op::Deform grow{0, both, corners_for(both, Segment{{0, 0}, Side::top}, {2, 1, 2, 1})};
    EXPECT_EQ(b.classify(grow), DeformKind::grow);
    EXPECT_EQ(op_cost(b, grow), 1);
    b.begin_group();
    b.apply(grow);
    b.end_group();
    op::Deform shrink{0, {{1, 0}}, corners_for({{1, 0}}, Segment{{1, 0}, Side::top}, {1, 1, 1, 1})};
    EXPECT_EQ(b.classify(shrink), DeformKind::shrink);
    EXPECT_EQ(op_cost(b, shrink), 0);
    op::Deform move{0, both, corners_for(both, Segment{{0, 0}, Side::top}, {1, 2, 1, 2})};
    EXPECT_EQ(b.classify(move), DeformKind::corner_move);
    EXPECT_EQ(op_cost(b, move), 1);
    EXPECT_EQ(op_cost(b, op::Readout{0, 'X'}), 0);
    EXPECT_EQ(op_cost(b, op::Frame{PauliRotation(ops("X"), Angle::pi_over(1))}), 0);
}

TEST(Durations, RotatedPatchSwapsEdgeTypes) {
    auto r = valid(rotate_patch());
    const Patch &p = r.final_board->patch(0);
    ASSERT_EQ(p.tiles, (std::vector<Tile>{{0, 0}}));
    EXPECT_EQ(p.edges[p.edge_at({0, 0}, Side::top)].kind, EdgeKind::Z);
    EXPECT_EQ(p.edges[p.edge_at({0, 0}, Side::left)].kind, EdgeKind::X);
}

// ---------------------------------------------------------------------------
// semantics: replays of the emitted logical program

TEST(Semantics, BellPrep) {
    auto p = bell_prep();
    auto r = valid(p);
    size_t seen = 0;
    for_each_branch(LogicalState(2), r.program, [&](const Transcript &tr) {
        EXPECT_NEAR(tr.state.probability(PauliMeasurement(ops("XX")), 1), 1.0, 1e-9);
        EXPECT_NEAR(tr.state.probability(PauliMeasurement(ops("ZZ")), tr.outcomes[0]), 1.0, 1e-9);
        seen++;
    });
    EXPECT_EQ(seen, 2u);
}

TEST(Semantics, MovesAndRotationsAreIdentity) {
    for (auto p : {move_patch(1), move_patch(3), corner_move(), rotate_patch()})
        EXPECT_NEAR(worst_replay(p, [](LogicalState &, const std::vector<int> &) {}), 1.0, 1e-9) << p.name;
}

TEST(Semantics, YMeasurement) {
    auto p = y_measurement();
    double f = worst_replay(p, [](LogicalState &s, const std::vector<int> &o) { project(s, ops("Y_"), o[0]); });
    EXPECT_NEAR(f, 1.0, 1e-9);
}

TEST(Semantics, MultiPatchMeasurement) {
    auto p = multi_patch_measurement();
    EXPECT_EQ(valid(p).program.num_measurements(), 1u);
    double f = worst_replay(p, [](LogicalState &s, const std::vector<int> &o) { project(s, ops("YIXZX"), o[0]); }, 2);
    EXPECT_NEAR(f, 1.0, 1e-9);
}

TEST(Semantics, SelectivePi4) {
    double f = worst_replay(selective_pi4(true), [](LogicalState &s, const std::vector<int> &) {
        s.apply_rotation(PauliRotation(ops("Z_"), Angle::pi_over(2)));
    });
    EXPECT_NEAR(f, 1.0, 1e-9);
    double g = worst_replay(selective_pi4(false), [](LogicalState &, const std::vector<int> &) {});
    EXPECT_NEAR(g, 1.0, 1e-9);
}

TEST(Semantics, AutoCorrectedPi8) {
    for (int sign : {1, -1}) {
        double f = worst_replay(auto_corrected_pi8(sign), [sign](LogicalState &s, const std::vector<int> &) {
            s.apply_rotation(PauliRotation(ops("Z__"), Angle::pi_over(3, sign)));
        });
        EXPECT_NEAR(f, 1.0, 1e-9) << sign;
    }
}

TEST(Semantics, BellMeasurement) {
    double f = worst_replay(bell_measurement(), [](LogicalState &s, const std::vector<int> &o) {
        project(s, ops("ZZ__"), o[0]);
        project(s, ops("XX__"), o[1]);
    });
    EXPECT_NEAR(f, 1.0, 1e-9);
}

TEST(Semantics, MultiCornerMeasurement) {
    double f = worst_replay(
        multi_corner_measurement(),
        [](LogicalState &s, const std::vector<int> &o) { project(s, ops("ZYIXZIII"), o[0] * o[1] * o[2] * o[3]); },
        2);
    EXPECT_NEAR(f, 1.0, 1e-9);
}

TEST(Semantics, ShortenedEdgesAccumulateExposure) {
    auto r = valid(multi_corner_measurement(1e-3));
    // four shortened ancilla X edges for one time step
    EXPECT_NEAR(r.shortened_exposure, 4e-3, 1e-12);
    EXPECT_EQ(valid(multi_corner_measurement()).shortened_exposure, 0.0);
}

TEST(Semantics, BellLadderPairs) {
    auto p = bell_ladder(1, 3);
    auto r = valid(p);
    std::vector<PauliString> measured;
    {
        Board b = p.initial;
        for (auto &g : p.schedule.groups)
            for (auto &o : g.ops)
                if (auto *m = std::get_if<op::Measure>(&o)) measured.push_back(b.measured_operator(m->edges));
                else {
                    b.begin_group();
                    b.apply(o);
                    b.end_group();
                }
    }
    ASSERT_EQ(measured.size(), 2u);
    for (auto &P : measured) EXPECT_EQ(P.weight(), 2u);
    size_t seen = 0;
    for_each_branch(LogicalState(6), r.program, [&](const Transcript &tr) {
        for (size_t i = 0; i < measured.size(); i++)
            EXPECT_NEAR(tr.state.probability(PauliMeasurement(measured[i]), tr.outcomes[i]), 1.0, 1e-9);
        seen++;
    });
    EXPECT_EQ(seen, 4u);
}

namespace {

/// Ideal output of a distillation circuit: inputs, rotations, then the
/// stabilizer qubits found in +1 and released along with the resources.
LogicalState ideal_output(const DistillationCircuit &c, size_t reg) {
    LogicalState s(reg);
    for (size_t i = 0; i < c.qubits; i++) s.prepare(i, c.init[i]);
    for (auto &r : c.rotations) {
        PauliString P(reg);
        for (size_t i = 0; i < c.qubits; i++) P.set(i, r.axis.letter(i));
        s.apply_rotation(PauliRotation(P, r.angle));
    }
    for (size_t i = 0; i < c.stabilizers; i++) {
        s.measure(PauliMeasurement(PauliString::single(reg, i, 'X')), 1, nullptr);
        s.release(i);
    }
    return s;
}

}  // namespace

TEST(Semantics, DistillationBlocksReproduceTheCircuit) {
    for (std::string name : {"15-to-1", "7-to-1", "20-to-4"}) {
        auto c = block_circuit(name);
        auto p = distillation_block(c, name);
        auto r = valid(p);
        size_t reg = p.initial.register_size();
        LogicalState want = ideal_output(c, reg);
        Philox4x32 rng(11, 3);
        int runs = name == "20-to-4" ? 3 : 12;
        for (int t = 0; t < runs; t++) {
            auto tr = run_measurement_program(LogicalState(reg), r.program, &rng);
            // error-free runs pass every stabilizer check
            for (size_t i = tr.outcomes.size() - c.stabilizers; i < tr.outcomes.size(); i++)
                EXPECT_EQ(tr.outcomes[i], 1) << name;
            EXPECT_NEAR(LogicalState::fidelity(tr.state.amplitudes(), want.amplitudes()), 1.0, 1e-9) << name;
        }
    }
}

// ---------------------------------------------------------------------------
// space-time cost

TEST(Cost, DistillationBlocks) {
    struct Want {
        std::string name;
        size_t tiles, ticks, cost;
    };
    for (auto w : std::vector<Want>{{"7-to-1", 7, 4, 28}, {"15-to-1", 11, 11, 121}, {"20-to-4", 14, 17, 238}}) {
        auto p = distillation_block(w.name);
        auto c = space_time_cost(p.schedule, p.initial, 13);
        EXPECT_EQ(c.tiles_peak, w.tiles) << w.name;
        EXPECT_EQ(c.ticks, w.ticks) << w.name;
        EXPECT_EQ(c.st_cost_d3, w.cost) << w.name;
        EXPECT_EQ(c.data_qubits, w.tiles * 169) << w.name;
        EXPECT_EQ(c.code_cycles, w.ticks * 13) << w.name;
    }
}

TEST(Cost, GenericBlockFormula) {
    for (size_t q : {3, 4, 5, 6, 7, 9}) {
        auto g = block_geometry(q, true);
        EXPECT_EQ(size_t(g.a), (q - 1 + 1) / 2) << q;
        EXPECT_EQ(4 + q + size_t(g.a), 4 + q + (q / 2)) << q;
    }
}

TEST(Cost, ZeroTickScheduleCostsNothing) {
    Board b(1, 1, 1);
    b.place(square(0, {0, 0}, 0, 1));
    ScheduleBuilder s(b);
    s.step();
    s.readout(0, 'Z');
    auto c = space_time_cost(s.build(), b, 7);
    EXPECT_EQ(c.ticks, 0u);
    EXPECT_EQ(c.st_cost_d3, 0u);
    EXPECT_EQ(c.code_cycles, 0u);
}

TEST(Cost, InvalidScheduleHasNoCost) {
    Schedule s;
    s.groups.push_back({{op::Readout{3, 'Z'}}});
    EXPECT_THROW(space_time_cost(s, Board(1, 1, 1), 5), InvariantError);
}
