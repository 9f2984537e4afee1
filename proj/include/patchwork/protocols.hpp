#pragma once

// Named board protocols: short lattice-surgery routines and the
// distillation blocks. Each comes with its own board and a schedule that is
// checked while it is written.

#include <cmath>

#include "patchwork/board.hpp"
#include "patchwork/distill.hpp"

namespace patchwork::board {

struct Protocol {
    std::string name;
    Board initial;
    Schedule schedule;
    size_t expected_ticks = 0;
    /// Register qubits that carry the input state for replay checks.
    std::vector<size_t> data_qubits;
    std::string note;
};

inline Protocol finish(std::string name, ScheduleBuilder &b, size_t ticks, std::vector<size_t> data,
                       std::string note = "") {
    return Protocol{std::move(name), b.initial(), b.build(), ticks, std::move(data), std::move(note)};
}

namespace detail {
inline EdgeRef edge(const Board &b, int patch, Tile t, Side s) { return {patch, b.patch(patch).edge_at(t, s)}; }

inline std::vector<Tile> column(int x, int y0, int y1) {
    std::vector<Tile> v;
    for (int y = std::min(y0, y1); y <= std::max(y0, y1); y++) v.push_back({x, y});
    return v;
}
inline std::vector<Tile> row(int y, int x0, int x1) {
    std::vector<Tile> v;
    for (int x = std::min(x0, x1); x <= std::max(x0, x1); x++) v.push_back({x, y});
    return v;
}
}  // namespace detail

/// Two |+> squares and a Z(x)Z measurement: a Bell pair in 1 time step.
inline Protocol bell_prep() {
    ScheduleBuilder b(Board(2, 1, 2));
    b.step();
    b.init(square(0, {0, 0}, 0, 2, Side::top), Prep::plus());
    b.init(square(1, {1, 0}, 1, 2, Side::top), Prep::plus());
    b.measure({detail::edge(b.board(), 0, {0, 0}, Side::right), detail::edge(b.board(), 1, {1, 0}, Side::left)}, {},
              "ZZ");
    return finish("bell_prep", b, 1, {});
}

/// Move a square patch `distance` tiles to the right: grow over the free
/// corridor (1 step), then shrink into the last tile (0 steps).
inline Protocol move_patch(int distance = 1) {
    if (distance < 1) throw DimensionError("move_patch: distance must be positive");
    Board init(distance + 1, 1, 1);
    init.place(square(0, {0, 0}, 0, 1, Side::top));
    ScheduleBuilder b(init);
    b.step();
    b.deform(0, detail::row(0, 0, distance), Segment{{0, 0}, Side::top}, {distance + 1, 1, distance + 1, 1});
    b.step();
    b.deform(0, {{distance, 0}}, Segment{{distance, 0}, Side::top}, {1, 1, 1, 1});
    return finish("move", b, 1, {0});
}

/// Move two corners of a two-tile patch so each long side carries both an X
/// and a Z edge (1 step).
inline Protocol corner_move() {
    Board init(2, 1, 1);
    init.place(make_patch(0, {{0, 0}, {1, 0}}, {0}, 1, Segment{{0, 0}, Side::top}, {2, 1, 2, 1}));
    ScheduleBuilder b(init);
    b.step();
    b.deform(0, {{0, 0}, {1, 0}}, Segment{{0, 0}, Side::top}, {1, 2, 1, 2});
    return finish("corner_move", b, 1, {0});
}

/// Y measurement of a square patch: grow so an X and a Z edge sit side by
/// side (1 step), measure Z(x)Y against a two-tile |0> ancilla (1 step),
/// read the ancilla out in Z and shrink back.
inline Protocol y_measurement() {
    Board init(2, 2, 2);
    init.place(square(0, {0, 1}, 0, 2, Side::top));
    ScheduleBuilder b(init);
    b.step();
    b.deform(0, {{0, 1}, {1, 1}}, Segment{{0, 1}, Side::top}, {1, 1, 3, 1});
    b.step();
    b.init(make_patch(1, {{0, 0}, {1, 0}}, {1}, 2, Segment{{1, 0}, Side::right}, {1, 2, 1, 2}), Prep::zero());
    auto &B = b.board();
    b.measure({detail::edge(B, 1, {0, 0}, Side::bottom), detail::edge(B, 0, {0, 1}, Side::top),
               detail::edge(B, 0, {1, 1}, Side::top)},
              {}, "Za.Yq");
    b.step();
    b.readout(1, 'Z');
    b.deform(0, {{0, 1}}, Segment{{0, 1}, Side::top}, {1, 1, 1, 1});
    return finish("y_measurement", b, 2, {0});
}

/// Y(x)X(x)Z(x)X on q1, q3, q4, q5 through one ancilla row (1 step); q2
/// sits next to the ancilla but is not measured.
inline Protocol multi_patch_measurement() {
    const size_t n = 5;
    Board init(5, 3, n);
    init.place(make_patch(0, {{0, 0}, {1, 0}}, {0}, n, Segment{{1, 0}, Side::bottom}, {1, 1, 3, 1}));
    init.place(square(1, {2, 0}, 1, n, Side::top));
    init.place(square(2, {3, 0}, 2, n, Side::top));
    init.place(square(3, {4, 0}, 3, n, Side::left));
    init.place(square(4, {4, 2}, 4, n, Side::top));
    ScheduleBuilder b(init);
    auto &B = b.board();
    b.step();
    b.measure({detail::edge(B, 0, {0, 0}, Side::bottom), detail::edge(B, 0, {1, 0}, Side::bottom),
               detail::edge(B, 2, {3, 0}, Side::bottom), detail::edge(B, 3, {4, 0}, Side::bottom),
               detail::edge(B, 4, {4, 2}, Side::top)},
              detail::row(1, 0, 4), "YIXZX");
    return finish("multi_patch_measurement", b, 1, {0, 1, 2, 3, 4});
}

/// Rotate a square patch in place using one free neighbour tile: grow,
/// move corners, shrink into the neighbour, grow back, shrink (3 steps).
/// Afterwards the edge types are swapped.
inline Protocol rotate_patch() {
    Board init(2, 1, 1);
    init.place(square(0, {0, 0}, 0, 1, Side::top));
    ScheduleBuilder b(init);
    std::vector<Tile> both{{0, 0}, {1, 0}};
    b.step();
    b.deform(0, both, Segment{{0, 0}, Side::top}, {2, 1, 2, 1});
    b.step();
    b.deform(0, both, Segment{{1, 0}, Side::right}, {1, 1, 3, 1});
    b.step();
    b.deform(0, {{1, 0}}, Segment{{1, 0}, Side::right}, {1, 1, 1, 1});
    b.step();
    b.deform(0, both, Segment{{1, 0}, Side::right}, {1, 2, 1, 2});
    b.step();
    b.deform(0, {{0, 0}}, Segment{{0, 0}, Side::right}, {1, 1, 1, 1});
    return finish("rotate_patch", b, 3, {0});
}

/// Selective P_{pi/4} on a square data patch (P = Z): measure Z(x)Y against
/// a |0> square through an L-shaped ancilla (1 step), then read the |0> out
/// in X (rotation) or Z (identity).
inline Protocol selective_pi4(bool perform) {
    const size_t n = 2;
    Board init(3, 2, n);
    init.place(square(0, {0, 1}, 0, n, Side::right));
    ScheduleBuilder b(init);
    auto &B = b.board();
    b.step();
    b.init(square(1, {1, 1}, 1, n, Side::top), Prep::zero());
    size_t s1 = b.measure({detail::edge(B, 0, {0, 1}, Side::top), detail::edge(B, 1, {1, 1}, Side::top),
                           detail::edge(B, 1, {1, 1}, Side::right)},
                          {{0, 0}, {1, 0}, {2, 0}, {2, 1}}, "P.Ya");
    b.step();
    size_t s2 = b.readout(1, perform ? 'X' : 'Z');
    PauliString P = PauliString::single(n, 0, 'Z');
    // the board measures +P(x)Y; the -P(x)Y outcome is its negative
    Condition fix = perform ? Condition::parity({s1, s2}, 1) : Condition::outcome(s2, -1);
    b.frame(PauliRotation(P, Angle::pi_over(1)), fix, "pauli correction");
    return finish(perform ? "selective_pi4" : "selective_identity", b, 1, {0});
}

namespace detail {

/// The |m>-|c> corner for an auto-corrected rotation: c on (x, y..y+1),
/// m on (x+1, y..y+1). m's left side faces c's X and Z edges; the right
/// side of m's lower tile is a Z edge for the ancilla region.
struct MagicCorner {
    int x = 0, y = 0;
    size_t m = 0, c = 0;  // register qubits
};

inline Patch magic_patch(int id, const MagicCorner &k, size_t reg) {
    return make_patch(id, {{k.x + 1, k.y}, {k.x + 1, k.y + 1}}, {k.m}, reg, Segment{{k.x + 1, k.y}, Side::top},
                      {2, 1, 1, 2});
}
inline Patch correction_patch(int id, const MagicCorner &k, size_t reg) {
    return make_patch(id, {{k.x, k.y}, {k.x, k.y + 1}}, {k.c}, reg, Segment{{k.x, k.y}, Side::right}, {1, 2, 1, 2});
}

/// Timed part of an auto-corrected P_{sign pi/8}: inject |m>, |0>, measure
/// P(x)Z_m through `ancilla` and Z_m(x)Y_c directly. Returns the patch ids
/// and the two outcome slots.
struct AutoCorrected {
    int m_id = -1, c_id = -1;
    size_t pz = 0, zy = 0;
    PauliString P;
    int sign = 1;
};

inline AutoCorrected auto_corrected_measure(ScheduleBuilder &b, const MagicCorner &k, std::vector<EdgeRef> data_edges,
                                            std::vector<Tile> ancilla, int sign, Prep magic = Prep::magic()) {
    size_t reg = b.board().register_size();
    AutoCorrected a;
    a.sign = sign;
    a.m_id = b.fresh_id();
    a.c_id = b.fresh_id();
    b.init(magic_patch(a.m_id, k, reg), magic);
    b.init(correction_patch(a.c_id, k, reg), Prep::zero());
    auto &B = b.board();
    a.P = B.measured_operator(data_edges);
    data_edges.push_back(edge(B, a.m_id, {k.x + 1, k.y + 1}, Side::right));
    a.pz = b.measure(data_edges, std::move(ancilla), "P.Zm");
    a.zy = b.measure({edge(B, a.m_id, {k.x + 1, k.y}, Side::left), edge(B, a.c_id, {k.x, k.y}, Side::right),
                      edge(B, a.c_id, {k.x, k.y + 1}, Side::right)},
                     {}, "Zm.Yc");
    return a;
}

/// Untimed part: X on m, then c in X (apply the pi/4 fix) or Z (skip it),
/// and the Pauli correction.
inline void auto_corrected_readout(ScheduleBuilder &b, const AutoCorrected &a) {
    size_t xm = b.readout(a.m_id, 'X');
    int x_value = a.sign > 0 ? -1 : 1;
    Condition use_x = Condition::outcome(a.pz, x_value);
    Condition use_z = Condition::outcome(a.pz, -x_value);
    size_t rc = b.readout(a.c_id, 'Z', 'X', use_x);
    Condition fix = (use_z && Condition::parity({xm, rc}, -1)) || (use_x && Condition::parity({a.zy, xm, rc}, -1));
    b.frame(PauliRotation(a.P, Angle::pi_over(1)), fix, "pauli correction");
}

}  // namespace detail

/// Auto-corrected Z_{pi/8} on one data square (1 step).
inline Protocol auto_corrected_pi8(int sign = 1) {
    const size_t n = 3;
    Board init(3, 2, n);
    init.place(square(0, {2, 0}, 0, n, Side::right));
    ScheduleBuilder b(init);
    b.step();
    detail::MagicCorner k{0, 0, 1, 2};
    auto a = detail::auto_corrected_measure(b, k, {detail::edge(b.board(), 0, {2, 0}, Side::bottom)}, {{2, 1}}, sign);
    b.step();
    detail::auto_corrected_readout(b, a);
    return finish(sign > 0 ? "auto_corrected_pi8" : "auto_corrected_minus_pi8", b, 1, {0});
}

/// Bell-basis measurement of the two qubits of a two-qubit patch in a row
/// of data patches: Z(x)Z, then X(x)X, both routed around the row through
/// the single ancilla column on the right (2 steps).
inline Protocol bell_measurement() {
    const size_t n = 4;
    Board init(5, 3, n);
    init.place(square(0, {0, 1}, 2, n, Side::top));
    init.place(make_patch(1, {{1, 1}, {2, 1}}, {0, 1}, n, Segment{{1, 1}, Side::top}, {1, 1, 1, 1, 1, 1}));
    init.place(square(2, {3, 1}, 3, n, Side::top));
    ScheduleBuilder b(init);
    auto &B = b.board();
    auto around = [](int x0) {
        std::vector<Tile> r = detail::row(0, x0, 4);
        r.push_back({4, 1});
        for (auto &t : detail::row(2, x0, 4)) r.push_back(t);
        return r;
    };
    b.step();
    b.measure({detail::edge(B, 1, {2, 1}, Side::top), detail::edge(B, 1, {2, 1}, Side::bottom)}, around(2), "ZZ");
    b.step();
    b.measure({detail::edge(B, 1, {1, 1}, Side::top), detail::edge(B, 1, {1, 1}, Side::bottom)}, around(1), "XX");
    return finish("bell_measurement", b, 2, {0, 1, 2, 3});
}

/// Register index of qubit `which` (0 or 1) of the patch in unit u, row r,
/// column j of a Bell ladder.
inline size_t ladder_qubit(size_t k, size_t u, size_t r, size_t j, size_t which) {
    return ((u * k + r) * k + j) * 2 + which;
}

/// Bell pairs between vertically stacked units of k x k two-qubit patches.
/// Patches are two tiles tall with corridors between columns; qubit a's Z
/// edge faces the right corridor, qubit b's the left one. Every pair is one
/// Z(x)Z measurement along a corridor. Within a unit a corridor carries one
/// pair towards the unit above and one towards the unit below, which must
/// not overlap; alternating row orders for even and odd units fit all pairs
/// in k + 1 steps once a unit has neighbours on both sides.
inline Protocol bell_ladder(size_t k, size_t units = 3) {
    if (k < 1 || units < 2) throw DimensionError("bell_ladder needs k >= 1 and at least two units");
    const size_t reg = units * k * k * 2;
    const int K = int(k), H = 2 * K;
    Board init(2 * K + 1, H * int(units), reg);
    ScheduleBuilder b(init);
    auto pid = [&](size_t u, size_t r, size_t j) { return int((u * k + r) * k + j); };
    auto lower = [&](size_t u, size_t r, size_t j) { return Tile{2 * int(j) + 1, H * int(u) + 2 * int(r) + 1}; };
    // even units: a faces down (right corridor), b faces up (left corridor); odd units the reverse
    auto up_qubit_right = [](size_t u) { return u % 2 == 1; };
    b.step();
    for (size_t u = 0; u < units; u++)
        for (size_t r = 0; r < k; r++)
            for (size_t j = 0; j < k; j++) {
                Tile lo = lower(u, r, j);
                b.init(make_patch(pid(u, r, j), {{lo.x, lo.y - 1}, lo},
                                  {ladder_qubit(k, u, r, j, 0), ladder_qubit(k, u, r, j, 1)}, reg,
                                  Segment{{lo.x, lo.y - 1}, Side::right}, {1, 1, 1, 1, 1, 1}),
                       Prep::plus());
            }
    // rows used at tick t: up(u, t) in unit u towards u-1, down(u, t) towards u+1
    auto up_row = [&](size_t u, size_t t) -> std::optional<size_t> {
        if (u % 2 == 0) return t < k ? std::optional<size_t>(k - 1 - t) : std::nullopt;
        if (t == 0) return std::nullopt;
        return t < k ? t - 1 : k - 1;
    };
    auto down_row = [&](size_t u, size_t t) -> std::optional<size_t> {
        if (u % 2 == 0) return t >= 1 ? std::optional<size_t>(k - t) : std::nullopt;
        return t < k ? std::optional<size_t>(t) : std::nullopt;
    };
    for (size_t t = 0; t <= k; t++) {
        if (t > 0) b.step();
        for (size_t u = 1; u < units; u++) {
            auto r_lo = up_row(u, t), r_hi = down_row(u - 1, t);
            if (!r_lo || !r_hi) continue;
            for (size_t j = 0; j < k; j++) {
                bool right = up_qubit_right(u);
                Tile lo = lower(u, *r_lo, j), hi = lower(u - 1, *r_hi, j);
                Side s = right ? Side::right : Side::left;
                int cx = right ? lo.x + 1 : lo.x - 1;
                auto &B = b.board();
                b.measure({detail::edge(B, pid(u, *r_lo, j), lo, s), detail::edge(B, pid(u - 1, *r_hi, j), hi, s)},
                          detail::column(cx, hi.y, lo.y), "ZZ");
            }
        }
    }
    // with only two units the first step holds no pair
    return finish("bell_ladder", b, units >= 3 ? k + 1 : k, {});
}

/// Z(x)Y(x)1(x)X(x)Z on q1..q4 and m with an 8-corner |+>^3 ancilla patch:
/// four two-patch measurements in one step, each against one of the
/// ancilla's Z edges, then X readout of the ancilla with Pauli fixes. The
/// ancilla's X edges are shortened.
inline Protocol multi_corner_measurement(double p_err = 0) {
    const size_t n = 8;  // q1 q2 q3 q4 m a1 a2 a3
    Board init(4, 3, n);
    init.place(square(0, {0, 0}, 0, n, Side::right));
    init.place(make_patch(1, {{2, 0}, {3, 0}}, {1}, n, Segment{{3, 0}, Side::bottom}, {1, 1, 3, 1}));
    init.place(square(2, {1, 0}, 2, n, Side::top));
    init.place(square(3, {0, 2}, 3, n, Side::top));
    init.place(square(4, {3, 2}, 4, n, Side::right));
    ScheduleBuilder b(init);
    b.step();
    Patch anc = make_patch(5, detail::row(1, 0, 3), {5, 6, 7}, n, Segment{{0, 1}, Side::left}, {1, 1, 1, 2, 1, 1, 1, 2});
    for (auto &e : anc.edges)
        if (e.kind == EdgeKind::X) e.shortened = true, e.p_err = p_err;
    b.init(anc, Prep::plus());
    auto &B = b.board();
    using detail::edge;
    std::vector<size_t> s;
    s.push_back(b.measure({edge(B, 0, {0, 0}, Side::bottom), edge(B, 5, {0, 1}, Side::top)}, {}, "Zq1.Z1"));
    s.push_back(b.measure({edge(B, 1, {2, 0}, Side::bottom), edge(B, 1, {3, 0}, Side::bottom),
                           edge(B, 5, {2, 1}, Side::top)},
                          {}, "Yq2.Z2"));
    s.push_back(b.measure({edge(B, 4, {3, 2}, Side::top), edge(B, 5, {3, 1}, Side::bottom)}, {}, "Zm.Z3"));
    s.push_back(b.measure({edge(B, 3, {0, 2}, Side::top), edge(B, 5, {0, 1}, Side::bottom)}, {}, "Xq4.Z123"));
    b.step();
    size_t x = b.readout(5, 'X');
    const char *fix[] = {"ZIIII", "IYIII", "IIIIZ"};
    for (size_t i = 0; i < 3; i++) {
        PauliString P = PauliString::from_str(std::string(fix[i]) + "III");
        b.frame(PauliRotation(P, Angle::pi_over(1)), Condition::outcome(x + i, -1), "pauli correction");
    }
    Protocol pr = finish("multi_corner_measurement", b, 1, {0, 1, 2, 3, 4});
    pr.note = "outcome = product of slots 0..3";
    return pr;
}

// ---------------------------------------------------------------------------
// Distillation blocks

/// Geometry of a block for q data qubits: a row of a = ceil((q-1)/2)
/// ancilla tiles, data squares above and below it plus one at its far end,
/// and a 2x2 |m>-|c> corner (or one |Y> tile) at the near end.
struct BlockGeometry {
    int a = 0;
    int width = 0, height = 3;
    std::vector<Tile> data_tiles;
    std::vector<Side> data_z_side;  // side of each data square facing the ancilla
    int ancilla_x0 = 0;
};

inline BlockGeometry block_geometry(size_t q, bool magic_corner) {
    BlockGeometry g;
    g.a = std::max(1, int(q / 2));  // ceil((q - 1) / 2)
    g.ancilla_x0 = magic_corner ? 2 : 1;
    g.width = g.ancilla_x0 + g.a + 1;
    for (int i = 0; i < g.a && g.data_tiles.size() < q; i++) {
        g.data_tiles.push_back({g.ancilla_x0 + i, 0});
        g.data_z_side.push_back(Side::bottom);
    }
    for (int i = 0; i < g.a && g.data_tiles.size() < q; i++) {
        g.data_tiles.push_back({g.ancilla_x0 + i, 2});
        g.data_z_side.push_back(Side::top);
    }
    if (g.data_tiles.size() < q) {
        g.data_tiles.push_back({g.ancilla_x0 + g.a, 1});
        g.data_z_side.push_back(Side::left);
    }
    if (g.data_tiles.size() != q) throw InvariantError("block geometry does not hold every data qubit");
    return g;
}

/// Emits the block schedule for a distillation circuit without residual
/// corrections: one step per rotation (auto-corrected pi/8 rotations, or
/// |Y> consumption for pi/4 rotations), then X readout of the stabilizer
/// qubits. Register: data qubits 0..q-1, then the resource qubits.
inline Protocol distillation_block(const DistillationCircuit &c, std::string name) {
    if (!c.correction.empty()) throw InvariantError("fold the Clifford correction before scheduling the block");
    size_t q = c.qubits;
    bool pi8 = c.level == 3;
    BlockGeometry g = block_geometry(q, pi8);
    size_t reg = q + (pi8 ? 2 : 1);
    ScheduleBuilder b(Board(g.width, g.height, reg));
    std::vector<Tile> anc = detail::row(1, g.ancilla_x0, g.ancilla_x0 + g.a - 1);
    b.step();
    for (size_t i = 0; i < q; i++) {
        Side z = g.data_z_side[i];
        Side x_side = (z == Side::top || z == Side::bottom) ? Side::left : Side::top;
        b.init(square(int(i), g.data_tiles[i], i, reg, x_side), c.init[i]);
    }
    for (size_t r = 0; r < c.rotations.size(); r++) {
        if (r > 0) b.step();
        const auto &rot = c.rotations[r];
        std::vector<EdgeRef> edges;
        for (size_t i = 0; i < q; i++) {
            char l = rot.axis.letter(i);
            if (l == 'I') continue;
            if (l != 'Z') throw InvariantError("distillation rotations must be Z-type");
            edges.push_back(detail::edge(b.board(), int(i), g.data_tiles[i], g.data_z_side[i]));
        }
        int sign = rot.angle.numerator() > 0 ? 1 : -1;
        if (pi8) {
            if (!(rot.angle == Angle::pi_over(3, sign))) throw InvariantError("expected pi/8 rotations");
            auto a = detail::auto_corrected_measure(b, detail::MagicCorner{0, 0, q, q + 1}, edges, anc, sign);
            b.step();
            detail::auto_corrected_readout(b, a);
        } else {
            if (!(rot.angle == Angle::pi_over(2, sign))) throw InvariantError("expected pi/4 rotations");
            // |Y> (or its conjugate) on the square left of the ancilla row
            int id = b.fresh_id();
            b.init(square(id, {0, 1}, q, reg, Side::top), Prep::y());
            PauliString P = b.board().measured_operator(edges);
            edges.push_back(detail::edge(b.board(), id, {0, 1}, Side::right));
            size_t s1 = b.measure(edges, anc, "P.Zy");
            b.step();
            size_t s2 = b.readout(id, 'X');
            // |Y> gives P_{pi/4} when the outcomes agree and P_{-pi/4} otherwise
            b.frame(PauliRotation(P, Angle::pi_over(1)), Condition::parity({s1, s2}, sign > 0 ? -1 : 1),
                    "pauli correction");
        }
    }
    for (size_t i = 0; i < c.stabilizers; i++) b.readout(int(i), 'X');
    std::vector<size_t> data(q);
    for (size_t i = 0; i < q; i++) data[i] = i;
    return finish(std::move(name), b, c.rotations.size(), data);
}

/// The tabulated blocks, built from the bundled matrices.
inline DistillationCircuit block_circuit(const std::string &name) {
    if (name == "15-to-1") return extract_circuit(load_matrix(data_path("matrices/m15.txt")));
    if (name == "20-to-4") {
        BinMatrix M = load_matrix(data_path("matrices/m20.txt"));
        BinMatrix seed = load_matrix(data_path("matrices/m20_correction.txt"));
        auto corr = find_correction(M, seed);
        if (!corr.pairs) throw InvariantError("no Clifford correction for 20-to-4");
        return fold_correction(extract_circuit(M, 3, *corr.pairs));
    }
    if (name == "7-to-1") return extract_circuit(load_matrix(data_path("matrices/steane7.txt")), 2);
    throw InvariantError("no block schedule for '" + name + "'");
}

inline Protocol distillation_block(const std::string &name) { return distillation_block(block_circuit(name), name); }

inline std::vector<std::string> protocol_names() {
    return {"bell_prep",          "move",          "corner_move",        "y_measurement",
            "multi_patch_measurement", "rotate_patch", "selective_pi4", "selective_identity",
            "auto_corrected_pi8", "bell_measurement", "bell_ladder",     "multi_corner_measurement",
            "15-to-1",            "20-to-4",       "7-to-1"};
}

/// Look a protocol up by name; `arg` is the distance for "move" and k for
/// "bell_ladder".
inline Protocol run_protocol(const std::string &name, int arg = 0) {
    if (name == "bell_prep") return bell_prep();
    if (name == "move") return move_patch(arg > 0 ? arg : 1);
    if (name == "corner_move") return corner_move();
    if (name == "y_measurement") return y_measurement();
    if (name == "multi_patch_measurement") return multi_patch_measurement();
    if (name == "rotate_patch") return rotate_patch();
    if (name == "selective_pi4") return selective_pi4(true);
    if (name == "selective_identity") return selective_pi4(false);
    if (name == "auto_corrected_pi8") return auto_corrected_pi8(1);
    if (name == "bell_measurement") return bell_measurement();
    if (name == "bell_ladder") return bell_ladder(arg > 0 ? size_t(arg) : 3);
    if (name == "multi_corner_measurement") return multi_corner_measurement();
    if (name == "15-to-1" || name == "20-to-4" || name == "7-to-1") return distillation_block(name);
    throw InvariantError("unknown protocol '" + name + "'");
}

}  // namespace patchwork::board
