#pragma once

// Data blocks: compact, intermediate and fast layouts, and schedules that
// consume one magic state for a Pauli-product pi/8 rotation.

#include <cmath>

#include "patchwork/board.hpp"
#include "patchwork/protocols.hpp"

namespace patchwork::blocks {

using board::Board;
using board::EdgeRef;
using board::Patch;
using board::ScheduleBuilder;
using board::Segment;
using board::Side;
using board::Tile;

enum class BlockKind { compact, intermediate, fast };

inline std::string kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::compact: return "compact";
        case BlockKind::intermediate: return "intermediate";
        case BlockKind::fast: return "fast";
    }
    return "?";
}

inline BlockKind parse_kind(const std::string &s) {
    if (s == "compact") return BlockKind::compact;
    if (s == "intermediate") return BlockKind::intermediate;
    if (s == "fast") return BlockKind::fast;
    throw ParseError("unknown block kind '" + s + "'");
}

/// Closed-form tile counts. The fast block's count comes from its concrete
/// footprint, which equals 2n + sqrt(8n) + 1 whenever n / 2 is a square.
inline size_t fast_lines(size_t n, size_t *per_line = nullptr, size_t *last = nullptr);

inline size_t tile_formula(BlockKind k, size_t n) {
    if (n < 1) throw DimensionError("a data block holds at least one qubit");
    switch (k) {
        case BlockKind::compact: return (3 * n + 1) / 2 + 3;
        case BlockKind::intermediate: return 2 * n + 4;
        case BlockKind::fast: {
            size_t C = 0, r = 0, L = fast_lines(n, &C, &r);
            return (2 * C + 1) * (2 * L - 1) + 2 * (2 * r + 1);
        }
    }
    return 0;
}

inline size_t worst_case_ticks(BlockKind k) {
    switch (k) {
        case BlockKind::compact: return 9;
        case BlockKind::intermediate: return 5;
        case BlockKind::fast: return 1;
    }
    return 0;
}

/// Patches per line and line count of a fast block: round(sqrt(n/2))
/// two-qubit patches per line, the last line holding the remainder.
inline size_t fast_lines(size_t n, size_t *per_line, size_t *last) {
    size_t P = (n + 1) / 2;
    size_t C = std::max<size_t>(1, size_t(std::llround(std::sqrt(double(n) / 2))));
    C = std::min(C, P);
    size_t L = (P + C - 1) / C;
    if (per_line) *per_line = C;
    if (last) *last = P - (L - 1) * C;
    return L;
}

/// Where things sit on a block's board. Data qubit i is register qubit i;
/// the |Y> resource is qubit n and the magic state qubit n + 1.
struct DataBlockSpec {
    BlockKind kind = BlockKind::compact;
    size_t n = 0;
    size_t tiles = 0;
    size_t worst_ticks = 0;
    int width = 0, height = 0;      // board, including a port outside the block
    std::vector<Tile> footprint;    // tiles of the block itself
    std::vector<Tile> data_tiles;   // tile of each data patch (first tile for fast)
    size_t register_size() const { return n + 2; }
    size_t y_qubit() const { return n; }
    size_t magic_qubit() const { return n + 1; }
};

/// Mutable layout state between consumptions: which operator each square
/// patch shows to the ancilla region, and (intermediate) which row holds
/// the data.
struct BlockState {
    std::vector<char> facing;  // 'X' or 'Z'
    int data_row = 1;
};

inline DataBlockSpec layout(BlockKind kind, size_t n) {
    if (n < 1) throw DimensionError("layout: n must be at least 1");
    DataBlockSpec s;
    s.kind = kind;
    s.n = n;
    s.worst_ticks = worst_case_ticks(kind);
    std::set<Tile> foot;
    if (kind == BlockKind::compact) {
        // top row, ancilla row, bottom row; the row end with the |Y> slot
        // above it and the magic landing tile below it
        size_t c = (n + 1) / 2;
        s.width = int(c) + 1;
        s.height = 3;
        for (size_t i = 0; i < n; i++)
            s.data_tiles.push_back(i < c ? Tile{int(i), 0} : Tile{int(i - c), 2});
        for (int x = 0; x <= int(c); x++) foot.insert({x, 1});
        foot.insert({int(c), 0});
        foot.insert({int(c), 2});
    } else if (kind == BlockKind::intermediate) {
        // two rows that swap roles; two extra columns for the |Y> slot and
        // the magic landing tile
        s.width = int(n) + 2;
        s.height = 2;
        for (size_t i = 0; i < n; i++) s.data_tiles.push_back({int(i), 1});
        for (int x = 0; x < s.width; x++) foot.insert({x, 0}), foot.insert({x, 1});
    } else {
        // ancilla rows between lines of two-qubit patches, a corridor in
        // column 0; the magic port is just right of the top ancilla row
        size_t C = 0, r = 0, L = fast_lines(n, &C, &r);
        int W = int(2 * C + 1);
        s.width = W + 1;
        s.height = int(2 * L + 1);
        for (size_t q = 0; q < n; q += 2) {
            size_t k = q / 2, line = k / C, col = k % C;
            s.data_tiles.push_back({int(1 + 2 * col), int(2 * line + 1)});
        }
        for (size_t l = 0; l <= L; l++) {
            int w = l < L ? W : int(2 * r + 1);
            for (int x = 0; x < w; x++) foot.insert({x, int(2 * l)});
        }
        for (size_t l = 0; l < L; l++) {
            size_t cnt = l + 1 < L ? C : r;
            foot.insert({0, int(2 * l + 1)});
            for (size_t x = 1; x <= 2 * cnt; x++) foot.insert({int(x), int(2 * l + 1)});
        }
    }
    for (auto &t : s.data_tiles) foot.insert(t);
    s.footprint.assign(foot.begin(), foot.end());
    s.tiles = s.footprint.size();
    return s;
}

namespace detail {

inline Side facing_side(const DataBlockSpec &s, size_t q, const BlockState &st) {
    if (s.kind == BlockKind::compact) return q < (s.n + 1) / 2 ? Side::bottom : Side::top;
    return st.data_row == 1 ? Side::top : Side::bottom;
}

/// A square whose side `s` carries the operator `letter`.
inline Patch facing_square(int id, Tile t, size_t qubit, size_t reg, Side s, char letter) {
    return board::square(id, t, qubit, reg, letter == 'X' ? s : board::rotate_side(s, 1));
}

inline Tile data_tile(const DataBlockSpec &s, size_t q, const BlockState &st) {
    if (s.kind == BlockKind::intermediate) return {int(q), st.data_row};
    return s.data_tiles[q];
}

/// Ancilla region and resource slots for the current state.
struct Ports {
    std::vector<Tile> region;
    Tile y_slot{-1, -1}, magic{-1, -1};
    Side y_side = Side::top, magic_side = Side::left;  // side facing the region
};

inline Ports ports(const DataBlockSpec &s, const BlockState &st) {
    Ports p;
    if (s.kind == BlockKind::compact) {
        int c = s.width - 1;
        for (int x = 0; x <= c; x++) p.region.push_back({x, 1});
        p.y_slot = {c, 0};
        p.y_side = Side::bottom;
        p.magic = {c, 2};
        p.magic_side = Side::top;
    } else if (s.kind == BlockKind::intermediate) {
        int ra = 1 - st.data_row, n = int(s.n);
        for (int x = 0; x <= n; x++) p.region.push_back({x, ra});
        p.y_slot = {n, st.data_row};
        p.y_side = ra == 0 ? Side::top : Side::bottom;
        p.magic = {n + 1, ra};
        p.magic_side = Side::left;
    } else {
        std::set<Tile> data;
        for (auto &t : s.data_tiles) data.insert(t), data.insert({t.x + 1, t.y});
        for (auto &t : s.footprint)
            if (!data.count(t)) p.region.push_back(t);
        p.magic = {s.width - 1, 0};
        p.magic_side = Side::left;
    }
    return p;
}

/// Initial board with every data patch in place.
inline Board initial_board(const DataBlockSpec &s, const BlockState &st) {
    Board b(s.width, s.height, s.register_size());
    if (s.kind == BlockKind::fast) {
        for (size_t k = 0; k < s.data_tiles.size(); k++) {
            Tile t = s.data_tiles[k];
            std::vector<Tile> tiles{t, {t.x + 1, t.y}};
            if (2 * k + 1 < s.n)
                b.place(board::make_patch(int(k), tiles, {2 * k, 2 * k + 1}, b.register_size(), Segment{t, Side::top},
                                          {1, 1, 1, 1, 1, 1}));
            else  // a lone qubit shows X and Z on its top side
                b.place(board::make_patch(int(k), tiles, {2 * k}, b.register_size(), Segment{t, Side::top},
                                          {1, 1, 3, 1}));
        }
        return b;
    }
    for (size_t q = 0; q < s.n; q++)
        b.place(facing_square(int(q), data_tile(s, q, st), q, b.register_size(), facing_side(s, q, st), st.facing[q]));
    return b;
}

/// Edges that expose `letter` of data qubit q.
inline std::vector<EdgeRef> qubit_edges(const DataBlockSpec &s, const Board &b, size_t q, char letter,
                                        const BlockState &st) {
    if (s.kind == BlockKind::fast) {
        // first qubit (and a lone one) on the top side, second on the
        // bottom; X on the left tile, Z on the right one
        int id = int(q / 2);
        Tile xt = s.data_tiles[q / 2], zt{xt.x + 1, xt.y};
        Side side = q % 2 == 0 ? Side::top : Side::bottom;
        std::vector<EdgeRef> e;
        if (letter == 'X' || letter == 'Y') e.push_back({id, b.patch(id).edge_at(xt, side)});
        if (letter == 'Z' || letter == 'Y') e.push_back({id, b.patch(id).edge_at(zt, side)});
        return e;
    }
    Tile t = data_tile(s, q, st);
    Side side = facing_side(s, q, st);
    size_t e = b.patch(int(q)).edge_at(t, side);
    char have = b.patch(int(q)).edges[e].kind == board::EdgeKind::X ? 'X' : 'Z';
    if (have != letter)
        throw InvariantError("qubit " + std::to_string(q) + " shows " + have + ", the plan needs " + letter);
    return {{int(q), e}};
}

}  // namespace detail

struct ConsumptionPlan {
    PauliString axis;
    int sign = 1;
    /// Explicit pi/4 rotations before the consumption; their inverses go to
    /// the Clifford frame afterwards.
    std::vector<PauliString> pre_rotations;
    /// Y-free product consumed by the magic state, and the pi/8 sign that
    /// realizes the requested rotation.
    PauliString measured;
    int measured_sign = 1;
    size_t patch_rotations = 0;  // patches whose X/Z side was swapped
    size_t ticks = 0;
    BlockState after;
    board::Protocol protocol;
};

/// Pi/4 rotation axes that clear the Y letters of `P`, given the letter
/// each qubit shows: one rotation for an odd count, two for an even one.
inline std::vector<PauliString> y_elimination(const PauliString &P, const std::vector<char> &facing) {
    std::vector<size_t> ys;
    for (size_t i = 0; i < P.num_qubits(); i++)
        if (P.letter(i) == 'Y') ys.push_back(i);
    if (ys.empty()) return {};
    auto on = [&](const std::vector<size_t> &idx) {
        PauliString A(P.num_qubits());
        for (size_t i : idx) A.set(i, facing[i]);
        return A;
    };
    if (ys.size() % 2 == 1) return {on(ys)};
    return {on({ys[0]}), on(std::vector<size_t>(ys.begin() + 1, ys.end()))};
}

/// The product left after conjugating by the pi/4 rotations: R P R^dag =
/// iPA for A anticommuting with P.
inline PauliString conjugated(PauliString P, const std::vector<PauliString> &pre) {
    for (auto &A : pre) {
        if (P.commutes(A)) throw InvariantError("pre-rotation commutes with the axis");
        P = (P * A).times_i();
    }
    return P;
}

namespace detail {

inline void square_moves(ScheduleBuilder &b, const std::vector<std::pair<int, Tile>> &flip,
                         const std::vector<std::pair<int, Tile>> &plain) {
    // grow every patch into its target tile, flip corners on those that
    // swap, shrink the plain movers at once and the flipped ones after
    b.step();
    for (auto *list : {&flip, &plain})
        for (auto &[id, t] : *list) {
            const Patch &p = b.board().patch(id);
            std::vector<Tile> tiles{p.tiles[0], t};
            b.deform(id, tiles, board::grow_square_corners(p, t));
        }
    b.step();
    for (auto &[id, t] : flip) {
        const Patch &p = b.board().patch(id);
        b.deform(id, p.tiles, board::flip_corners(p, t));
    }
    for (auto &[id, t] : plain) b.deform(id, {t}, board::shrink_corners(b.board().patch(id), {t}));
    if (flip.empty()) return;
    b.step();
    for (auto &[id, t] : flip) b.deform(id, {t}, board::shrink_corners(b.board().patch(id), {t}));
}

/// Swap the X and Z sides of square patches in place using the free
/// neighbour tile of each (3 steps).
inline void rotate_in_place(ScheduleBuilder &b, const std::vector<std::pair<int, Tile>> &items) {
    if (items.empty()) return;
    std::vector<std::pair<int, Tile>> home;
    for (auto &[id, t] : items) home.push_back({id, b.board().patch(id).tiles[0]});
    square_moves(b, items, {});
    square_moves(b, {}, home);
}

/// Measure D (x) Z_m with a fresh |m> and fix the result into
/// D_{sign pi/8}: Clifford when the product outcome has the wrong sign, a
/// Pauli when X_m = -1.
inline PauliString consume_magic(ScheduleBuilder &b, std::vector<EdgeRef> data, const std::vector<Tile> &region,
                                 Tile m_tile, Side m_side, size_t m_qubit, int sign) {
    auto &B = b.board();
    PauliString D = B.measured_operator(data);
    int id = b.fresh_id();
    b.step();
    b.init(detail::facing_square(id, m_tile, m_qubit, B.register_size(), m_side, 'Z'), Prep::magic());
    data.push_back({id, B.patch(id).edge_at(m_tile, m_side)});
    size_t s1 = b.measure(std::move(data), region, "P.Zm");
    b.step();
    size_t s2 = b.readout(id, 'X');
    b.frame(PauliRotation(D, Angle::pi_over(2, sign)), Condition::outcome(s1, -sign), "clifford correction");
    b.frame(PauliRotation(D, Angle::pi_over(1)), Condition::outcome(s2, -1), "pauli correction");
    return D;
}

/// Explicit A_{pi/4} by consuming |Y> through the region.
inline void consume_y(ScheduleBuilder &b, std::vector<EdgeRef> data, const std::vector<Tile> &region, Tile y_tile,
                      Side y_side, size_t y_qubit, int sign) {
    auto &B = b.board();
    PauliString A = B.measured_operator(data);
    int id = b.fresh_id();
    b.step();
    b.init(detail::facing_square(id, y_tile, y_qubit, B.register_size(), y_side, 'Z'), Prep::y());
    data.push_back({id, B.patch(id).edge_at(y_tile, y_side)});
    size_t s1 = b.measure(std::move(data), region, "A.Zy");
    b.step();
    size_t s2 = b.readout(id, 'X');
    b.frame(PauliRotation(A, Angle::pi_over(1)), Condition::parity({s1, s2}, sign > 0 ? -1 : 1), "pauli correction");
}

}  // namespace detail

inline std::vector<size_t> data_range(size_t n) {
    std::vector<size_t> v(n);
    for (size_t q = 0; q < n; q++) v[q] = q;
    return v;
}

inline BlockState initial_state(const DataBlockSpec &s) {
    BlockState st;
    st.facing.assign(s.n, 'Z');
    st.data_row = 1;
    return st;
}

/// Schedule for one P_{sign pi/8} on the block, starting from `state`.
inline ConsumptionPlan plan_consumption(const DataBlockSpec &spec, const PauliString &axis, int sign = 1,
                                        std::optional<BlockState> state = std::nullopt) {
    if (axis.num_qubits() != spec.n) throw DimensionError("axis length must equal the block size");
    if (axis.phase_exp() & 1) throw InvariantError("rotation axis must be Hermitian");
    BlockState st = state ? *state : initial_state(spec);
    if (st.facing.size() != spec.n) throw DimensionError("block state does not match the block");
    ConsumptionPlan plan;
    plan.axis = axis;
    plan.sign = sign;
    Board init = detail::initial_board(spec, st);
    ScheduleBuilder b(init);
    plan.after = st;
    if (axis.is_identity()) {
        plan.measured = axis;
        plan.protocol = board::finish("consume " + axis.str(), b, 0, data_range(spec.n));
        return plan;
    }
    const size_t n = spec.n;
    // Hermitian copy carrying the requested sign in the exponent
    PauliString P = axis;
    int s = sign * (axis.phase_exp() == 2 ? -1 : 1);
    P.set_phase_exp(0);
    PauliString Q = P;
    if (spec.kind != BlockKind::fast) {
        plan.pre_rotations = y_elimination(P, st.facing);
        auto ports = detail::ports(spec, st);
        for (auto &A : plan.pre_rotations) {
            std::vector<EdgeRef> edges;
            for (size_t q = 0; q < n; q++)
                if (A.letter(q) != 'I') {
                    auto e = detail::qubit_edges(spec, b.board(), q, A.letter(q), st);
                    edges.insert(edges.end(), e.begin(), e.end());
                }
            detail::consume_y(b, edges, ports.region, ports.y_slot, ports.y_side, spec.y_qubit(), 1);
        }
        Q = conjugated(P, plan.pre_rotations);
    }
    // Q is Y-free for square-patch blocks; bring every letter to the region
    if (spec.kind == BlockKind::compact) {
        std::vector<std::pair<int, Tile>> top, bottom;
        size_t c = (n + 1) / 2;
        for (size_t q = 0; q < n; q++) {
            char l = Q.letter(q);
            if (l == 'I' || l == st.facing[q]) continue;
            Tile t = spec.data_tiles[q];
            (q < c ? top : bottom).push_back({int(q), Tile{t.x, 1}});
            st.facing[q] = l;
            plan.patch_rotations++;
        }
        detail::rotate_in_place(b, top);
        detail::rotate_in_place(b, bottom);
    } else if (spec.kind == BlockKind::intermediate) {
        bool any = false;
        for (size_t q = 0; q < n; q++)
            if (Q.letter(q) != 'I' && Q.letter(q) != st.facing[q]) any = true;
        if (any) {
            int ra = 1 - st.data_row;
            std::vector<std::pair<int, Tile>> flip, plain;
            for (size_t q = 0; q < n; q++) {
                char l = Q.letter(q);
                bool swap = l != 'I' && l != st.facing[q];
                (swap ? flip : plain).push_back({int(q), Tile{int(q), ra}});
                if (swap) st.facing[q] = l, plan.patch_rotations++;
            }
            detail::square_moves(b, flip, plain);
            st.data_row = ra;
        }
    }
    // the consuming measurement
    std::vector<EdgeRef> edges;
    for (size_t q = 0; q < n; q++)
        if (Q.letter(q) != 'I') {
            auto e = detail::qubit_edges(spec, b.board(), q, Q.letter(q), st);
            edges.insert(edges.end(), e.begin(), e.end());
        }
    auto ports = detail::ports(spec, st);
    PauliString D = b.board().measured_operator(edges);
    // Q_{s pi/8} = D_{s' pi/8} where D is what the edges measure
    if (!D.select(data_range(n)).same_axis(Q))
        throw InvariantError("consumed product " + D.str() + " differs from " + Q.str());
    plan.measured_sign = s * Q.sign() * D.sign();
    detail::consume_magic(b, edges, ports.region, ports.magic, ports.magic_side, spec.magic_qubit(),
                          plan.measured_sign);
    plan.measured = Q;
    // undo the explicit pi/4 rotations in the frame, last one first
    for (size_t i = plan.pre_rotations.size(); i-- > 0;) {
        PauliString A(spec.register_size());
        for (size_t q = 0; q < n; q++) A.set(q, plan.pre_rotations[i].letter(q));
        b.frame(PauliRotation(A, Angle::pi_over(2, -1)), {}, "pre-rotation undo");
    }
    plan.after = st;
    board::Schedule sched = b.build();
    auto r = board::validate_schedule(sched, init);
    if (!r.ok) throw InvariantError("consumption schedule is illegal: " + r.violation);
    plan.ticks = r.duration;
    plan.protocol = board::Protocol{"consume " + axis.str(), init, std::move(sched), r.duration, data_range(n),
                                    kind_name(spec.kind)};
    return plan;
}

// ---------------------------------------------------------------------------
// two-qubit proof-of-principle device

struct ProofOfPrinciple {
    board::Protocol protocol;
    size_t steps = 0;  // the starting configuration counts as step 1
    size_t data_qubits = 0;
    std::vector<PauliRotation> rotations;  // what the schedule implements
};

/// Physical data qubits of the six-tile device at distance d.
inline size_t proof_of_principle_qubits(size_t d) { return 6 * d * d - 2 * d; }

/// Three pi/8 rotations (Z(x)Z, Y(x)X, Y(x)Y) on a 3x2 board. q1 sits in a
/// corner so an L-shaped region reaches both of its sides; q2 is rotated in
/// place for the X of the second rotation. No layout exposes Y on both
/// qubits next to a magic state, so the third rotation first applies an
/// explicit Z_{pi/4} on q2, turning (Y(x)Y)_{pi/8} into (Y(x)X)_{-pi/8}.
inline ProofOfPrinciple proof_of_principle_scenario(size_t d = 3) {
    if (d < 3 || d % 2 == 0) throw DimensionError("code distance must be odd and at least 3");
    const size_t reg = 4;  // q1, q2, |m>, |Y>
    Board init(3, 2, reg);
    init.place(board::square(0, {0, 0}, 0, reg, Side::top));  // Z right, X bottom
    init.place(board::square(1, {2, 1}, 1, reg, Side::top));  // Z left
    ScheduleBuilder b(init);
    auto &B = b.board();
    const std::vector<Tile> column{{1, 0}, {1, 1}}, ell{{1, 0}, {1, 1}, {0, 1}};
    // Z(x)Z
    detail::consume_magic(b, {{0, B.patch(0).edge_at({0, 0}, Side::right)}, {1, B.patch(1).edge_at({2, 1}, Side::left)}},
                          column, {2, 0}, Side::left, 2, 1);
    // rotate q2 through the tile above it
    detail::rotate_in_place(b, {{1, {2, 0}}});
    // Y(x)X
    auto yx = [&](int sign) {
        detail::consume_magic(b,
                              {{0, B.patch(0).edge_at({0, 0}, Side::right)},
                               {0, B.patch(0).edge_at({0, 0}, Side::bottom)},
                               {1, B.patch(1).edge_at({2, 1}, Side::left)}},
                              ell, {2, 0}, Side::left, 2, sign);
    };
    yx(1);
    // Z2_{pi/4}, then (Y(x)Y)_{pi/8} = Z2_{-pi/4} (Y(x)X)_{-pi/8} Z2_{pi/4}
    detail::consume_y(b, {{1, B.patch(1).edge_at({2, 1}, Side::top)}}, {{2, 0}, {1, 0}}, {1, 1}, Side::top, 3, 1);
    PauliString z2 = PauliString::from_str("IZII");
    PauliString yx_op = B.measured_operator({{0, B.patch(0).edge_at({0, 0}, Side::right)},
                                             {0, B.patch(0).edge_at({0, 0}, Side::bottom)},
                                             {1, B.patch(1).edge_at({2, 1}, Side::left)}});
    // i (Y(x)Y) Z2 = -(Y(x)X): the sign relative to what the edges measure
    PauliString want = (PauliString::from_str("YYII") * z2).times_i();
    int rel = (want.phase_exp() == 2 ? -1 : 1) * (yx_op.phase_exp() == 2 ? -1 : 1);
    yx(rel);
    b.frame(PauliRotation(z2, Angle::pi_over(2, -1)), {}, "pre-rotation undo");

    ProofOfPrinciple p;
    board::Schedule s = b.build();
    p.protocol = board::Protocol{"proof_of_principle", init, s, 7, {0, 1}, ""};
    p.steps = s.groups.size() + 1;
    p.data_qubits = proof_of_principle_qubits(d);
    p.rotations = {PauliRotation(PauliString::from_str("ZZII"), Angle::pi_over(3)),
                   PauliRotation(PauliString::from_str("YXII"), Angle::pi_over(3)),
                   PauliRotation(PauliString::from_str("YYII"), Angle::pi_over(3))};
    return p;
}

}  // namespace patchwork::blocks
