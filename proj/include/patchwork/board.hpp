#pragma once

// The tile game. A board is a grid of tiles (x to the right, y downwards)
// holding patches. A patch's boundary is one clockwise loop of unit tile
// sides, cut by its corners into edges; each edge is dashed (X type) or
// solid (Z type) and stands for a Pauli product of the patch's qubits.
//
// Operations are applied in groups. A group is one time step when it holds
// at least one timed operation; otherwise it is instantaneous. Every
// operation also records its logical action into a measurement program over
// the board's qubit register, so a schedule can be replayed on LogicalState.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "patchwork/program.hpp"

namespace patchwork::board {

struct Tile {
    int x = 0, y = 0;
    auto operator<=>(const Tile &) const = default;
};

struct Point {
    int x = 0, y = 0;
    auto operator<=>(const Point &) const = default;
};

enum class Side { top, right, bottom, left };

inline const char *side_name(Side s) {
    static const char *n[] = {"top", "right", "bottom", "left"};
    return n[int(s)];
}

inline Tile neighbor(Tile t, Side s) {
    switch (s) {
        case Side::top: return {t.x, t.y - 1};
        case Side::right: return {t.x + 1, t.y};
        case Side::bottom: return {t.x, t.y + 1};
        case Side::left: return {t.x - 1, t.y};
    }
    return t;
}

inline Side opposite(Side s) { return Side((int(s) + 2) % 4); }

/// One unit side of a tile, directed clockwise around that tile.
struct Segment {
    Tile tile;
    Side side;
    Point from() const {
        switch (side) {
            case Side::top: return {tile.x, tile.y};
            case Side::right: return {tile.x + 1, tile.y};
            case Side::bottom: return {tile.x + 1, tile.y + 1};
            case Side::left: return {tile.x, tile.y + 1};
        }
        return {};
    }
    Point to() const { return Segment{tile, Side((int(side) + 1) % 4)}.from(); }
    Tile outside() const { return neighbor(tile, side); }
    auto operator<=>(const Segment &) const = default;
};

inline bool edge_connected(const std::vector<Tile> &tiles) {
    if (tiles.empty()) return false;
    std::set<Tile> all(tiles.begin(), tiles.end()), seen{tiles.front()};
    std::vector<Tile> stack{tiles.front()};
    while (!stack.empty()) {
        Tile t = stack.back();
        stack.pop_back();
        for (Side s : {Side::top, Side::right, Side::bottom, Side::left}) {
            Tile u = neighbor(t, s);
            if (all.count(u) && seen.insert(u).second) stack.push_back(u);
        }
    }
    return seen.size() == all.size();
}

/// Clockwise boundary loop of a tile set, starting with the top side of the
/// first tile in (y, x) order. Throws unless the set is edge-connected and
/// its boundary is a single simple loop (no holes, no pinch points).
inline std::vector<Segment> boundary(const std::vector<Tile> &tiles) {
    std::set<Tile> all(tiles.begin(), tiles.end());
    if (all.size() != tiles.size()) throw IllegalOpError("patch lists a tile twice");
    if (!edge_connected(tiles)) throw IllegalOpError("patch tiles are not edge-connected");
    std::map<Point, Segment> out;
    size_t total = 0;
    for (auto &t : all)
        for (Side s : {Side::top, Side::right, Side::bottom, Side::left}) {
            if (all.count(neighbor(t, s))) continue;
            Segment seg{t, s};
            if (!out.emplace(seg.from(), seg).second) throw IllegalOpError("patch boundary touches itself");
            total++;
        }
    Tile first = *std::min_element(all.begin(), all.end(),
                                   [](Tile a, Tile b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
    std::vector<Segment> loop{Segment{first, Side::top}};
    while (loop.size() <= total) {
        Point p = loop.back().to();
        auto it = out.find(p);
        if (it == out.end()) throw InvariantError("boundary walk lost its way");
        if (it->second == loop.front()) break;
        loop.push_back(it->second);
    }
    if (loop.size() != total) throw IllegalOpError("patch has a hole");
    return loop;
}

enum class EdgeKind { X, Z };  // dashed, solid

struct Edge {
    EdgeKind kind = EdgeKind::X;
    PauliString op;
    /// Shortened edges expose `op` to an error with probability p_err per
    /// time step.
    bool shortened = false;
    double p_err = 0;
};

/// Labels of a patch with 2N+2 corners, clockwise from corner 0:
/// X1, Z1, X1X2, Z2, ..., X_{N-1}X_N, Z_N, X_N, Z1...Z_N.
inline std::vector<Edge> standard_edges(size_t reg, const std::vector<size_t> &qubits) {
    if (qubits.empty()) throw IllegalOpError("a patch needs at least one qubit");
    std::vector<Edge> e;
    PauliString all_z(reg);
    for (size_t i = 0; i < qubits.size(); i++) {
        PauliString x(reg);
        if (i > 0) x.set(qubits[i - 1], 'X');
        x.set(qubits[i], 'X');
        e.push_back({EdgeKind::X, x});
        e.push_back({EdgeKind::Z, PauliString::single(reg, qubits[i], 'Z')});
        all_z.set(qubits[i], 'Z');
    }
    e.push_back({EdgeKind::X, PauliString::single(reg, qubits.back(), 'X')});
    e.push_back({EdgeKind::Z, all_z});
    return e;
}

struct Patch {
    int id = -1;
    std::vector<Tile> tiles;
    /// Corner i starts edge i; the corners are loop vertices in clockwise
    /// order.
    std::vector<Point> corners;
    std::vector<Edge> edges;
    std::vector<size_t> qubits;

    /// Index of the boundary segment where each edge starts.
    std::vector<size_t> corner_positions(const std::vector<Segment> &loop) const {
        if (corners.size() != edges.size()) throw IllegalOpError("patch corner and edge counts differ");
        if (corners.size() != 2 * qubits.size() + 2) throw IllegalOpError("patch needs 2N+2 corners for N qubits");
        std::map<Point, size_t> at;
        for (size_t i = 0; i < loop.size(); i++) at[loop[i].from()] = i;
        std::vector<size_t> pos;
        for (auto &c : corners) {
            auto it = at.find(c);
            if (it == at.end()) throw IllegalOpError("corner (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                                                     ") is not on the patch boundary");
            pos.push_back(it->second);
        }
        size_t L = loop.size(), sum = 0;
        for (size_t i = 0; i < pos.size(); i++) {
            size_t gap = (pos[(i + 1) % pos.size()] + L - pos[i]) % L;
            if (gap == 0) throw IllegalOpError("two corners coincide");
            sum += gap;
        }
        if (sum != L) throw IllegalOpError("corners are not in clockwise order");
        return pos;
    }

    /// Edge index of every boundary segment (aligned with boundary(tiles)).
    std::vector<size_t> segment_edges() const {
        auto loop = boundary(tiles);
        auto pos = corner_positions(loop);
        std::vector<size_t> owner(loop.size());
        for (size_t i = 0; i < pos.size(); i++) {
            size_t L = loop.size(), end = pos[(i + 1) % pos.size()];
            for (size_t j = pos[i]; j != end; j = (j + 1) % L) owner[j] = i;
        }
        return owner;
    }

    std::vector<Segment> edge_segments(size_t edge) const {
        auto loop = boundary(tiles);
        auto owner = segment_edges();
        std::vector<Segment> out;
        for (size_t j = 0; j < loop.size(); j++)
            if (owner[j] == edge) out.push_back(loop[j]);
        return out;
    }

    size_t edge_length(size_t edge) const { return edge_segments(edge).size(); }

    /// Edge owning the given side of one of the patch's tiles.
    size_t edge_at(Tile t, Side s) const {
        auto loop = boundary(tiles);
        auto owner = segment_edges();
        for (size_t j = 0; j < loop.size(); j++)
            if (loop[j] == Segment{t, s}) return owner[j];
        throw IllegalOpError("the " + std::string(side_name(s)) + " side of tile (" + std::to_string(t.x) + "," +
                             std::to_string(t.y) + ") is not on the boundary of patch " + std::to_string(id));
    }
};

/// Corners for a layout that starts edge 0 at segment `start` and gives edge
/// i `lengths[i]` segments.
inline std::vector<Point> corners_for(const std::vector<Tile> &tiles, Segment start, const std::vector<int> &lengths) {
    auto loop = boundary(tiles);
    auto it = std::find(loop.begin(), loop.end(), start);
    if (it == loop.end()) throw IllegalOpError("layout start is not a boundary segment");
    size_t L = loop.size(), i = size_t(it - loop.begin()), sum = 0;
    std::vector<Point> c;
    for (int len : lengths) {
        if (len < 1) throw IllegalOpError("every edge needs at least one segment");
        c.push_back(loop[i % L].from());
        i += size_t(len);
        sum += size_t(len);
    }
    if (sum != L)
        throw IllegalOpError("edge lengths sum to " + std::to_string(sum) + ", boundary has " + std::to_string(L));
    return c;
}

/// A patch with standard labels laid out by `corners_for`.
inline Patch make_patch(int id, std::vector<Tile> tiles, std::vector<size_t> qubits, size_t reg, Segment start,
                        const std::vector<int> &lengths) {
    Patch p;
    p.id = id;
    p.corners = corners_for(tiles, start, lengths);
    p.tiles = std::move(tiles);
    p.edges = standard_edges(reg, qubits);
    p.qubits = std::move(qubits);
    p.segment_edges();
    return p;
}

/// One-tile patch whose X edges are on the sides `x_side` and its opposite.
inline Patch square(int id, Tile t, size_t qubit, size_t reg, Side x_side = Side::top) {
    Side s = (x_side == Side::top || x_side == Side::bottom) ? Side::top : Side::right;
    return make_patch(id, {t}, {qubit}, reg, Segment{t, s}, {1, 1, 1, 1});
}

/// Corners for `tiles` when boundary segment j belongs to edge label[j]
/// (labels aligned with boundary(tiles)); every edge must be one run.
inline std::vector<Point> corners_from_labels(const std::vector<Tile> &tiles, const std::vector<size_t> &label,
                                              size_t edges) {
    auto loop = boundary(tiles);
    if (label.size() != loop.size()) throw InvariantError("one label per boundary segment");
    std::vector<Point> c(edges);
    std::vector<int> starts(edges, 0);
    size_t L = loop.size();
    for (size_t j = 0; j < L; j++) {
        if (label[j] >= edges) throw IllegalOpError("segment label out of range");
        if (label[(j + L - 1) % L] != label[j]) c[label[j]] = loop[j].from(), starts[label[j]]++;
    }
    for (size_t e = 0; e < edges; e++)
        if (starts[e] != 1) throw IllegalOpError("edge " + std::to_string(e) + " is not one run of segments");
    return c;
}

/// Labels of the current boundary as a map from segment to edge.
inline std::map<Segment, size_t> edge_map(const Patch &p) {
    auto loop = boundary(p.tiles);
    auto own = p.segment_edges();
    std::map<Segment, size_t> m;
    for (size_t j = 0; j < loop.size(); j++) m[loop[j]] = own[j];
    return m;
}

inline Side rotate_side(Side s, int quarter) { return Side(((int(s) + quarter) % 4 + 4) % 4); }

/// Corners after growing a square patch into the neighbouring tile `t`:
/// every old segment keeps its edge, the far side of `t` takes the edge of
/// the side it grew from and its other sides extend their neighbours.
inline std::vector<Point> grow_square_corners(const Patch &p, Tile t) {
    if (p.tiles.size() != 1) throw IllegalOpError("grow_square_corners needs a one-tile patch");
    Tile a = p.tiles[0];
    Side s = Side::top;
    for (int k = 0; k < 4; k++)
        if (neighbor(a, Side(k)) == t) s = Side(k);
    if (neighbor(a, s) != t) throw IllegalOpError("grow target is not next to the patch");
    auto old = edge_map(p);
    std::vector<Tile> tiles{a, t};
    auto loop = boundary(tiles);
    std::vector<size_t> label;
    for (auto &seg : loop)
        label.push_back(seg.tile == a ? old.at(seg) : old.at(Segment{a, seg.side}));
    return corners_from_labels(tiles, label, p.edges.size());
}

/// Corners after shrinking a patch onto `keep`: surviving segments keep
/// their edge, the new sides take the one edge that lost all its segments.
inline std::vector<Point> shrink_corners(const Patch &p, const std::vector<Tile> &keep) {
    auto old = edge_map(p);
    auto loop = boundary(keep);
    std::set<size_t> present;
    for (auto &seg : loop)
        if (old.count(seg)) present.insert(old.at(seg));
    std::vector<size_t> missing;
    for (size_t e = 0; e < p.edges.size(); e++)
        if (!present.count(e)) missing.push_back(e);
    if (missing.size() > 1) throw IllegalOpError("shrink would remove more than one edge");
    std::vector<size_t> label;
    for (size_t j = 0; j < loop.size(); j++) {
        if (old.count(loop[j])) label.push_back(old.at(loop[j]));
        else if (!missing.empty()) label.push_back(missing[0]);
        else throw IllegalOpError("shrink leaves a new side without an edge");
    }
    return corners_from_labels(keep, label, p.edges.size());
}

/// Corner move on a two-tile one-qubit patch so that shrinking onto `keep`
/// leaves a square whose X and Z sides are swapped relative to a plain
/// move: the other tile's three sides become one edge of the type that
/// currently runs along the long sides.
inline std::vector<Point> flip_corners(const Patch &p, Tile keep) {
    if (p.tiles.size() != 2 || p.edges.size() != 4) throw IllegalOpError("flip_corners needs a two-tile one-qubit patch");
    auto old = edge_map(p);
    auto loop = boundary(p.tiles);
    size_t L = loop.size();
    // start of the contiguous run on the tile that goes away
    size_t start = 0;
    for (size_t j = 0; j < L; j++)
        if (!(loop[j].tile == keep) && loop[(j + L - 1) % L].tile == keep) start = j;
    // the far side of `keep` carries the edge a plain move would put on the new side's opposite
    Side toward = Side::top;
    Tile other = p.tiles[0] == keep ? p.tiles[1] : p.tiles[0];
    for (int k = 0; k < 4; k++)
        if (neighbor(keep, Side(k)) == other) toward = Side(k);
    size_t far = old.at(Segment{keep, opposite(toward)});
    size_t e = (far + 1) % 4;  // other type
    std::vector<size_t> label(L);
    for (size_t i = 0; i < L; i++) {
        size_t j = (start + i) % L;
        label[j] = i < 3 ? e : (e + i - 2) % 4;
    }
    return corners_from_labels(p.tiles, label, 4);
}

struct EdgeRef {
    int patch = -1;
    size_t edge = 0;
    auto operator<=>(const EdgeRef &) const = default;
};

namespace op {

/// Place a new patch with all of its qubits in `state` (0 ticks).
struct Init {
    Patch patch;
    Prep state;
};

/// Product measurement of the listed edges (1 tick). Without ancilla tiles
/// the edges must belong to two patches in directly adjacent tiles;
/// otherwise the ancilla region must be free, edge-connected and touch every
/// listed edge.
struct Measure {
    std::vector<EdgeRef> edges;
    std::vector<Tile> ancilla;
    std::string tag;
};

/// Single-patch measurement of every qubit in `basis` ('X' or 'Z'), or in
/// `alt` when `use_alt` holds; removes the patch (0 ticks).
struct Readout {
    int patch = -1;
    char basis = 'Z';
    std::optional<char> alt;
    Condition use_alt;
};

/// New tiles and corners for a patch. A superset of tiles is a growth
/// (1 tick), a subset a shrink (0 ticks), the same tiles a corner move
/// (1 tick). Boundary segments that survive keep their edge.
struct Deform {
    int patch = -1;
    std::vector<Tile> tiles;
    std::vector<Point> corners;
};

/// Classically tracked correction (Pauli or Clifford frame), free.
struct Frame {
    PauliRotation rotation;
    Condition when;
    std::string tag;
};

}  // namespace op

using BoardOp = std::variant<op::Init, op::Measure, op::Readout, op::Deform, op::Frame>;

inline std::string op_kind(const BoardOp &o) {
    static const char *n[] = {"init", "measure", "readout", "deform", "frame"};
    return n[o.index()];
}

struct Group {
    std::vector<BoardOp> ops;
};

/// Durations depend on the board (a deformation may grow or shrink), so
/// they come from validate_schedule.
struct Schedule {
    std::vector<Group> groups;
};

struct LogEntry {
    int tick = 0;  // clock when the op was applied
    size_t group = 0;
    std::string kind, text;
    int cost = 0;
};

/// Tick cost of an operation on the current board (grow 1, shrink 0, ...).
enum class DeformKind { grow, shrink, corner_move };

class Board {
  public:
    /// Placeholder 1x1 board with one qubit.
    Board() : Board(1, 1, 1) {}
    Board(int width, int height, size_t reg) : w_(width), h_(height), reg_(reg), program_(reg) {
        if (width < 1 || height < 1) throw DimensionError("board needs positive dimensions");
    }

    int width() const { return w_; }
    int height() const { return h_; }
    size_t register_size() const { return reg_; }
    int clock() const { return clock_; }
    const std::map<int, Patch> &patches() const { return patches_; }
    const Patch &patch(int id) const {
        auto it = patches_.find(id);
        if (it == patches_.end()) throw IllegalOpError("no patch " + std::to_string(id));
        return it->second;
    }
    bool has_patch(int id) const { return patches_.count(id) > 0; }
    const Program &program() const { return program_; }
    const std::vector<LogEntry> &log() const { return log_; }
    bool in_bounds(Tile t) const { return t.x >= 0 && t.y >= 0 && t.x < w_ && t.y < h_; }
    std::optional<int> at(Tile t) const {
        auto it = occ_.find(t);
        if (it == occ_.end()) return std::nullopt;
        return it->second;
    }
    size_t occupied_tiles() const { return occ_.size(); }

    /// Tiles used during the last closed group (occupied, ancilla, new).
    const std::set<Tile> &last_group_tiles() const { return last_tiles_; }
    bool last_group_timed() const { return last_timed_; }
    size_t groups_closed() const { return groups_; }
    /// Accumulated sum over shortened edges of p_err per time step.
    double shortened_exposure() const { return exposure_; }

    /// Put a patch on the board before any schedule runs. Its qubits hold
    /// whatever state the replay starts from, so nothing is recorded.
    void place(const Patch &p) {
        if (open_) throw InvariantError("place() inside a group");
        std::string what = "place patch " + std::to_string(p.id);
        check_new_patch(p, what);
        used_ids_.insert(p.id);
        patches_[p.id] = p;
        for (auto &t : p.tiles) occ_[t] = p.id;
        for (auto q : p.qubits) live_qubits_.insert(q);
    }

    void begin_group() {
        if (open_) throw InvariantError("group already open");
        open_ = true;
        timed_ = false;
        claimed_tiles_.clear();
        exclusive_.clear();
        shared_.clear();
        edges_used_.clear();
        group_meas_.clear();
        group_tiles_.clear();
        for (auto &kv : occ_) group_tiles_.insert(kv.first);
    }

    void end_group() {
        if (!open_) throw InvariantError("no open group");
        open_ = false;
        for (auto &kv : occ_) group_tiles_.insert(kv.first);
        last_tiles_ = group_tiles_;
        last_timed_ = timed_;
        if (timed_) {
            clock_++;
            for (auto &kv : patches_)
                for (auto &e : kv.second.edges)
                    if (e.shortened) exposure_ += e.p_err;
        }
        groups_++;
    }

    /// Apply one operation; outside an open group it forms its own group.
    /// Returns the first outcome slot the op produced (or the program's
    /// measurement count when it produced none).
    size_t apply(const BoardOp &o) {
        bool own = !open_;
        if (own) begin_group();
        size_t slot = program_.num_measurements();
        std::visit([&](auto &x) { do_apply(x); }, o);
        if (own) end_group();
        return slot;
    }

    DeformKind classify(const op::Deform &d) const {
        const Patch &p = patch(d.patch);
        std::set<Tile> a(p.tiles.begin(), p.tiles.end()), b(d.tiles.begin(), d.tiles.end());
        if (a == b) return DeformKind::corner_move;
        if (std::includes(b.begin(), b.end(), a.begin(), a.end())) return DeformKind::grow;
        if (std::includes(a.begin(), a.end(), b.begin(), b.end())) return DeformKind::shrink;
        throw IllegalOpError("deformation of patch " + std::to_string(d.patch) +
                             " both adds and removes tiles; split it into a growth and a shrink");
    }

    /// The Pauli product a measurement would record (no legality check on
    /// geometry).
    PauliString measured_operator(const std::vector<EdgeRef> &edges) const {
        std::map<int, PauliString> per;
        for (auto &r : edges) {
            const Patch &p = patch(r.patch);
            if (r.edge >= p.edges.size()) throw IllegalOpError("patch " + std::to_string(r.patch) + " has no edge " +
                                                               std::to_string(r.edge));
            auto it = per.find(r.patch);
            if (it == per.end())
                per.emplace(r.patch, p.edges[r.edge].op);
            else
                it->second = it->second * p.edges[r.edge].op;
        }
        PauliString total(reg_);
        for (auto &kv : per) {
            if (kv.second.is_identity())
                throw IllegalOpError("edges of patch " + std::to_string(kv.first) + " multiply to the identity");
            total = total * kv.second.axis();
        }
        return total.axis();
    }

  private:
    void log(const std::string &kind, const std::string &text, int cost) {
        log_.push_back({clock_, groups_, kind, text, cost});
        if (cost) timed_ = true;
    }

    void claim_tile(Tile t, const std::string &what) {
        if (!claimed_tiles_.insert(t).second)
            throw IllegalOpError(what + ": tile (" + std::to_string(t.x) + "," + std::to_string(t.y) +
                                 ") is already used in this group");
        group_tiles_.insert(t);
    }
    void claim_exclusive(int id, const std::string &what) {
        if (exclusive_.count(id) || shared_.count(id))
            throw IllegalOpError(what + ": patch " + std::to_string(id) + " is already used in this group");
        exclusive_.insert(id);
    }
    void claim_shared(int id, const std::string &what) {
        if (exclusive_.count(id))
            throw IllegalOpError(what + ": patch " + std::to_string(id) + " is being deformed or read out in this group");
        shared_.insert(id);
    }

    void check_tile_free(Tile t, const std::string &what) const {
        if (!in_bounds(t))
            throw IllegalOpError(what + ": tile (" + std::to_string(t.x) + "," + std::to_string(t.y) + ") is off the board");
        if (occ_.count(t))
            throw IllegalOpError(what + ": tile (" + std::to_string(t.x) + "," + std::to_string(t.y) +
                                 ") is occupied by patch " + std::to_string(occ_.at(t)));
    }

    void check_new_patch(const Patch &p, const std::string &what) const {
        if (p.id < 0) throw IllegalOpError(what + ": negative id");
        if (used_ids_.count(p.id)) throw IllegalOpError(what + ": id already used");
        for (auto &e : p.edges)
            if (e.op.num_qubits() != reg_) throw IllegalOpError(what + ": edge operator has the wrong width");
        p.segment_edges();
        for (auto q : p.qubits) {
            if (q >= reg_) throw IllegalOpError(what + ": qubit out of register");
            if (live_qubits_.count(q)) throw IllegalOpError(what + ": qubit " + std::to_string(q) + " is live");
        }
        for (auto &t : p.tiles) check_tile_free(t, what);
    }

    void do_apply(const op::Init &o) {
        const Patch &p = o.patch;
        std::string what = "init patch " + std::to_string(p.id);
        if (p.qubits.size() > 1 && !o.state.is_pauli_eigenstate())
            throw IllegalOpError(what + ": multi-qubit patches start in |0>^N or |+>^N");
        check_new_patch(p, what);
        for (auto &t : p.tiles) claim_tile(t, what);
        claim_shared(p.id, what);
        used_ids_.insert(p.id);
        patches_[p.id] = p;
        for (auto &t : p.tiles) occ_[t] = p.id;
        for (auto q : p.qubits) {
            live_qubits_.insert(q);
            program_.prepare(q, o.state);
        }
        log("init", what + " in " + o.state.str(), 0);
    }

    void do_apply(const op::Readout &o) {
        std::string what = "readout of patch " + std::to_string(o.patch);
        const Patch p = patch(o.patch);
        auto ok = [](char b) { return b == 'X' || b == 'Z'; };
        if (!ok(o.basis) || (o.alt && !ok(*o.alt))) throw IllegalOpError(what + ": basis must be X or Z");
        if (o.use_alt.max_slot_plus_one() > program_.num_measurements())
            throw IllegalOpError(what + ": condition refers to a future outcome");
        claim_exclusive(o.patch, what);
        for (auto q : p.qubits) {
            auto m = [&](char b) { return PauliMeasurement(PauliString::single(reg_, q, b)); };
            if (o.alt)
                program_.measure_either(m(o.basis), m(*o.alt), o.use_alt, "readout");
            else
                program_.measure(m(o.basis), "readout");
        }
        for (auto q : p.qubits) {
            program_.release(q);
            live_qubits_.erase(q);
        }
        for (auto &t : p.tiles) occ_.erase(t);
        patches_.erase(o.patch);
        std::string b(1, o.basis);
        if (o.alt) b += std::string("|") + *o.alt;
        log("readout", what + " in " + b, 0);
    }

    void do_apply(const op::Measure &o) {
        std::string what = "measurement" + (o.tag.empty() ? std::string() : " '" + o.tag + "'");
        if (o.edges.empty()) throw IllegalOpError(what + ": no edges");
        std::set<EdgeRef> refs(o.edges.begin(), o.edges.end());
        if (refs.size() != o.edges.size()) throw IllegalOpError(what + ": edge listed twice");
        std::set<int> pids;
        for (auto &r : o.edges) pids.insert(r.patch);
        PauliString P = measured_operator(o.edges);
        // segments of every listed edge, grouped by patch
        std::map<EdgeRef, std::vector<Segment>> segs;
        for (auto &r : o.edges) segs[r] = patch(r.patch).edge_segments(r.edge);
        if (o.ancilla.empty()) {
            if (pids.size() != 2) throw IllegalOpError(what + ": a direct measurement joins exactly two patches");
            for (auto &[r, ss] : segs) {
                bool touches = false;
                for (auto &s : ss) {
                    Segment mirror{s.outside(), opposite(s.side)};
                    for (auto &[r2, ss2] : segs)
                        if (r2.patch != r.patch && std::find(ss2.begin(), ss2.end(), mirror) != ss2.end())
                            touches = true;
                }
                if (!touches)
                    throw IllegalOpError(what + ": edge " + std::to_string(r.edge) + " of patch " +
                                         std::to_string(r.patch) + " does not face a listed edge of the other patch");
            }
        } else {
            std::set<Tile> anc(o.ancilla.begin(), o.ancilla.end());
            if (anc.size() != o.ancilla.size()) throw IllegalOpError(what + ": ancilla tile listed twice");
            for (auto &t : o.ancilla) check_tile_free(t, what);
            if (!edge_connected(o.ancilla)) throw IllegalOpError(what + ": ancilla region is not edge-connected");
            for (auto &[r, ss] : segs) {
                bool touches = std::any_of(ss.begin(), ss.end(), [&](const Segment &s) { return anc.count(s.outside()); });
                if (!touches)
                    throw IllegalOpError(what + ": ancilla does not touch edge " + std::to_string(r.edge) + " of patch " +
                                         std::to_string(r.patch));
            }
        }
        for (auto &m : group_meas_)
            if (!m.commutes(P)) throw IllegalOpError(what + ": does not commute with a measurement in the same group");
        for (auto &r : o.edges)
            if (!edges_used_.insert(r).second)
                throw IllegalOpError(what + ": edge " + std::to_string(r.edge) + " of patch " + std::to_string(r.patch) +
                                     " is already measured in this group");
        for (auto &t : o.ancilla) claim_tile(t, what);
        for (int id : pids) claim_shared(id, what);
        group_meas_.push_back(P);
        program_.measure(PauliMeasurement(P), o.tag);
        log("measure", what + " of " + P.str(), 1);
    }

    void do_apply(const op::Deform &o) {
        std::string what = "deformation of patch " + std::to_string(o.patch);
        const Patch old = patch(o.patch);
        DeformKind kind = classify(o);
        Patch np = old;
        np.tiles = o.tiles;
        np.corners = o.corners;
        auto new_loop = boundary(np.tiles);
        auto new_owner = np.segment_edges();
        if (kind == DeformKind::corner_move) {
            if (np.corners == old.corners) throw IllegalOpError(what + ": nothing moves");
        } else {
            auto old_loop = boundary(old.tiles);
            auto old_owner = old.segment_edges();
            std::map<Segment, size_t> before;
            for (size_t j = 0; j < old_loop.size(); j++) before[old_loop[j]] = old_owner[j];
            for (size_t j = 0; j < new_loop.size(); j++) {
                auto it = before.find(new_loop[j]);
                if (it != before.end() && it->second != new_owner[j])
                    throw IllegalOpError(what + ": the " + side_name(new_loop[j].side) + " side of tile (" +
                                         std::to_string(new_loop[j].tile.x) + "," + std::to_string(new_loop[j].tile.y) +
                                         ") changes edge; move corners in a separate step");
            }
        }
        std::set<Tile> a(old.tiles.begin(), old.tiles.end()), b(np.tiles.begin(), np.tiles.end());
        claim_exclusive(o.patch, what);
        for (auto &t : b)
            if (!a.count(t)) {
                check_tile_free(t, what);
                claim_tile(t, what);
            }
        for (auto &t : a)
            if (!b.count(t)) claim_tile(t, what);
        for (auto &t : old.tiles) occ_.erase(t);
        for (auto &t : np.tiles) occ_[t] = o.patch;
        patches_[o.patch] = np;
        static const char *names[] = {"grow", "shrink", "corner move"};
        log("deform", what + " (" + names[int(kind)] + ")", kind == DeformKind::shrink ? 0 : 1);
    }

    void do_apply(const op::Frame &o) {
        if (o.rotation.num_qubits() != reg_) throw IllegalOpError("frame correction has the wrong width");
        if (o.when.max_slot_plus_one() > program_.num_measurements())
            throw IllegalOpError("frame correction refers to a future outcome");
        program_.rotate(o.rotation, o.when, o.tag.empty() ? "frame" : o.tag);
        log("frame", "frame " + o.rotation.str(), 0);
    }

    int w_, h_;
    size_t reg_;
    int clock_ = 0;
    size_t groups_ = 0;
    double exposure_ = 0;
    std::map<int, Patch> patches_;
    std::map<Tile, int> occ_;
    std::set<int> used_ids_;
    std::set<size_t> live_qubits_;
    Program program_;
    std::vector<LogEntry> log_;

    bool open_ = false, timed_ = false, last_timed_ = false;
    std::set<Tile> claimed_tiles_, group_tiles_, last_tiles_;
    std::set<int> exclusive_, shared_;
    std::set<EdgeRef> edges_used_;
    std::vector<PauliString> group_meas_;
};

inline int op_cost(const Board &b, const BoardOp &o) {
    if (std::holds_alternative<op::Measure>(o)) return 1;
    if (auto *d = std::get_if<op::Deform>(&o)) return b.classify(*d) == DeformKind::shrink ? 0 : 1;
    return 0;
}

struct ValidationReport {
    bool ok = true;
    std::string violation;
    size_t group = 0;  // first failing group
    size_t duration = 0;
    size_t tile_time = 0;  // sum over time steps of used tiles
    size_t peak_tiles = 0;
    size_t footprint = 0;  // tiles used at any point
    double shortened_exposure = 0;
    std::vector<size_t> group_ticks;  // clock after each group
    Program program;
    std::optional<Board> final_board;
};

/// Replays `s` on a copy of `initial`; never throws for illegal operations.
inline ValidationReport validate_schedule(const Schedule &s, const Board &initial) {
    ValidationReport r;
    Board b = initial;
    std::set<Tile> foot;
    for (auto &kv : b.patches())
        for (auto &t : kv.second.tiles) foot.insert(t);
    for (size_t g = 0; g < s.groups.size(); g++) {
        try {
            b.begin_group();
            for (auto &o : s.groups[g].ops) b.apply(o);
            b.end_group();
        } catch (const std::exception &e) {
            r.ok = false;
            r.violation = std::string("group ") + std::to_string(g) + ": " + e.what();
            r.group = g;
            r.program = b.program();
            return r;
        }
        auto &used = b.last_group_tiles();
        foot.insert(used.begin(), used.end());
        if (b.last_group_timed()) {
            r.duration++;
            r.tile_time += used.size();
            r.peak_tiles = std::max(r.peak_tiles, used.size());
        }
        r.group_ticks.push_back(size_t(b.clock() - initial.clock()));
    }
    r.footprint = foot.size();
    r.shortened_exposure = b.shortened_exposure() - initial.shortened_exposure();
    r.program = b.program();
    r.final_board = b;
    return r;
}

/// Space-time accounting of a validated schedule at code distance d: one
/// tile is d^2 physical data qubits, one time step d code cycles.
struct SpaceTimeCost {
    size_t tiles_peak = 0, ticks = 0;
    size_t data_qubits = 0, code_cycles = 0;
    size_t st_cost_d3 = 0;  // tiles_peak * ticks, in units of d^3
};

inline SpaceTimeCost space_time_cost(const ValidationReport &r, size_t d) {
    if (!r.ok) throw InvariantError("space_time_cost needs a valid schedule: " + r.violation);
    SpaceTimeCost c;
    c.tiles_peak = r.peak_tiles;
    c.ticks = r.duration;
    c.data_qubits = c.tiles_peak * d * d;
    c.code_cycles = c.ticks * d;
    c.st_cost_d3 = c.tiles_peak * c.ticks;
    return c;
}

inline SpaceTimeCost space_time_cost(const Schedule &s, const Board &initial, size_t d) {
    return space_time_cost(validate_schedule(s, initial), d);
}

/// Builds a schedule group by group while applying it to a working board,
/// so illegal steps fail at the point where they are written.
class ScheduleBuilder {
  public:
    explicit ScheduleBuilder(Board initial) : initial_(initial), board_(std::move(initial)) {}

    const Board &board() const { return board_; }
    const Board &initial() const { return initial_; }

    /// Start a new group (closing the current one).
    ScheduleBuilder &step() {
        close();
        board_.begin_group();
        sched_.groups.emplace_back();
        open_ = true;
        return *this;
    }

    int init(Patch p, Prep state) {
        int id = p.id;
        push(op::Init{std::move(p), state});
        return id;
    }
    int fresh_id() {
        int id = next_id_;
        while (board_.has_patch(id) || taken_.count(id)) id++;
        next_id_ = id + 1;
        taken_.insert(id);
        return id;
    }
    size_t measure(std::vector<EdgeRef> edges, std::vector<Tile> ancilla = {}, std::string tag = "") {
        return push(op::Measure{std::move(edges), std::move(ancilla), std::move(tag)});
    }
    /// Returns the slot of the first qubit's outcome; one slot per qubit.
    size_t readout(int id, char basis, std::optional<char> alt = std::nullopt, Condition use_alt = {}) {
        return push(op::Readout{id, basis, alt, std::move(use_alt)});
    }
    void deform(int id, std::vector<Tile> tiles, std::vector<Point> corners) {
        push(op::Deform{id, std::move(tiles), std::move(corners)});
    }
    /// Re-lay a patch on `tiles` with edge 0 starting at `start`.
    void deform(int id, std::vector<Tile> tiles, Segment start, const std::vector<int> &lengths) {
        auto c = corners_for(tiles, start, lengths);
        deform(id, std::move(tiles), std::move(c));
    }
    void frame(PauliRotation r, Condition when = {}, std::string tag = "") {
        push(op::Frame{std::move(r), std::move(when), std::move(tag)});
    }

    size_t measurements() const { return board_.program().num_measurements(); }

    Schedule build() {
        close();
        return sched_;
    }

  private:
    size_t push(BoardOp o) {
        if (!open_) step();
        size_t slot = board_.apply(o);
        sched_.groups.back().ops.push_back(std::move(o));
        return slot;
    }
    void close() {
        if (open_) board_.end_group();
        open_ = false;
    }

    Board initial_, board_;
    Schedule sched_;
    bool open_ = false;
    int next_id_ = 0;
    std::set<int> taken_;
};

}  // namespace patchwork::board
