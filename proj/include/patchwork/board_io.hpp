#pragma once

// Board snapshots as JSON, and per-group ASCII / SVG renderings of a
// schedule replay.

#include <json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "patchwork/board.hpp"

namespace patchwork::board {

/// Board state after each group, with the tiles that group used.
struct Snapshot {
    Board board;
    std::set<Tile> used;
    bool timed = false;
};

struct Replay {
    std::vector<Snapshot> frames;
    ValidationReport report;
    size_t first_group = 0;  // groups the initial board had already closed
};

/// Replays `s` from `initial`, keeping a snapshot per group. Stops at the
/// first illegal group (the report carries the violation).
inline Replay replay(const Schedule &s, const Board &initial) {
    Replay r;
    r.report = validate_schedule(s, initial);
    r.first_group = initial.groups_closed();
    Board b = initial;
    size_t groups = r.report.ok ? s.groups.size() : r.report.group;
    for (size_t g = 0; g < groups; g++) {
        b.begin_group();
        for (auto &o : s.groups[g].ops) b.apply(o);
        b.end_group();
        r.frames.push_back({b, b.last_group_tiles(), b.last_group_timed()});
    }
    return r;
}

inline nlohmann::json tile_json(Tile t) { return nlohmann::json::array({t.x, t.y}); }

inline nlohmann::json to_json(const Patch &p) {
    nlohmann::json j;
    j["id"] = p.id;
    j["qubits"] = p.qubits;
    for (auto &t : p.tiles) j["tiles"].push_back(tile_json(t));
    for (auto &c : p.corners) j["corners"].push_back(nlohmann::json::array({c.x, c.y}));
    for (auto &e : p.edges) {
        nlohmann::json je{{"kind", e.kind == EdgeKind::X ? "X" : "Z"}, {"op", e.op.str(false)}};
        if (e.shortened) je["p_err"] = e.p_err;
        j["edges"].push_back(je);
    }
    return j;
}

inline nlohmann::json to_json(const Board &b) {
    nlohmann::json j{{"width", b.width()}, {"height", b.height()}, {"register", b.register_size()},
                     {"clock", b.clock()}, {"patches", nlohmann::json::array()}};
    for (auto &kv : b.patches()) j["patches"].push_back(to_json(kv.second));
    return j;
}

/// Replay summary: cost figures, the op log grouped by group, and the
/// final board.
inline nlohmann::json to_json(const Replay &r, const std::string &name = "") {
    nlohmann::json j;
    if (!name.empty()) j["name"] = name;
    j["valid"] = r.report.ok;
    if (!r.report.ok) j["violation"] = r.report.violation;
    j["ticks"] = r.report.duration;
    j["tile_time"] = r.report.tile_time;
    j["peak_tiles"] = r.report.peak_tiles;
    j["footprint"] = r.report.footprint;
    j["st_cost_d3"] = r.report.peak_tiles * r.report.duration;
    nlohmann::json groups = nlohmann::json::array();
    if (!r.frames.empty()) {
        for (size_t g = 0; g < r.frames.size(); g++)
            groups.push_back({{"tick", r.frames[g].board.clock()},
                              {"timed", r.frames[g].timed},
                              {"tiles", r.frames[g].used.size()},
                              {"ops", nlohmann::json::array()}});
        for (auto &e : r.frames.back().board.log())
            if (e.group >= r.first_group && e.group - r.first_group < groups.size())
                groups[e.group - r.first_group]["ops"].push_back({{"kind", e.kind}, {"text", e.text}, {"cost", e.cost}});
        j["final"] = to_json(r.frames.back().board);
    }
    j["groups"] = groups;
    return j;
}

inline char patch_glyph(int id) {
    static const char *g = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    return id < 0 ? '?' : g[id % 62];
}

/// One character per tile: the patch glyph, '+' for an ancilla tile the
/// group used, '.' for a free tile.
inline std::string ascii(const Board &b, const std::set<Tile> &used = {}) {
    std::string out;
    for (int y = 0; y < b.height(); y++) {
        for (int x = 0; x < b.width(); x++) {
            Tile t{x, y};
            auto id = b.at(t);
            out += id ? patch_glyph(*id) : used.count(t) ? '+' : '.';
        }
        out += '\n';
    }
    return out;
}

inline std::string ascii(const Replay &r) {
    std::ostringstream o;
    for (size_t g = 0; g < r.frames.size(); g++) {
        auto &f = r.frames[g];
        o << "group " << g << " (tick " << f.board.clock() << (f.timed ? "" : ", free") << ")\n"
          << ascii(f.board, f.used);
    }
    if (!r.report.ok) o << "invalid: " << r.report.violation << '\n';
    return o.str();
}

namespace detail {

inline std::string patch_color(int id) {
    static const char *c[] = {"#8fb8de", "#f2c57c", "#a8d5a2", "#e8a0a0", "#c3b1e1", "#f7e08a", "#9ed8db", "#d9b38c"};
    return c[size_t(id < 0 ? 0 : id) % 8];
}

inline void svg_board(std::ostringstream &o, const Board &b, const std::set<Tile> &used, double ox, double oy,
                      double s) {
    o << "<rect x='" << ox << "' y='" << oy << "' width='" << b.width() * s << "' height='" << b.height() * s
      << "' fill='white' stroke='#ccc'/>\n";
    for (auto &t : used)
        if (!b.at(t))
            o << "<rect x='" << ox + t.x * s << "' y='" << oy + t.y * s << "' width='" << s << "' height='" << s
              << "' fill='#ddd'/>\n";
    for (auto &kv : b.patches()) {
        auto &p = kv.second;
        for (auto &t : p.tiles)
            o << "<rect x='" << ox + t.x * s << "' y='" << oy + t.y * s << "' width='" << s << "' height='" << s
              << "' fill='" << patch_color(p.id) << "'/>\n";
        auto loop = boundary(p.tiles);
        auto owner = p.segment_edges();
        for (size_t j = 0; j < loop.size(); j++) {
            auto a = loop[j].from(), c = loop[j].to();
            bool x_edge = p.edges[owner[j]].kind == EdgeKind::X;
            o << "<line x1='" << ox + a.x * s << "' y1='" << oy + a.y * s << "' x2='" << ox + c.x * s << "' y2='"
              << oy + c.y * s << "' stroke='black' stroke-width='2'" << (x_edge ? " stroke-dasharray='4,3'" : "")
              << "/>\n";
        }
        auto &t0 = p.tiles.front();
        o << "<text x='" << ox + (t0.x + 0.5) * s << "' y='" << oy + (t0.y + 0.65) * s
          << "' font-size='" << s * 0.4 << "' text-anchor='middle'>" << p.id << "</text>\n";
    }
}

}  // namespace detail

/// One panel per group, left to right; dashed edges are X, solid Z, grey
/// tiles are ancilla regions.
inline std::string svg(const Replay &r, double tile = 24) {
    if (r.frames.empty()) return "<svg xmlns='http://www.w3.org/2000/svg' width='0' height='0'/>\n";
    const Board &b0 = r.frames.front().board;
    double pw = b0.width() * tile + tile, ph = b0.height() * tile + tile * 1.5;
    std::ostringstream o;
    o << "<svg xmlns='http://www.w3.org/2000/svg' width='" << pw * double(r.frames.size()) << "' height='" << ph
      << "'>\n";
    for (size_t g = 0; g < r.frames.size(); g++) {
        double ox = double(g) * pw + tile / 2, oy = tile;
        o << "<text x='" << ox << "' y='" << tile * 0.7 << "' font-size='" << tile * 0.5 << "'>group " << g
          << ", tick " << r.frames[g].board.clock() << "</text>\n";
        detail::svg_board(o, r.frames[g].board, r.frames[g].used, ox, oy, tile);
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace patchwork::board
