#pragma once

// Scenario files and report output for the estimator.
//
// A scenario is a key/value file with [workload], [hardware], [options],
// [sweep] and [output] sections. Values are numbers, true/false, strings
// (bare or double-quoted) or bracketed number lists; '#' starts a comment.
// Unknown sections and keys are rejected with their line number.

#include <charconv>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "patchwork/estimator.hpp"

namespace patchwork::scenario {

using namespace estimator;

struct Scenario {
    Workload workload;
    Hardware hardware;
    Strategy strategy = Strategy::minimal;
    SetupOptions setup;
    std::optional<size_t> units;
    Arrangement arrangement = Arrangement::linear;
    std::vector<double> sweep_p, sweep_t_m;
    uint64_t seed = 1;
    uint64_t trials = 1000000;
    std::string json_out, csv_out, plot_out;
    bool ladder = false, tradeoff_plot = false;
};

namespace detail {

inline std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

inline double number(const std::string &v, int line) {
    double x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ParseError("expected a number, got '" + v + "'", line);
    return x;
}

inline size_t count(const std::string &v, int line) {
    double x = number(v, line);
    if (x < 0 || x != std::floor(x) || x > 1e15) throw ParseError("expected a non-negative integer, got '" + v + "'", line);
    return size_t(x);
}

inline bool boolean(const std::string &v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ParseError("expected true or false, got '" + v + "'", line);
}

inline std::string text(const std::string &v, int line) {
    if (v.size() >= 2 && v.front() == '"') {
        if (v.back() != '"') throw ParseError("unterminated string", line);
        return v.substr(1, v.size() - 2);
    }
    if (v.empty()) throw ParseError("missing value", line);
    return v;
}

inline std::vector<double> list(const std::string &v, int line) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') return {number(v, line)};
    std::vector<double> out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(number(trim(item), line));
    return out;
}

/// Strip a trailing comment that is not inside a string.
inline std::string uncomment(const std::string &s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

using Setter = std::function<void(Scenario &, const std::string &, int)>;

inline const std::map<std::string, std::map<std::string, Setter>> &schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"workload",
         {
             {"n", [](Scenario &c, const std::string &v, int l) { c.workload.n = count(v, l); }},
             {"t_count", [](Scenario &c, const std::string &v, int l) { c.workload.t_count = number(v, l); }},
             {"t_depth", [](Scenario &c, const std::string &v, int l) { c.workload.t_depth = number(v, l); }},
             {"rotation_count", [](Scenario &c, const std::string &v, int l) { c.workload.rotation_count = number(v, l); }},
             {"rotation_depth", [](Scenario &c, const std::string &v, int l) { c.workload.rotation_depth = number(v, l); }},
             {"synthesis_factor",
              [](Scenario &c, const std::string &v, int l) { c.workload.synthesis_factor = number(v, l); }},
         }},
        {"hardware",
         {
             {"p", [](Scenario &c, const std::string &v, int l) { c.hardware.p = number(v, l); }},
             {"t_cycle", [](Scenario &c, const std::string &v, int l) { c.hardware.t_cycle = number(v, l); }},
             {"t_m", [](Scenario &c, const std::string &v, int l) { c.hardware.t_m = number(v, l); }},
             {"overhead", [](Scenario &c, const std::string &v, int l) { c.hardware.overhead = number(v, l); }},
             {"auto_corrected",
              [](Scenario &c, const std::string &v, int l) { c.hardware.auto_corrected = boolean(v, l); }},
         }},
        {"options",
         {
             {"strategy",
              [](Scenario &c, const std::string &v, int l) {
                  try {
                      c.strategy = parse_strategy(text(v, l));
                  } catch (const ParseError &e) {
                      throw ParseError(e.what(), l);
                  }
              }},
             {"factories", [](Scenario &c, const std::string &v, int l) { c.setup.factories = int(count(v, l)); }},
             {"distance", [](Scenario &c, const std::string &v, int l) { c.setup.distance = int(count(v, l)); }},
             {"protocol", [](Scenario &c, const std::string &v, int l) { c.setup.protocol = text(v, l); }},
             {"variant", [](Scenario &c, const std::string &v, int l) { c.setup.variant = text(v, l); }},
             {"data_block",
              [](Scenario &c, const std::string &v, int l) {
                  try {
                      c.setup.data_block = blocks::parse_kind(text(v, l));
                  } catch (const std::exception &e) {
                      throw ParseError(e.what(), l);
                  }
              }},
             {"t_budget", [](Scenario &c, const std::string &v, int l) { c.setup.t_budget = number(v, l); }},
             {"qubit_budget", [](Scenario &c, const std::string &v, int l) { c.setup.qubit_budget = number(v, l); }},
             {"units", [](Scenario &c, const std::string &v, int l) { c.units = count(v, l); }},
             {"arrangement",
              [](Scenario &c, const std::string &v, int l) {
                  try {
                      c.arrangement = parse_arrangement(text(v, l));
                  } catch (const std::exception &e) {
                      throw ParseError(e.what(), l);
                  }
              }},
             {"seed", [](Scenario &c, const std::string &v, int l) { c.seed = count(v, l); }},
             {"trials", [](Scenario &c, const std::string &v, int l) { c.trials = count(v, l); }},
         }},
        {"sweep",
         {
             {"p", [](Scenario &c, const std::string &v, int l) { c.sweep_p = list(v, l); }},
             {"t_m", [](Scenario &c, const std::string &v, int l) { c.sweep_t_m = list(v, l); }},
         }},
        {"output",
         {
             {"json", [](Scenario &c, const std::string &v, int l) { c.json_out = text(v, l); }},
             {"csv", [](Scenario &c, const std::string &v, int l) { c.csv_out = text(v, l); }},
             {"plot", [](Scenario &c, const std::string &v, int l) { c.plot_out = text(v, l); }},
             {"ladder", [](Scenario &c, const std::string &v, int l) { c.ladder = boolean(v, l); }},
             {"tradeoff_plot", [](Scenario &c, const std::string &v, int l) { c.tradeoff_plot = boolean(v, l); }},
         }},
    };
    return s;
}

}  // namespace detail

inline Scenario parse_scenario(std::istream &in) {
    Scenario c;
    std::string raw, section;
    std::set<std::string> seen;
    int line = 0;
    while (std::getline(in, raw)) {
        line++;
        auto s = detail::trim(detail::uncomment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ParseError("malformed section header", line);
            section = detail::trim(s.substr(1, s.size() - 2));
            if (!detail::schema().count(section)) throw ParseError("unknown section [" + section + "]", line);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        if (section.empty()) throw ParseError("key outside of a section", line);
        auto key = detail::trim(s.substr(0, eq)), value = detail::trim(s.substr(eq + 1));
        auto &keys = detail::schema().at(section);
        auto it = keys.find(key);
        if (it == keys.end()) throw ParseError("unknown key '" + key + "' in [" + section + "]", line);
        if (!seen.insert(section + "." + key).second) throw ParseError("duplicate key '" + key + "'", line);
        it->second(c, value, line);
    }
    try {
        c.workload.check();
        c.hardware.check();
    } catch (const DimensionError &e) {
        throw ParseError(e.what());
    }
    return c;
}

inline Scenario parse_scenario(const std::string &text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

inline Scenario load_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return parse_scenario(in);
}

// ---------------------------------------------------------------------------
// reports

/// Shortest round-trip decimal form, so files are byte-stable.
inline std::string num(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : v < 0 ? "-inf" : "nan";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string csv_quote(const std::string &s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string o = "\"";
    for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return o + "\"";
}

inline nlohmann::json to_json(const Workload &w) {
    return {{"n", w.n},
            {"t_count", w.t_count},
            {"t_depth", w.t_depth},
            {"rotation_count", w.rotation_count},
            {"rotation_depth", w.rotation_depth},
            {"synthesis_factor", w.synthesis_factor}};
}

inline nlohmann::json to_json(const Hardware &h) {
    return {{"p", h.p}, {"t_cycle", h.t_cycle}, {"t_m", h.t_m}, {"overhead", h.overhead},
            {"auto_corrected", h.auto_corrected}};
}

inline nlohmann::json to_json(const Setup &s) {
    nlohmann::json parts = nlohmann::json::array();
    for (auto &p : s.parts) parts.push_back({{"role", p.role}, {"what", p.what}, {"count", p.count}, {"tiles", p.tiles}});
    return {{"name", s.name},
            {"strategy", strategy_name(s.strategy)},
            {"data_block", blocks::kind_name(s.data_kind)},
            {"protocol", s.protocol},
            {"variant", s.variant},
            {"factories", s.factories},
            {"parts", parts},
            {"tiles", s.tiles},
            {"d", s.distance.d},
            {"failure_probability", s.distance.achieved},
            {"failure_probability_previous", s.distance.previous},
            {"consumption_ticks", s.consumption_ticks},
            {"factory_period", s.factory_period},
            {"ticks_per_t", s.ticks_per_t},
            {"ticks", s.total_ticks},
            {"qubits", s.qubits},
            {"seconds", s.seconds},
            {"st_cost_d3", s.st_cost_d3},
            {"qubit_seconds", s.qubit_seconds},
            {"display", {{"qubits", display_qubits(s.qubits)}, {"time", display_time(s.seconds)}}}};
}

inline nlohmann::json to_json(const UnitPlan &u) {
    return {{"arrangement", arrangement_name(u.arrangement)},
            {"units", u.n_u},
            {"units_effective", u.n_u_effective},
            {"exceeds_max", u.exceeds_max},
            {"d", u.d},
            {"t_u_ticks", u.t_u_ticks},
            {"t_u_seconds", u.t_u_seconds},
            {"n_max", u.n_max},
            {"unit",
             {{"protocol", u.protocol},
              {"variant", u.variant},
              {"factories", u.factories},
              {"data_tiles", u.data_tiles},
              {"factory_tiles", u.factory_tiles},
              {"storage_tiles", u.storage_tiles},
              {"unused_tiles", u.unused_tiles},
              {"tiles", u.unit_tiles},
              {"outline", {u.footprint_w, u.footprint_h}},
              {"end_unit_tiles", u.end_unit_tiles},
              {"qubits", u.unit_qubits}}},
            {"total_tiles", u.total_tiles},
            {"total_tiles_trimmed", u.total_tiles_trimmed},
            {"qubits", u.total_qubits},
            {"t_per_tu", u.t_per_tu},
            {"seconds", u.seconds},
            {"st_cost_d3", u.st_cost_d3},
            {"display", {{"qubits", display_qubits(u.total_qubits)}, {"time", display_time(u.seconds)}}}};
}

inline nlohmann::json to_json(const LadderRow &r) {
    return {{"scheme", r.scheme},
            {"arrangement", r.arrangement},
            {"description", r.description},
            {"tiles", r.tiles},
            {"d", r.d},
            {"qubits", r.qubits},
            {"ticks", r.ticks},
            {"seconds", r.seconds},
            {"st_cost", r.st_cost},
            {"display", {{"qubits", display_qubits(r.qubits)}, {"time", display_time(r.seconds)}}}};
}

inline nlohmann::json to_json(const std::vector<LadderRow> &rows) {
    nlohmann::json j = nlohmann::json::array();
    for (auto &r : rows) j.push_back(to_json(r));
    return j;
}

inline const char *ladder_csv_header =
    "scheme,tiles,d,qubits,ticks,seconds,st-cost,arrangement,display_qubits,display_time\n";

inline std::string ladder_csv(const std::vector<LadderRow> &rows) {
    std::string o = ladder_csv_header;
    for (auto &r : rows)
        o += r.scheme + "," + std::to_string(r.tiles) + "," + std::to_string(r.d) + "," + num(r.qubits) + "," +
             num(r.ticks) + "," + num(r.seconds) + "," + num(r.st_cost) + "," + r.arrangement + "," +
             csv_quote(display_qubits(r.qubits)) + "," + display_time(r.seconds) + "\n";
    return o;
}

struct SweepPoint {
    double p = 0, t_m = 0;
    Setup setup;
};

/// One setup per (p, t_m) pair; empty lists fall back to the scenario's
/// hardware values.
inline std::vector<SweepPoint> sweep(const Scenario &c) {
    auto ps = c.sweep_p.empty() ? std::vector<double>{c.hardware.p} : c.sweep_p;
    auto ts = c.sweep_t_m.empty() ? std::vector<double>{c.hardware.t_m} : c.sweep_t_m;
    std::vector<SweepPoint> out;
    for (double p : ps)
        for (double t : ts) {
            Hardware hw = c.hardware;
            hw.p = p;
            hw.t_m = t;
            out.push_back({p, t, assemble_setup(c.workload, hw, c.strategy, c.setup)});
        }
    return out;
}

inline std::string sweep_csv(const std::vector<SweepPoint> &pts) {
    std::string o = "scheme,tiles,d,qubits,ticks,seconds,st-cost,p,t_m,display_qubits,display_time\n";
    for (auto &q : pts) {
        auto &s = q.setup;
        o += s.name + "," + std::to_string(s.tiles) + "," + std::to_string(s.distance.d) + "," + num(s.qubits) + "," +
             num(s.total_ticks) + "," + num(s.seconds) + "," + num(s.qubit_seconds) + "," + num(q.p) + "," +
             num(q.t_m) + "," + csv_quote(display_qubits(s.qubits)) + "," + display_time(s.seconds) + "\n";
    }
    return o;
}

/// Plot data for the trade-off figure: panel a is qubits against time at
/// p = 1e-4, panel b the same at p = 1e-3, panel c the space-time cost
/// (qubit-seconds) against time for both.
struct PlotPoint {
    std::string panel, scheme, arrangement;
    double p = 0, seconds = 0, y = 0;
};

inline std::vector<PlotPoint> tradeoff_points(const Workload &w, Hardware hw,
                                           const std::vector<double> &rates = {1e-4, 1e-3}) {
    std::vector<PlotPoint> out;
    std::vector<std::vector<LadderRow>> curves;
    for (double p : rates) {
        hw.p = p;
        curves.push_back(tradeoff_curve(w, hw));
    }
    const char *panels = "ab";
    for (size_t i = 0; i < rates.size() && i < 2; i++)
        for (auto &r : curves[i]) out.push_back({std::string(1, panels[i]), r.scheme, r.arrangement, rates[i], r.seconds, r.qubits});
    for (size_t i = 0; i < rates.size(); i++)
        for (auto &r : curves[i]) out.push_back({"c", r.scheme, r.arrangement, rates[i], r.seconds, r.st_cost});
    return out;
}

inline std::string plot_csv(const std::vector<PlotPoint> &pts) {
    std::string o = "panel,p,scheme,arrangement,seconds,value\n";
    for (auto &q : pts)
        o += q.panel + "," + num(q.p) + "," + q.scheme + "," + q.arrangement + "," + num(q.seconds) + "," + num(q.y) +
             "\n";
    return o;
}

}  // namespace patchwork::scenario
