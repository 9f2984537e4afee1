// patchwork: command-line front end for the transpiler, distillation
// simulator, data-block schedules and resource estimator.
//
// Exit codes: 0 ok, 1 usage or input error, 2 infeasible request,
// 3 internal invariant violation.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "patchwork/board_io.hpp"
#include "patchwork/circuit_json.hpp"
#include "patchwork/distill_sim.hpp"
#include "patchwork/protocols.hpp"
#include "patchwork/scenario.hpp"
#include "patchwork/verify.hpp"

using namespace patchwork;
using nlohmann::json;

namespace {

enum Exit { ok = 0, usage = 1, infeasible = 2, invariant = 3 };

struct Global {
    uint64_t seed = 1;
    uint64_t trials = 0;  // 0: command default
    unsigned jobs = 0;
    std::string out;
    std::string format;  // empty: command default
};

/// Output is collected first and written once the command has succeeded,
/// so a failing command leaves no partial files behind.
struct Output {
    struct File {
        std::string path, body;
    };
    std::vector<File> files;
    std::string stdout_text, stderr_text;

    void primary(const Global &g, const std::string &body) {
        if (g.out.empty()) stdout_text += body;
        else files.push_back({g.out, body});
    }
    void file(const std::string &path, const std::string &body) { files.push_back({path, body}); }

    void flush() const {
        for (auto &f : files) {
            std::ofstream o(f.path, std::ios::binary);
            if (!o) throw ParseError("cannot write " + f.path);
            o << f.body;
        }
        std::cout << stdout_text << std::flush;
        std::cerr << stderr_text << std::flush;
    }
};

std::string dump(const json &j) { return j.dump(2) + "\n"; }

std::string fmt(double v, const char *spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---------------------------------------------------------------------------
// transpile

struct TranspileArgs {
    std::string input;
    bool verify = false, no_compress = false;
};

int cmd_transpile(const TranspileArgs &a, const Global &g, Output &out) {
    std::istringstream in(read_file(a.input));
    GateCircuit c = parse_circuit(in);
    CanonicalCircuit naive = push_clifford_right(c);
    CanonicalCircuit can = a.no_compress ? naive : compress_layers(naive);
    if (!layers_valid(can)) throw InvariantError("transpiled layers do not commute");
    auto m = metrics(can);
    std::ostringstream s;
    s << "qubits " << c.num_qubits << "\n"
      << "layers " << naive.layers.size() << " -> " << can.layers.size() << "\n"
      << "t_count " << m.t_count << "\n"
      << "t_depth " << m.t_depth << "\n"
      << "rotation_count " << m.rotation_count << "\n"
      << "rotation_depth " << m.rotation_depth << "\n"
      << "clifford_frame " << can.clifford_frame.size() << "\n"
      << "measurements " << can.measurements.size() << "\n";
    int code = ok;
    if (a.verify) {
        const size_t bound = 5;
        if (c.num_qubits > bound) {
            s << "verify skipped: " << c.num_qubits << " qubits exceeds the dense bound of " << bound << "\n";
        } else {
            double dist = projective_distance(circuit_unitary(c, bound), canonical_unitary(can, bound));
            bool pass = dist < 1e-9;
            s << (pass ? "PASS" : "FAIL") << " verify: projective distance " << fmt(dist, "%.3e") << "\n";
            if (!pass) code = invariant;
        }
    }
    std::string body = dump(to_json(can));
    if (g.out.empty()) {
        // canonical JSON on stdout, metrics on stderr
        out.stdout_text += body;
        out.stderr_text += s.str();
    } else {
        out.file(g.out, body);
        out.stdout_text += s.str();
    }
    return code;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
    std::string config;
    bool ladder = false, plot = false;
    std::string strategy, plot_out;
    std::optional<double> p, t_m;
    std::optional<int> factories;
};

scenario::Scenario load_or_default(const std::string &path) {
    return path.empty() ? scenario::Scenario{} : scenario::load_scenario(path);
}

std::string registry_diagnostics(double p, double target) {
    std::ostringstream s;
    s << "target output error per state: " << fmt(target, "%.3e") << " at p = " << fmt(p) << "\n";
    for (auto *spec : estimator::magic_protocols(p)) {
        auto e = error_model(*spec, p);
        s << "  " << spec->name << ": " << fmt(e.per_state, "%.3e") << " per state, "
          << fmt(block_cost_per_state(*spec, p), "%.1f") << " d^3 per state"
          << (e.per_state < target ? "" : "  (insufficient)") << "\n";
    }
    return s.str();
}

int cmd_estimate(const EstimateArgs &a, const Global &g, Output &out) {
    auto c = load_or_default(a.config);
    if (!a.strategy.empty()) c.strategy = estimator::parse_strategy(a.strategy);
    if (a.p) c.hardware.p = *a.p, c.sweep_p.clear();
    if (a.t_m) c.hardware.t_m = *a.t_m, c.sweep_t_m.clear();
    if (a.factories) c.setup.factories = *a.factories;
    c.hardware.check();
    bool ladder = a.ladder || c.ladder, plot = a.plot || c.tradeoff_plot;
    try {
        json report{{"workload", scenario::to_json(c.workload)}, {"hardware", scenario::to_json(c.hardware)}};
        std::string csv;
        if (ladder) {
            auto rows = estimator::tradeoff_curve(c.workload, c.hardware);
            report["ladder"] = scenario::to_json(rows);
            csv = scenario::ladder_csv(rows);
        }
        std::string plot_csv;
        if (plot) {
            plot_csv = scenario::plot_csv(scenario::tradeoff_points(c.workload, c.hardware));
            if (!ladder) csv = plot_csv;
        }
        if (!ladder && !plot) {
            auto pts = scenario::sweep(c);
            json setups = json::array();
            for (auto &p : pts) setups.push_back(scenario::to_json(p.setup));
            report["setups"] = setups;
            csv = scenario::sweep_csv(pts);
            if (c.units) {
                auto u = estimator::unit_plan(c.workload, c.hardware, *c.units, c.arrangement, c.setup.distance,
                                              c.setup.t_budget);
                report["units"] = scenario::to_json(u);
            }
        }
        std::string format = g.format.empty() ? (ladder || plot ? "csv" : "json") : g.format;
        if (format != "json" && format != "csv") throw ParseError("estimate writes json or csv");
        out.primary(g, format == "csv" ? csv : dump(report));
        if (plot && ladder) {
            if (a.plot_out.empty() && c.plot_out.empty())
                out.stderr_text += "note: plot data needs --plot-out when combined with the ladder\n";
        }
        if (!a.plot_out.empty() && plot) out.file(a.plot_out, plot_csv);
        if (!c.plot_out.empty() && plot) out.file(c.plot_out, plot_csv);
        if (!c.json_out.empty()) out.file(c.json_out, dump(report));
        if (!c.csv_out.empty()) out.file(c.csv_out, csv);
    } catch (const InfeasibleError &e) {
        std::string what = e.what();
        std::cerr << "infeasible: " << what.substr(0, what.find('\n')) << "\n"
                  << registry_diagnostics(c.hardware.p, c.setup.t_budget / c.workload.t_count);
        return infeasible;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// distill

struct DistillArgs {
    std::string protocol;
    double p = 1e-3;
};

/// Circuit for simulation; nullopt when the registry has no code matrix.
std::optional<DistillationCircuit> simulation_circuit(const ProtocolSpec &s) {
    if (s.matrix_file.empty()) return std::nullopt;
    BinMatrix M = load_matrix(data_path(s.matrix_file));
    if (s.correction_file.empty()) return extract_circuit(M, s.level);
    auto corr = find_correction(M, load_matrix(data_path(s.correction_file)));
    if (!corr.pairs) throw InvariantError("no Clifford correction for " + s.name);
    return extract_circuit(M, s.level, *corr.pairs);
}

int cmd_distill(const DistillArgs &a, const Global &g, Output &out) {
    const ProtocolSpec *spec = nullptr;
    for (auto &s : protocol_registry())
        if (s.name == a.protocol) spec = &s;
    if (!spec) {
        std::string names;
        for (auto &s : protocol_registry()) names += " " + s.name;
        throw ParseError("unknown protocol '" + a.protocol + "'; registered:" + names);
    }
    std::string format = g.format.empty() ? "text" : g.format;
    if (format == "svg") {
        auto proto = board::distillation_block(a.protocol);
        auto r = board::replay(proto.schedule, proto.initial);
        if (!r.report.ok) throw InvariantError(r.report.violation);
        out.primary(g, board::svg(r));
        return ok;
    }
    if (format != "text" && format != "json") throw ParseError("distill writes text, json or svg");

    auto model = error_model(*spec, a.p);
    double success = success_probability(*spec, a.p);
    json j{{"protocol", spec->name},
           {"n", spec->n},
           {"k", spec->k},
           {"m_x", spec->m_x},
           {"p", a.p},
           {"model",
            {{"acceptance", success},
             {"output_error_total", model.total},
             {"output_error_per_state", model.per_state},
             {"correlated", model.correlated}}}};
    std::ostringstream s;
    s << spec->name << " (n = " << spec->n << ", k = " << spec->k << ", m_x = " << spec->m_x << ")\n";
    for (auto &b : spec->blocks) {
        j["layouts"].push_back(json{{"variant", b.variant},
                                {"tiles", b.tiles},
                                {"ticks", b.ticks},
                                {"st_cost_d3", b.tiles * b.ticks},
                                {"cost_per_state_d3", block_cost_per_state(*spec, a.p, b.variant)}});
        s << "layout " << b.variant << ": " << b.tiles << " tiles, " << b.ticks << " ticks, " << b.tiles * b.ticks
          << "d^3\n";
    }
    s << "model at p = " << fmt(a.p) << ": acceptance " << fmt(success) << ", output error " << fmt(model.total)
      << (model.correlated ? " (all outputs)" : spec->k > 1 ? " (sum over outputs)" : "") << "\n";

    std::optional<DistillationSimulator> sim;
    std::string notice;
    try {
        if (auto circ = simulation_circuit(*spec)) sim.emplace(*circ);
        else notice = "no code matrix for " + spec->name + "; model only";
    } catch (const CapacityError &e) {
        notice = std::string(e.what()) + "; model only";
    }
    if (sim) {
        uint64_t trials = g.trials ? g.trials : 1000000;
        auto r = distill_monte_carlo(*sim, a.p, trials, g.seed, g.jobs);
        j["monte_carlo"] = {{"seed", r.seed},
                            {"trials", r.trials},
                            {"accepted", r.accepted},
                            {"errors", r.errors},
                            {"acceptance", r.acceptance},
                            {"acceptance_ci", {r.acceptance_ci.lo, r.acceptance_ci.hi}},
                            {"output_error", r.output_error},
                            {"output_error_ci", {r.error_ci.lo, r.error_ci.hi}},
                            {"distinct_patterns", r.distinct_patterns}};
        s << "monte carlo: " << r.trials << " trials, " << r.accepted << " accepted, " << r.errors << " errors\n"
          << "  acceptance " << fmt(r.acceptance) << " [" << fmt(r.acceptance_ci.lo) << ", "
          << fmt(r.acceptance_ci.hi) << "]\n"
          << "  output error " << fmt(r.output_error) << " [" << fmt(r.error_ci.lo) << ", " << fmt(r.error_ci.hi)
          << "]\n";
    } else {
        j["notice"] = notice;
        s << "notice: " << notice << "\n";
    }
    out.primary(g, format == "json" ? dump(j) : s.str());
    return ok;
}

// ---------------------------------------------------------------------------
// units

struct UnitsArgs {
    std::string config;
    std::optional<size_t> units;
    std::string arrangement;
    std::optional<double> p, t_m;
};

int cmd_units(const UnitsArgs &a, const Global &g, Output &out) {
    auto c = load_or_default(a.config);
    if (a.p) c.hardware.p = *a.p;
    if (a.t_m) c.hardware.t_m = *a.t_m;
    if (!a.arrangement.empty()) c.arrangement = estimator::parse_arrangement(a.arrangement);
    if (a.units) c.units = a.units;
    auto plan = [&](size_t n) {
        return estimator::unit_plan(c.workload, c.hardware, n, c.arrangement, c.setup.distance, c.setup.t_budget);
    };
    try {
        size_t n = c.units ? *c.units : plan(2).n_max;
        auto u = plan(n);
        std::string format = g.format.empty() ? "text" : g.format;
        if (format == "json") {
            out.primary(g, dump(scenario::to_json(u)));
        } else if (format == "text") {
            std::ostringstream s;
            s << estimator::arrangement_name(u.arrangement) << " chain of " << u.n_u << " units at d = " << u.d
              << "\n"
              << "t_u " << u.t_u_ticks << " ticks = " << fmt(u.t_u_seconds * 1e6, "%.0f") << " us, n_max " << u.n_max
              << (u.exceeds_max ? " (exceeded; extra units idle)" : "") << "\n"
              << "unit: " << u.data_tiles << " data + " << u.factory_tiles << " factory (" << u.factories << " x "
              << u.protocol << ") + " << u.storage_tiles << " storage + " << u.unused_tiles << " unused = "
              << u.unit_tiles << " tiles\n"
              << "total " << u.total_tiles << " tiles, " << estimator::display_qubits(u.total_qubits) << " qubits, "
              << estimator::display_time(u.seconds) << "\n";
            out.primary(g, s.str());
        } else {
            throw ParseError("units writes text or json");
        }
    } catch (const InfeasibleError &e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// board

struct BoardArgs {
    std::string protocol;
    int arg = 0;
    bool list = false;
};

int cmd_board(const BoardArgs &a, const Global &g, Output &out) {
    if (a.list) {
        std::string s;
        for (auto &n : board::protocol_names()) s += n + "\n";
        out.primary(g, s);
        return ok;
    }
    if (a.protocol.empty()) throw ParseError("board needs a protocol name (see --list)");
    auto names = board::protocol_names();
    if (std::find(names.begin(), names.end(), a.protocol) == names.end())
        throw ParseError("unknown protocol '" + a.protocol + "' (see --list)");
    auto proto = board::run_protocol(a.protocol, a.arg);
    auto r = board::replay(proto.schedule, proto.initial);
    if (!r.report.ok) throw InvariantError("schedule of " + proto.name + " is illegal: " + r.report.violation);
    if (r.report.duration != proto.expected_ticks)
        throw InvariantError(proto.name + " takes " + std::to_string(r.report.duration) + " ticks, expected " +
                             std::to_string(proto.expected_ticks));
    std::string format = g.format.empty() ? "text" : g.format;
    if (format == "svg") out.primary(g, board::svg(r));
    else if (format == "json") out.primary(g, dump(board::to_json(r, proto.name)));
    else if (format == "text" || format == "ascii") {
        std::ostringstream s;
        s << proto.name << ": " << r.report.duration << " ticks, peak " << r.report.peak_tiles << " tiles, "
          << r.report.peak_tiles * r.report.duration << "d^3\n"
          << board::ascii(r);
        out.primary(g, s.str());
    } else {
        throw ParseError("board writes text, json or svg");
    }
    return ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Surface-code lattice-surgery compiler and resource estimator"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--trials", g.trials, "Monte-Carlo trials (accepted trials for distill)");
    app.add_option("--jobs", g.jobs, "worker threads (0: all cores)");
    app.add_option("--out", g.out, "write the main output to this file");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "svg", "text", "ascii"}));

    TranspileArgs ta;
    auto *tr = app.add_subcommand("transpile", "canonicalize a circuit into pi/8 layers plus a Clifford frame");
    tr->add_option("input", ta.input, "circuit file")->required();
    tr->add_flag("--verify", ta.verify, "check dense-unitary equivalence (at most 5 qubits)");
    tr->add_flag("--no-compress", ta.no_compress, "skip layer compression");

    EstimateArgs ea;
    auto *es = app.add_subcommand("estimate", "resource estimate for a scenario");
    es->add_option("config", ea.config, "scenario file");
    es->add_flag("--table2,--ladder", ea.ladder, "space-time trade-off ladder (minimal to time-optimal)");
    es->add_flag("--fig17,--plot", ea.plot, "plot data for the trade-off curves");
    es->add_option("--plot-out", ea.plot_out, "file for the plot data");
    es->add_option("--strategy", ea.strategy, "minimal, intermediate, fast or custom");
    es->add_option("-p", ea.p, "physical error rate");
    es->add_option("--t-m", ea.t_m, "measurement plus classical processing time (s)");
    es->add_option("--factories", ea.factories, "number of distillation blocks");

    DistillArgs da;
    auto *di = app.add_subcommand("distill", "distillation protocol model and Monte-Carlo check");
    di->add_option("protocol", da.protocol, "registry name, e.g. 15-to-1")->required();
    di->add_option("-p", da.p, "input error rate")->capture_default_str();

    UnitsArgs ua;
    auto *un = app.add_subcommand("units", "time-optimal unit chain");
    un->add_option("config", ua.config, "scenario file");
    un->add_option("-n,--units", ua.units, "number of units (default: time-optimal)");
    un->add_option("--arrangement", ua.arrangement, "linear or circular");
    un->add_option("-p", ua.p, "physical error rate");
    un->add_option("--t-m", ua.t_m, "measurement plus classical processing time (s)");

    BoardArgs ba;
    auto *bo = app.add_subcommand("board", "replay and render a lattice-surgery protocol");
    bo->add_option("protocol", ba.protocol, "protocol name");
    bo->add_option("--arg", ba.arg, "distance for move, k for bell_ladder");
    bo->add_flag("--list", ba.list, "list protocol names");

    for (auto *s : {tr, es, di, un, bo}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? ok : usage;
    }
    Output out;
    int code = ok;
    try {
        if (*tr) code = cmd_transpile(ta, g, out);
        else if (*es) code = cmd_estimate(ea, g, out);
        else if (*di) code = cmd_distill(da, g, out);
        else if (*un) code = cmd_units(ua, g, out);
        else if (*bo) code = cmd_board(ba, g, out);
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const DimensionError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const InfeasibleError &e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const CapacityError &e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return infeasible;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return invariant;
    }
    try {
        out.flush();
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
    return code;
}
