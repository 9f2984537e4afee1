// Acceptance checks. `acceptance N` runs criterion N, prints one PASS/FAIL
// line and exits nonzero on failure. Without an argument every criterion runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "circuit_oracle.hpp"
#include "patchwork/blocks.hpp"
#include "patchwork/distill_sim.hpp"
#include "patchwork/estimator.hpp"
#include "patchwork/gadgets.hpp"
#include "patchwork/protocols.hpp"
#include "patchwork/stats.hpp"
#include "semantics.hpp"

using namespace patchwork;
using namespace patchwork::estimator;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
    void require(bool cond, const std::string &what) {
        if (!cond) {
            if (ok) detail.clear();
            ok = false;
            detail += (detail.empty() ? "" : "; ") + what;
        } else if (ok) {
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char *f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Hardware hw(double p) {
    Hardware h;
    h.p = p;
    return h;
}

BinMatrix mat(const std::string &name) { return load_matrix(data_path("matrices/" + name)); }

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

Outcome block_costs() {
    Outcome o;
    for (auto [name, cost] : {std::pair{"7-to-1", 28u}, {"15-to-1", 121u}, {"20-to-4", 238u}}) {
        auto p = board::distillation_block(name);
        auto rep = board::validate_schedule(p.schedule, p.initial);
        if (!rep.ok) {
            o.require(false, std::string(name) + " schedule invalid: " + rep.violation);
            continue;
        }
        auto c = board::space_time_cost(rep, 13);
        o.require(c.st_cost_d3 == cost, fmt("%s %zux%zu = %zud^3", name, c.tiles_peak, c.ticks, c.st_cost_d3));
    }
    return o;
}

Outcome distances() {
    Outcome o;
    struct Case {
        double p;
        int d;
        double achieved, previous;
    };
    for (auto c : {Case{1e-4, 13, 0.002, 0.198}, Case{1e-3, 27, 0.005, 0.049}}) {
        auto s = assemble_setup(Workload{}, hw(c.p), Strategy::minimal);
        auto &dc = s.distance;
        o.require(dc.d == c.d, fmt("p=%g d=%d", c.p, dc.d));
        o.require(rel(dc.achieved, c.achieved) <= 0.05,
                  fmt("p=%g achieved %.4f%% vs %.1f%%", c.p, 100 * dc.achieved, 100 * c.achieved));
        o.require(rel(dc.previous, c.previous) <= 0.05,
                  fmt("p=%g at d-2 %.2f%% vs %.1f%%", c.p, 100 * dc.previous, 100 * c.previous));
    }
    return o;
}

Outcome ladder() {
    Outcome o;
    struct Want {
        const char *scheme, *arrangement;
        double qubits, seconds, unit;  // unit: half-width of the displayed rounding
    };
    const Want want[] = {
        {"A", "", 55400, 4 * 3600, 1800},        {"B", "", 76400, 2 * 3600, 1800},
        {"C", "", 90200, 79 * 60, 30},           {"K", "", 123000, 22 * 60, 30},
        {"L", "circular", 447000, 12 * 60, 30},  {"M", "circular", 679000, 490, 0.5},
        {"M", "linear", 788000, 734, 0.5},       {"N", "circular", 2230000, 147, 0.5},
        {"N", "linear", 2630000, 163, 0.5},      {"P", "circular", 328e6, 1, 0.5},
        {"P", "linear", 386e6, 1, 0.5},
    };
    auto rows = tradeoff_curve(Workload{}, hw(1e-4));
    for (auto &w : want) {
        const LadderRow *r = nullptr;
        for (auto &x : rows)
            if (x.scheme == w.scheme && x.arrangement == w.arrangement) r = &x;
        std::string tag = std::string(w.scheme) + (*w.arrangement ? std::string(" ") + w.arrangement : "");
        if (!r) {
            o.require(false, tag + " missing");
            continue;
        }
        bool q = rel(r->qubits, w.qubits) <= 0.03, t = std::abs(r->seconds - w.seconds) <= w.unit + 1e-9;
        o.require(q && t, fmt("%s %s / %s", tag.c_str(), display_qubits(r->qubits).c_str(),
                              display_time(r->seconds).c_str()));
    }
    return o;
}

Outcome monte_carlo() {
    Outcome o;
    const uint64_t n = 10000000;
    DistillationSimulator s15(extract_circuit(mat("m15.txt")));
    for (double p : {0.003, 0.01}) {
        auto r = distill_monte_carlo(s15, p, n, 2024, jobs());
        double acc = std::pow(1 - p, 15), err = 35 * p * p * p;
        double sa = binomial_sigma(acc, r.trials), se = binomial_sigma(err, r.accepted);
        o.require(r.accepted >= n, fmt("15-to-1 p=%g %llu accepted", p, (unsigned long long)r.accepted));
        o.require(std::abs(r.acceptance - acc) <= 3 * sa,
                  fmt("15-to-1 p=%g acceptance %.5f vs %.5f (%.1f sigma)", p, r.acceptance, acc,
                      std::abs(r.acceptance - acc) / sa));
        o.require(std::abs(r.output_error - err) <= 3 * se,
                  fmt("15-to-1 p=%g error %.3e vs %.3e (%.1f sigma)", p, r.output_error, err,
                      std::abs(r.output_error - err) / se));
    }
    auto M = mat("m20.txt");
    auto corr = find_correction(M, mat("m20_correction.txt"));
    DistillationSimulator s20(extract_circuit(M, 3, *corr.pairs));
    double p = 0.003;
    auto r = distill_monte_carlo(s20, p, n, 2025, jobs());
    double err = 22 * p * p, se = binomial_sigma(err, r.accepted);
    o.require(std::abs(r.output_error - err) <= 3 * se,
              fmt("20-to-4 p=%g error %.3e vs %.3e (%.1f sigma)", p, r.output_error, err,
                  std::abs(r.output_error - err) / se));
    return o;
}

PauliString pad(const char *letters, size_t total) {
    auto p = PauliString::from_str(letters);
    std::vector<size_t> idx(p.num_qubits());
    for (size_t i = 0; i < idx.size(); i++) idx[i] = i;
    return p.embed(total, idx);
}

Outcome gadget_semantics() {
    Outcome o;
    const int samples = 100;
    double worst = 1;
    auto run = [&](const std::string &name, size_t data, size_t total, const std::function<void(Program &)> &build,
                   const PauliRotation &target, size_t branches,
                   const std::function<bool(const Transcript &)> &skip = nullptr) {
        auto r = semantics::check(
            data, total, build, [&](LogicalState &s) { s.apply_rotation(target); }, samples, 1234, skip);
        worst = std::min(worst, r.worst_fidelity);
        bool ok = r.worst_fidelity > 1 - 1e-9 && r.states >= size_t(samples) && r.branches >= branches * r.states;
        if (!ok) o.require(false, fmt("%s fidelity %.12f over %zu branches", name.c_str(), r.worst_fidelity, r.branches));
    };
    for (auto axis : {"Z", "XY"}) {
        size_t d = std::strlen(axis), n = d + 1;
        auto P = pad(axis, n);
        run("magic-state consumption", d, n, [&](Program &p) { gadgets::consume_magic(p, P, d); },
            PauliRotation(P, Angle::pi_over(3)), 4);
        run("pi/4 via Y measurement", d, n, [&](Program &p) { gadgets::pi4_via_y(p, P, d); },
            PauliRotation(P, Angle::pi_over(2)), 4);
        for (int sign : {1, -1})
            run("Y-state consumption", d, n, [&](Program &p) { gadgets::consume_y(p, P, d, sign); },
                PauliRotation(P, Angle::pi_over(2, sign)), 4);
    }
    {
        auto P = pad("YX", 3);
        for (bool perform : {true, false})
            run("selective pi/4", 2, 3, [&](Program &p) { gadgets::selective_pi4(p, P, 2, perform); },
                PauliRotation(P, perform ? Angle::pi_over(2) : Angle::zero()), 4);
    }
    for (auto axis : {"Z", "YY"}) {
        size_t d = std::strlen(axis), n = d + 2;
        auto P = pad(axis, n);
        for (int sign : {1, -1}) {
            run("auto-corrected pi/8", d, n, [&](Program &p) { gadgets::auto_corrected_pi8(p, P, d, d + 1, sign); },
                PauliRotation(P, Angle::pi_over(3, sign)), 16);
            run(
                "post-corrected pi/8", d, n,
                [&](Program &p) {
                    auto pc = gadgets::post_corrected_resource(p, d, d + 1);
                    gadgets::post_corrected_consume(p, pc, P);
                    gadgets::post_corrected_decide(p, pc, sign);
                },
                PauliRotation(P, Angle::pi_over(3, sign)), 16);
        }
    }
    {
        const size_t L = 4;
        auto P = pad("ZX", 2 + L);
        std::vector<size_t> res = {2, 3, 4, 5}, slots;
        // the all-failed branch keeps cascading with fresh resources
        auto stall = [&](const Transcript &tr) {
            for (auto s : slots)
                if (tr.outcomes[s] == 1) return false;
            return true;
        };
        for (double phi : {0.1234, -0.7})
            run("phi cascade", 2, 2 + L, [&](Program &p) { slots = gadgets::phi_cascade(p, P, res, phi); },
                PauliRotation(P, Angle::radians(phi)), 2 * L, stall);
    }
    if (o.ok) o.detail = fmt("all gadgets, %d states each, worst fidelity 1 - %.1e", samples, 1 - worst);
    return o;
}

Outcome transpiler_oracle() {
    Outcome o;
    std::mt19937_64 rng(606);
    double worst = 0;
    for (int t = 0; t < 1000; t++) {
        size_t n = 1 + size_t(rng() % 4);
        auto c = circuit_oracle::random_circuit(rng, n, 1 + int(rng() % 12), false);
        auto comp = compress_layers(push_clifford_right(c));
        double dist = oracle::dist(circuit_oracle::canonical_matrix(comp), circuit_oracle::circuit_matrix(c));
        worst = std::max(worst, dist);
        if (!(dist < 1e-9)) o.require(false, fmt("trial %d distance %.2e", t, dist));
        if (!(compress_layers(comp) == comp)) o.require(false, fmt("trial %d not idempotent", t));
    }
    if (o.ok) o.detail = fmt("1000 circuits, worst distance %.1e, compression idempotent", worst);
    return o;
}

Outcome block_ticks() {
    using blocks::BlockKind;
    Outcome o;
    for (auto [k, bound] : {std::pair{BlockKind::compact, 9u}, {BlockKind::intermediate, 5u}, {BlockKind::fast, 1u}}) {
        auto s = blocks::layout(k, 6);
        size_t worst = 0, best = SIZE_MAX;
        size_t total = size_t{1} << 12;
        for (size_t code = 1; code < total; code++) {
            PauliString P(6);
            for (size_t q = 0; q < 6; q++) P.set(q, "IXYZ"[(code >> (2 * q)) & 3]);
            size_t t = blocks::plan_consumption(s, P).ticks;
            worst = std::max(worst, t), best = std::min(best, t);
        }
        bool exact = k == BlockKind::fast ? best == 1 && worst == 1 : worst == bound;
        o.require(exact, fmt("%s worst %zu", blocks::kind_name(k).c_str(), worst));
    }
    for (auto [k, tiles] : {std::pair{BlockKind::compact, 153u}, {BlockKind::intermediate, 204u}, {BlockKind::fast, 231u}})
        o.require(blocks::tile_formula(k, 100) == tiles && blocks::layout(k, 100).tiles == tiles,
                  fmt("%s %zu tiles", blocks::kind_name(k).c_str(), blocks::layout(k, 100).tiles));
    return o;
}

Outcome matrix_pipeline() {
    Outcome o;
    auto G = mat("g16.txt");
    auto E = echelon(G);
    o.require(E.same_entries(mat("g16_echelon.txt")), "echelon form");
    o.require(puncture(E, 1).same_entries(mat("m15.txt")), "15-to-1 matrix");
    o.require(puncture(E, 2).same_entries(mat("m14.txt")), "14-to-2 matrix");
    o.require(puncture(mat("semi24.txt"), 4).same_entries(mat("m20.txt")), "20-to-4 matrix");
    auto c15 = extract_circuit(mat("m15.txt"));
    o.require(c15.qubits == 5 && c15.rotations.size() == 11,
              fmt("15-to-1 circuit %zu qubits %zu rotations", c15.qubits, c15.rotations.size()));
    auto M = mat("m20.txt");
    auto corr = find_correction(M, mat("m20_correction.txt"));
    if (!corr.pairs) {
        o.require(false, "20-to-4 correction not found");
        return o;
    }
    auto c20 = extract_circuit(M, 3, *corr.pairs);
    o.require(c20.qubits == 7 && c20.rotations.size() == 17,
              fmt("20-to-4 circuit %zu qubits %zu rotations", c20.qubits, c20.rotations.size()));
    return o;
}

Outcome units() {
    Outcome o;
    struct Case {
        double p, us;
        size_t n_max, tiles;
    };
    for (auto c : {Case{1e-4, 1469, 1470, 777}, Case{1e-3, 3051, 3052, 1134}}) {
        auto lin = unit_plan(Workload{}, hw(c.p), 2, Arrangement::linear);
        auto circ = unit_plan(Workload{}, hw(c.p), 2, Arrangement::circular);
        o.require(lin.t_u_ticks == 113 && std::abs(lin.t_u_seconds * 1e6 - c.us) < 1e-6,
                  fmt("p=%g t_u %zu ticks = %.0f us", c.p, lin.t_u_ticks, lin.t_u_seconds * 1e6));
        o.require(lin.n_max == c.n_max && circ.n_max == c.n_max - 1,
                  fmt("n_max %zu linear / %zu circular", lin.n_max, circ.n_max));
        o.require(lin.unit_tiles == c.tiles, fmt("unit %zu tiles", lin.unit_tiles));
        auto a = unit_plan(Workload{}, hw(c.p), lin.n_max, Arrangement::linear);
        auto b = unit_plan(Workload{}, hw(c.p), circ.n_max, Arrangement::circular);
        o.require(std::abs(a.seconds - 1) < 1e-9 && std::abs(b.seconds - 1) < 1e-9,
                  fmt("time-optimal %.6g s / %.6g s", a.seconds, b.seconds));
    }
    return o;
}

Outcome phi_cascade() {
    Outcome o;
    for (auto [r, want] : {std::pair{size_t(1), 2.0}, {size_t(100), 8.0}}) {
        auto t = phi_layer_time(r, 1000000, 17);
        o.require(rel(t.mean, want) <= 0.05, fmt("%zu rotation(s): %.3f t_m", r, t.mean));
    }
    return o;
}

struct Criterion {
    const char *name;
    double limit_s;
    Outcome (*run)();
};

const Criterion criteria[] = {
    {"block space-time costs", 1, block_costs},
    {"code distances", 1, distances},
    {"trade-off ladder", 10, ladder},
    {"distillation Monte Carlo", 600, monte_carlo},
    {"measurement-program semantics", 60, gadget_semantics},
    {"transpiler oracle equivalence", 60, transpiler_oracle},
    {"data-block tick bounds", 60, block_ticks},
    {"matrix pipeline", 1, matrix_pipeline},
    {"unit timing", 1, units},
    {"phi cascade layer time", 60, phi_cascade},
};

bool run(size_t i) {
    auto &c = criteria[i - 1];
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception &e) {
        o.ok = false;
        o.detail = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s > c.limit_s) {
        o.ok = false;
        o.detail += fmt("; took %.2f s (limit %.0f s)", s, c.limit_s);
    }
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", i, c.name, o.detail.c_str(), s);
    std::fflush(stdout);
    return o.ok;
}

}  // namespace

int main(int argc, char **argv) {
    constexpr size_t count = std::size(criteria);
    if (argc > 2) {
        std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], count);
        return 1;
    }
    if (argc == 2) {
        char *end = nullptr;
        unsigned long i = std::strtoul(argv[1], &end, 10);
        if (*end || i < 1 || i > count) {
            std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], count);
            return 1;
        }
        return run(i) ? 0 : 1;
    }
    bool all = true;
    for (size_t i = 1; i <= count; i++) all &= run(i);
    return all ? 0 : 1;
}
