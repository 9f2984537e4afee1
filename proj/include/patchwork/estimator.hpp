#pragma once

// Resource accounting: code distance, setups of data and distillation
// blocks, units for T-layer parallelization, Clifford+phi layer timing and
// the space/time trade-off ladder.

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "patchwork/blocks.hpp"
#include "patchwork/distill.hpp"
#include "patchwork/rng.hpp"

namespace patchwork::estimator {

using blocks::BlockKind;

struct Workload {
    size_t n = 100;  // data qubits
    double t_count = 1e8;
    double t_depth = 1e6;
    double rotation_count = 0, rotation_depth = 0;
    double synthesis_factor = 100;  // T gates per generic rotation

    double n_T() const { return t_count / t_depth; }
    void check() const {
        if (n < 1) throw DimensionError("workload needs at least one qubit");
        if (!(t_count >= 1) || !(t_depth >= 1)) throw DimensionError("T count and T depth must be at least 1");
        if (t_depth > t_count) throw DimensionError("T depth cannot exceed the T count");
        if (rotation_depth > rotation_count) throw DimensionError("rotation depth cannot exceed the rotation count");
    }
};

struct Hardware {
    double p = 1e-4;
    double t_cycle = 1e-6;  // seconds per code cycle
    double t_m = 1e-6;      // seconds per measurement plus classical processing
    double overhead = 2;    // physical qubits per physical data qubit
    bool auto_corrected = true;

    void check() const {
        if (!(p > 0) || !(t_cycle > 0) || !(t_m > 0) || !(overhead > 0))
            throw DimensionError("hardware parameters must be positive");
    }
};

/// Logical error rate per qubit per code cycle.
inline double logical_error_rate(double p, int d) { return 0.1 * std::pow(100 * p, (d + 1) / 2.0); }

/// Probability that any of `tiles` patches fails during `ticks` ticks.
inline double failure_probability(double tiles, double ticks, double p, int d) {
    return tiles * ticks * d * logical_error_rate(p, d);
}

struct DistanceChoice {
    int d = 0;
    double achieved = 0;  // failure probability at d
    double previous = 0;  // failure probability at d - 2 (1 if below the smallest distance)
};

inline constexpr int min_distance = 3, max_distance = 99;

/// Smallest odd distance whose failure probability is below `budget`.
inline DistanceChoice choose_distance(double tiles, double total_ticks, double p, double budget = 0.01) {
    if (!(p > 0) || p > 1e-2) throw DimensionError("choose_distance: p must be in (0, 1e-2]");
    if (!(budget > 0) || budget > 1) throw DimensionError("choose_distance: budget must be in (0, 1]");
    if (!(tiles > 0) || !(total_ticks > 0)) throw DimensionError("choose_distance: tiles and ticks must be positive");
    for (int d = min_distance; d <= max_distance; d += 2) {
        double f = failure_probability(tiles, total_ticks, p, d);
        if (f < budget || (budget >= 1 && d == min_distance)) {
            double prev = d > min_distance ? failure_probability(tiles, total_ticks, p, d - 2) : 1.0;
            return {d, f, prev};
        }
    }
    throw InfeasibleError("no code distance up to " + std::to_string(max_distance) + " meets the error budget");
}

// ---------------------------------------------------------------------------
// protocol choice

/// Distillation protocols that output magic states, cheapest first.
inline std::vector<const ProtocolSpec *> magic_protocols(double p) {
    std::vector<const ProtocolSpec *> out;
    for (auto &s : protocol_registry())
        if (s.name != "7-to-1") out.push_back(&s);
    std::stable_sort(out.begin(), out.end(), [p](auto *a, auto *b) {
        return block_cost_per_state(*a, p) < block_cost_per_state(*b, p);
    });
    return out;
}

/// First protocol, in ascending space-time cost, whose output error per
/// state is below `target`.
inline const ProtocolSpec &select_protocol(double p, double target) {
    std::ostringstream diag;
    diag << std::setprecision(3);
    for (auto *s : magic_protocols(p)) {
        double e = error_model(*s, p).per_state;
        if (e < target) return *s;
        diag << "\n  " << s->name << ": " << e << " per state";
    }
    std::ostringstream head;
    head << std::setprecision(3) << "no registered protocol reaches " << target << " per state at p = " << p;
    throw InfeasibleError(head.str() + diag.str());
}

/// Cheapest non-modified layout of a protocol.
inline BlockCost fastest_variant(const ProtocolSpec &s) {
    if (s.blocks.empty()) return block_cost(s);
    BlockCost best = s.blocks.front();
    for (auto &b : s.blocks)
        if (b.variant != "modified" && double(b.tiles) * b.ticks < double(best.tiles) * best.ticks) best = b;
    return best;
}

/// Failure rates below this are left out of throughput accounting: a block
/// is taken to deliver k states per run. Above it, the period is divided by
/// the success probability.
inline constexpr double negligible_failure = 0.01;

inline double rate_success(const ProtocolSpec &s, double p) {
    double q = success_probability(s, p);
    return 1 - q < negligible_failure ? 1.0 : q;
}

// ---------------------------------------------------------------------------
// setups

enum class Strategy { minimal, intermediate, fast, custom };

inline std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::minimal: return "minimal";
        case Strategy::intermediate: return "intermediate";
        case Strategy::fast: return "fast";
        case Strategy::custom: return "custom";
    }
    return "?";
}

inline Strategy parse_strategy(const std::string &s) {
    for (auto k : {Strategy::minimal, Strategy::intermediate, Strategy::fast, Strategy::custom})
        if (strategy_name(k) == s) return k;
    throw ParseError("unknown strategy '" + s + "'");
}

struct SetupOptions {
    std::optional<int> factories;       // distillation block count
    std::optional<int> distance;        // skip the distance search
    std::optional<std::string> protocol, variant;
    std::optional<BlockKind> data_block;  // custom strategy
    double t_budget = 0.01;             // chance that any T gate is faulty
    double qubit_budget = 0.01;         // chance of any logical qubit error
};

struct SetupPart {
    std::string role;  // data, distillation, storage, unused
    std::string what;
    size_t count = 1;
    size_t tiles = 0;  // total for this part
};

struct Setup {
    std::string name;
    Strategy strategy = Strategy::minimal;
    std::vector<SetupPart> parts;
    size_t tiles = 0;
    BlockKind data_kind = BlockKind::compact;
    std::string protocol, variant;
    int factories = 0;
    double consumption_ticks = 0;  // worst case per magic state
    double factory_period = 0;     // mean ticks between distilled states
    double ticks_per_t = 0;
    double total_ticks = 0;
    DistanceChoice distance;
    double qubits = 0;
    double seconds = 0;
    double st_cost_d3 = 0;     // tiles * ticks
    double qubit_seconds = 0;  // qubits * seconds
    bool storage_connected = true;

    size_t tiles_of(const std::string &role) const {
        size_t t = 0;
        for (auto &p : parts)
            if (p.role == role) t += p.tiles;
        return t;
    }
};

/// Physical qubits and wall-clock time from tiles, ticks and distance.
inline void account(Setup &s, const Hardware &hw) {
    int d = s.distance.d;
    s.qubits = double(s.tiles) * hw.overhead * d * d;
    s.seconds = s.total_ticks * d * hw.t_cycle;
    s.st_cost_d3 = double(s.tiles) * s.total_ticks;
    s.qubit_seconds = s.qubits * s.seconds;
}

/// Extra data-area tiles the intermediate layout needs to reach a
/// multi-output factory's storage line (read off the published layout).
inline constexpr size_t intermediate_storage_padding = 24;

/// Storage tiles for distilled states waiting to be consumed: one per
/// block in fast setups of single-output protocols (none otherwise); k + 1
/// for one multi-output block, k per block when there are several.
inline size_t storage_tiles(Strategy st, const ProtocolSpec &s, int blocks) {
    if (s.k == 1) return st == Strategy::fast ? size_t(blocks) : 0;
    return blocks == 1 ? size_t(s.k + 1) : size_t(s.k) * size_t(blocks);
}

inline Setup assemble_setup(const Workload &w, const Hardware &hw, Strategy strategy, const SetupOptions &opt = {}) {
    w.check();
    hw.check();
    Setup s;
    s.strategy = strategy;
    s.name = strategy_name(strategy);
    const ProtocolSpec &proto =
        opt.protocol ? find_protocol(*opt.protocol) : select_protocol(hw.p, opt.t_budget / w.t_count);
    if (error_model(proto, hw.p).per_state >= opt.t_budget / w.t_count)
        throw InfeasibleError(proto.name + " does not reach the per-state error budget");
    s.protocol = proto.name;
    BlockCost bc = opt.variant ? block_cost(proto, *opt.variant)
                   : strategy == Strategy::minimal ? block_cost(proto)
                                                   : fastest_variant(proto);
    s.variant = bc.variant;
    switch (strategy) {
        case Strategy::minimal: s.data_kind = BlockKind::compact; break;
        case Strategy::intermediate: s.data_kind = BlockKind::intermediate; break;
        case Strategy::fast: s.data_kind = BlockKind::fast; break;
        case Strategy::custom:
            if (!opt.data_block) throw DimensionError("custom setups need a data block kind");
            s.data_kind = *opt.data_block;
            break;
    }
    s.consumption_ticks = double(blocks::worst_case_ticks(s.data_kind));
    double nominal = double(bc.ticks) / proto.k;  // ticks per state of one block, ignoring failures
    if (opt.factories) {
        s.factories = *opt.factories;
    } else if (strategy == Strategy::minimal) {
        s.factories = 1;
    } else if (strategy == Strategy::fast || strategy == Strategy::custom) {
        s.factories = int(std::ceil(nominal / s.consumption_ticks - 1e-9));
    } else {
        // as many blocks as the data block can keep up with
        s.factories = std::max(1, int(std::floor(nominal / s.consumption_ticks + 1e-9)));
    }
    if (s.factories < 1) throw DimensionError("a setup needs at least one distillation block");

    size_t data = blocks::tile_formula(s.data_kind, w.n);
    s.parts.push_back({"data", blocks::kind_name(s.data_kind) + " block", 1, data});
    if (s.data_kind == BlockKind::intermediate && proto.k > 1)
        s.parts.push_back({"data", "storage access", 1, intermediate_storage_padding});
    s.parts.push_back({"distillation", proto.name + " (" + bc.variant + ")", size_t(s.factories),
                       size_t(s.factories) * size_t(bc.tiles)});
    size_t store = storage_tiles(strategy == Strategy::custom ? Strategy::fast : strategy, proto, s.factories);
    if (store) s.parts.push_back({"storage", "magic-state storage", 1, store});
    for (auto &p : s.parts) s.tiles += p.tiles;

    s.factory_period = double(bc.ticks) / (s.factories * proto.k * rate_success(proto, hw.p));
    s.ticks_per_t = std::max(s.consumption_ticks, s.factory_period);
    s.total_ticks = s.ticks_per_t * w.t_count;
    if (opt.distance) {
        int d = *opt.distance;
        s.distance = {d, failure_probability(double(s.tiles), s.total_ticks, hw.p, d),
                      failure_probability(double(s.tiles), s.total_ticks, hw.p, d - 2)};
    } else {
        s.distance = choose_distance(double(s.tiles), s.total_ticks, hw.p, opt.qubit_budget);
    }
    if (!hw.auto_corrected) {
        // every T gate waits for its outcome to be processed
        s.ticks_per_t += hw.t_m / (hw.t_cycle * s.distance.d);
        s.total_ticks = s.ticks_per_t * w.t_count;
        if (!opt.distance) s.distance = choose_distance(double(s.tiles), s.total_ticks, hw.p, opt.qubit_budget);
    }
    account(s, hw);
    return s;
}

// ---------------------------------------------------------------------------
// storage connectivity

enum class TileRole { free, data_ancilla, data, distillation, storage, unused };

/// Every storage tile reaches a data-block ancilla tile through storage or
/// unused tiles (edge adjacency).
inline bool storage_connected(const std::vector<std::vector<TileRole>> &grid) {
    int h = int(grid.size()), w = h ? int(grid[0].size()) : 0;
    std::vector<std::vector<bool>> seen(static_cast<size_t>(h), std::vector<bool>(static_cast<size_t>(w)));
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++)
            if (grid[size_t(y)][size_t(x)] == TileRole::data_ancilla) stack.push_back({x, y}), seen[size_t(y)][size_t(x)] = true;
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; k++) {
            int nx = x + dx[k], ny = y + dy[k];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || seen[size_t(ny)][size_t(nx)]) continue;
            auto r = grid[size_t(ny)][size_t(nx)];
            if (r == TileRole::storage || r == TileRole::unused) {
                seen[size_t(ny)][size_t(nx)] = true;
                stack.push_back({nx, ny});
            }
        }
    }
    for (int y = 0; y < h; y++)
        for (int x = 0; x < w; x++)
            if (grid[size_t(y)][size_t(x)] == TileRole::storage && !seen[size_t(y)][size_t(x)]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// units

enum class Arrangement { linear, circular };

inline std::string arrangement_name(Arrangement a) { return a == Arrangement::linear ? "linear" : "circular"; }
inline Arrangement parse_arrangement(const std::string &s) {
    if (s == "linear") return Arrangement::linear;
    if (s == "circular") return Arrangement::circular;
    throw ParseError("unknown arrangement '" + s + "'");
}

/// Published unit footprints (rectangular outlines including unused tiles),
/// keyed by factory protocol, qubits per computation and T gates per layer.
struct UnitFootprint {
    std::string protocol;
    size_t n;
    double n_T;
    int width, height;
};

inline const std::vector<UnitFootprint> &unit_footprints() {
    static const std::vector<UnitFootprint> f = {{"15-to-1", 100, 100, 37, 21}, {"116-to-12", 100, 100, 54, 21}};
    return f;
}

struct UnitPlan {
    Arrangement arrangement = Arrangement::linear;
    size_t n_u = 0, n_u_effective = 0;
    bool exceeds_max = false;
    int d = 0;
    size_t t_u_ticks = 0;
    double t_u_seconds = 0;
    size_t n_max = 0;
    // per unit
    std::string protocol, variant;
    int factories = 0;
    size_t data_tiles = 0, factory_tiles = 0, storage_tiles = 0, unused_tiles = 0, unit_tiles = 0;
    int footprint_w = 0, footprint_h = 0;  // 0 when no published outline applies
    size_t end_unit_tiles = 0;             // first and last unit of a linear chain
    double unit_qubits = 0;
    // whole machine
    size_t total_tiles = 0;  // every unit at full size
    size_t total_tiles_trimmed = 0;  // ends reduced (linear)
    double total_qubits = 0;
    double t_per_tu = 0;  // T gates per unit-preparation period
    double seconds = 0;
    double st_cost_d3 = 0;
};

/// Ticks to prepare a unit: Bell-pair ladder (rows + 1), the T layer, and
/// the Bell-basis measurement (2).
inline size_t unit_preparation_ticks(const Workload &w) {
    size_t rows = blocks::fast_lines(2 * w.n);
    return size_t(std::llround(std::ceil(w.n_T() - 1e-9))) + rows + 1 + 2;
}

inline int minimal_distance(const Workload &w, const Hardware &hw) {
    return assemble_setup(w, hw, Strategy::minimal).distance.d;
}

inline UnitPlan unit_plan(const Workload &w, const Hardware &hw, size_t n_u, Arrangement arr,
                          std::optional<int> distance = std::nullopt, double t_budget = 0.01) {
    w.check();
    hw.check();
    if (arr == Arrangement::linear && n_u < 2) throw DimensionError("a linear chain needs at least two units");
    if (n_u < 1) throw DimensionError("need at least one unit");
    UnitPlan u;
    u.arrangement = arr;
    u.n_u = n_u;
    u.d = distance ? *distance : minimal_distance(w, hw);
    u.t_u_ticks = unit_preparation_ticks(w);
    u.t_u_seconds = double(u.t_u_ticks) * u.d * hw.t_cycle;
    size_t ratio = size_t(std::floor(u.t_u_seconds / hw.t_m + 1e-9));
    u.n_max = arr == Arrangement::linear ? ratio + 1 : ratio;

    const ProtocolSpec &proto = select_protocol(hw.p, t_budget / w.t_count);
    BlockCost bc = block_cost(proto, "modified");
    u.protocol = proto.name;
    u.variant = bc.variant;
    double n_T = w.n_T();
    double per_block = double(u.t_u_ticks) / bc.ticks * proto.k * rate_success(proto, hw.p);
    u.factories = int(std::ceil(n_T / per_block - 1e-9));
    u.data_tiles = blocks::tile_formula(BlockKind::fast, 2 * w.n);
    u.factory_tiles = size_t(u.factories) * size_t(bc.tiles);
    size_t corr = size_t(std::ceil(n_T - 1e-9));
    u.storage_tiles = arr == Arrangement::linear ? 2 * corr : corr;
    size_t parts = u.data_tiles + u.factory_tiles + u.storage_tiles;
    u.unit_tiles = parts;
    if (arr == Arrangement::linear)
        for (auto &f : unit_footprints())
            if (f.protocol == proto.name && f.n == w.n && std::abs(f.n_T - n_T) < 1e-9) {
                size_t box = size_t(f.width) * size_t(f.height);
                if (box < parts) throw InvariantError("published unit outline is smaller than its parts");
                u.footprint_w = f.width;
                u.footprint_h = f.height;
                u.unused_tiles = box - parts;
                u.unit_tiles = box;
            }
    u.end_unit_tiles = u.data_tiles + size_t((u.factories + 1) / 2) * size_t(bc.tiles) + corr;
    u.unit_qubits = double(u.unit_tiles) * hw.overhead * u.d * u.d;
    u.total_tiles = n_u * u.unit_tiles;
    u.total_tiles_trimmed = arr == Arrangement::linear ? (n_u - 2) * u.unit_tiles + 2 * u.end_unit_tiles : u.total_tiles;
    u.total_qubits = double(u.total_tiles) * hw.overhead * u.d * u.d;

    u.exceeds_max = n_u > u.n_max;
    u.n_u_effective = std::min(n_u, u.n_max);
    size_t layers = arr == Arrangement::linear ? u.n_u_effective - 1 : u.n_u_effective;
    u.t_per_tu = n_T * double(layers);
    u.seconds = std::max(w.t_count / u.t_per_tu * u.t_u_seconds, w.t_depth * hw.t_m);
    u.st_cost_d3 = double(u.total_tiles) * (u.seconds / (u.d * hw.t_cycle));
    return u;
}

// ---------------------------------------------------------------------------
// entanglement between units

struct EntanglementReport {
    bool feasible = false;
    double needed_raw = 0;      // raw Bell pairs per unit boundary per t_u
    double deliverable = 0;     // raw pairs the link supplies per t_u
    double deficit = 0;         // missing raw pairs per t_u
    double extra_tiles = 0;     // distillation space, tiles_per_pair per raw pair held
};

/// `bell_rate` in raw pairs per second (infinity allowed); `ratio` raw pairs
/// consumed per distilled pair; the unit boundary needs n pairs per t_u.
inline EntanglementReport entanglement_budget(const UnitPlan &u, size_t n, double bell_rate, double ratio,
                                              double tiles_per_pair = 1) {
    if (!(bell_rate > 0) || !(ratio >= 1)) throw DimensionError("Bell rate must be positive and the ratio at least 1");
    EntanglementReport r;
    r.needed_raw = double(n) * ratio;
    r.deliverable = bell_rate * u.t_u_seconds;
    double slack = 1e-9 * r.needed_raw;
    r.feasible = r.deliverable + slack >= r.needed_raw;
    r.deficit = r.feasible ? 0 : r.needed_raw - r.deliverable;
    r.extra_tiles = ratio > 1 ? (ratio - 1) * double(n) * tiles_per_pair : 0;
    return r;
}

// ---------------------------------------------------------------------------
// Clifford+phi layers

struct PhiLayerTime {
    double mean = 0, stderr_ = 0;  // Monte Carlo, in units of t_m
    double exact = 0;              // closed form
    int depth = 0;                 // resource states per rotation for the stall target
    uint64_t trials = 0;
};

/// Expected maximum over r rotations of the number of measurement steps,
/// each finishing with probability 1/2 per step.
inline double phi_layer_mean_exact(size_t r) {
    double s = 0;
    for (int n = 0; n < 2000; n++) {
        double term = 1 - std::pow(1 - std::ldexp(1.0, -n), double(r));
        s += term;
        if (term < 1e-17 && n > 4) break;
    }
    return s;
}

/// Resource states per rotation so that a cascade outlasts them with
/// probability below `target`.
inline int phi_depth(double target) {
    if (!(target > 0) || target >= 1) throw DimensionError("stall target must be in (0, 1)");
    int D = 0;
    while (std::ldexp(1.0, -D) >= target) D++;
    return D;
}

inline PhiLayerTime phi_layer_time(size_t rotations, uint64_t trials = 1000000, uint64_t seed = 1,
                                   double stall_target = 1e-6) {
    if (rotations < 1) throw DimensionError("a layer needs at least one rotation");
    if (trials < 2) throw DimensionError("need at least two trials");
    Philox4x32 rng(seed, 0);
    double sum = 0, sq = 0;
    for (uint64_t t = 0; t < trials; t++) {
        int worst = 0;
        for (size_t r = 0; r < rotations; r++) {
            // steps until the first success: 1 + trailing zeros of random bits
            int steps = 1;
            for (;;) {
                uint32_t x = rng();
                if (x) {
                    steps += std::countr_zero(x);
                    break;
                }
                steps += 32;
            }
            worst = std::max(worst, steps);
        }
        sum += worst;
        sq += double(worst) * worst;
    }
    PhiLayerTime out;
    out.trials = trials;
    out.mean = sum / double(trials);
    out.stderr_ = std::sqrt(std::max(0.0, sq / double(trials) - out.mean * out.mean) / double(trials - 1));
    out.exact = phi_layer_mean_exact(rotations);
    out.depth = phi_depth(stall_target);
    return out;
}

// ---------------------------------------------------------------------------
// trade-off ladder

struct LadderRow {
    std::string scheme;       // A, B, C..K, L..P
    std::string arrangement;  // "" for T-count-limited rows
    std::string description;
    size_t tiles = 0;
    int d = 0;
    double qubits = 0;
    double ticks = 0;  // total ticks of the computation
    double seconds = 0;
    double st_cost = 0;  // qubits * seconds
};

/// Unit counts for rows L.. ; the last row is the time-optimal chain.
inline std::vector<size_t> ladder_unit_counts(size_t n_max) {
    std::vector<size_t> v;
    for (size_t k : {size_t(2), size_t(3), size_t(10), size_t(100)})
        if (k < n_max) v.push_back(k);
    v.push_back(n_max);
    return v;
}

/// Minimal (A), intermediate (B), fast with a growing number of factories
/// (C..), then units from 2 up to the time-optimal count in both
/// arrangements. Every row uses the minimal setup's code distance.
inline std::vector<LadderRow> tradeoff_curve(const Workload &w, const Hardware &hw) {
    std::vector<LadderRow> rows;
    char letter = 'A';
    auto from_setup = [&](const Setup &s, std::string desc) {
        rows.push_back({std::string(1, letter++), "", std::move(desc), s.tiles, s.distance.d, s.qubits, s.total_ticks,
                        s.seconds, s.qubits * s.seconds});
    };
    Setup a = assemble_setup(w, hw, Strategy::minimal);
    int d = a.distance.d;
    SetupOptions fixed;
    fixed.distance = d;
    from_setup(a, "compact block, 1 x " + a.protocol);
    Setup b = assemble_setup(w, hw, Strategy::intermediate, fixed);
    from_setup(b, "intermediate block, " + std::to_string(b.factories) + " x " + b.protocol);
    Setup top = assemble_setup(w, hw, Strategy::fast, fixed);
    for (int f = 1; f <= top.factories; f++) {
        SetupOptions o = fixed;
        o.factories = f;
        Setup s = assemble_setup(w, hw, Strategy::fast, o);
        if (s.ticks_per_t >= b.ticks_per_t - 1e-12) continue;  // no faster than B
        from_setup(s, "fast block, " + std::to_string(f) + " x " + s.protocol);
    }
    size_t n_max_lin = unit_plan(w, hw, 2, Arrangement::linear, d).n_max;
    for (size_t k : ladder_unit_counts(n_max_lin)) {
        std::string name(1, letter++);
        for (auto arr : {Arrangement::circular, Arrangement::linear}) {
            size_t count = k;
            if (arr == Arrangement::circular && k == n_max_lin) count = n_max_lin - 1;
            auto u = unit_plan(w, hw, count, arr, d);
            rows.push_back({name, arrangement_name(arr), std::to_string(count) + " units", u.total_tiles, d,
                            u.total_qubits, u.seconds / (d * hw.t_cycle), u.seconds, u.total_qubits * u.seconds});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// steady-state check by discrete-event simulation

struct SteadyState {
    double ticks_per_t = 0;
    uint64_t consumed = 0, ticks = 0;
};

/// Factories finish every block-duration (staggered), each run succeeding
/// with the protocol's success probability; the data block takes
/// `consumption` ticks per state whenever one is stored.
inline SteadyState simulate_setup(const Setup &s, const Hardware &hw, const std::vector<int> &consumption,
                                  uint64_t ticks = 1000000, uint64_t seed = 1) {
    if (consumption.empty()) throw DimensionError("need at least one consumption duration");
    const auto &proto = find_protocol(s.protocol);
    auto bc = block_cost(proto, s.variant);
    double q = success_probability(proto, hw.p);
    Philox4x32 rng(seed, 0);
    std::vector<double> next(static_cast<size_t>(s.factories));
    for (int f = 0; f < s.factories; f++) next[size_t(f)] = double(bc.ticks) * (f + 1) / s.factories;
    uint64_t stored = 0, busy_until = 0, consumed = 0;
    size_t ci = 0;
    for (uint64_t t = 0; t < ticks; t++) {
        for (auto &nt : next)
            while (nt <= double(t) + 1e-9) {
                if (rng.uniform() < q) stored += uint64_t(proto.k);
                nt += bc.ticks;
            }
        if (t >= busy_until && stored > 0) {
            stored--;
            consumed++;
            busy_until = t + uint64_t(consumption[ci++ % consumption.size()]);
        }
    }
    return {consumed ? double(ticks) / double(consumed) : INFINITY, consumed, ticks};
}

// ---------------------------------------------------------------------------
// report rounding

/// Round to `sig` significant figures.
inline double round_sig(double v, int sig = 3) {
    if (v == 0 || !std::isfinite(v)) return v;
    double e = std::floor(std::log10(std::abs(v))) - sig + 1;
    double m = std::pow(10.0, e);
    return std::round(v / m) * m;
}

inline std::string with_commas(double v) {
    auto s = std::to_string((long long)std::llround(v));
    std::string out;
    int c = 0;
    for (size_t i = s.size(); i-- > 0;) {
        out.insert(out.begin(), s[i]);
        if (++c % 3 == 0 && i > 0 && s[i - 1] != '-') out.insert(out.begin(), ',');
    }
    return out;
}

inline std::string display_qubits(double q) { return with_commas(round_sig(q, 3)); }

/// Hours from 1.5 h, minutes from 10 min, seconds below.
inline std::string display_time(double seconds) {
    if (seconds >= 5400) return std::to_string(std::llround(seconds / 3600)) + " h";
    if (seconds >= 600) return std::to_string(std::llround(seconds / 60)) + " min";
    return std::to_string(std::llround(seconds)) + " sec";
}

}  // namespace patchwork::estimator
