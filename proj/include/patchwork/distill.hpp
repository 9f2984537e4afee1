#pragma once

// Triorthogonal matrices, the distillation circuits read off them, and the
// closed-form error / success / cost models of the registered protocols.

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "patchwork/logical_sim.hpp"
#include "patchwork/rng.hpp"

namespace patchwork {

// ---------------------------------------------------------------------------
// binary matrices

enum class MatrixClass { strict, semi, code, correction };

inline std::string class_name(MatrixClass c) {
    switch (c) {
        case MatrixClass::strict: return "strict";
        case MatrixClass::semi: return "semi";
        case MatrixClass::code: return "code";
        case MatrixClass::correction: return "correction";
    }
    return "?";
}

struct BinMatrix {
    std::vector<std::vector<uint8_t>> a;
    MatrixClass cls = MatrixClass::strict;
    /// Number of leading stabilizer rows (code matrices only).
    size_t stabilizers = 0;

    BinMatrix() = default;
    BinMatrix(std::vector<std::string> rows, MatrixClass c = MatrixClass::strict, size_t stab = 0)
        : cls(c), stabilizers(stab) {
        for (auto &r : rows) {
            std::vector<uint8_t> v;
            for (char ch : r) {
                if (ch != '0' && ch != '1') throw ParseError("matrix entries must be 0 or 1");
                v.push_back(uint8_t(ch - '0'));
            }
            if (!a.empty() && v.size() != a[0].size()) throw DimensionError("ragged matrix");
            a.push_back(v);
        }
    }

    size_t rows() const { return a.size(); }
    size_t cols() const { return a.empty() ? 0 : a[0].size(); }
    size_t logicals() const { return rows() - stabilizers; }
    uint8_t operator()(size_t r, size_t c) const { return a[r][c]; }

    size_t row_weight(size_t r) const {
        size_t s = 0;
        for (auto x : a[r]) s += x;
        return s;
    }
    size_t col_weight(size_t c) const {
        size_t s = 0;
        for (auto &r : a) s += r[c];
        return s;
    }
    std::vector<uint8_t> column(size_t c) const {
        std::vector<uint8_t> v;
        for (auto &r : a) v.push_back(r[c]);
        return v;
    }
    bool same_entries(const BinMatrix &o) const { return a == o.a; }
    bool operator==(const BinMatrix &o) const { return a == o.a && cls == o.cls && stabilizers == o.stabilizers; }

    std::string str() const {
        std::string s;
        for (auto &r : a) {
            for (auto x : r) s += char('0' + x);
            s += '\n';
        }
        return s;
    }
};

/// Text form: comment lines start with '#', then a header
/// "matrix <rows> <cols> <class> [<stabilizer rows>]", then one line of
/// 0/1 characters per row.
inline BinMatrix parse_matrix(std::istream &in) {
    std::string line;
    int lineno = 0;
    std::optional<BinMatrix> m;
    size_t want_rows = 0, want_cols = 0;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        if (!m) {
            if (tok != "matrix") throw ParseError("expected 'matrix <rows> <cols> <class>' header", lineno);
            std::string cls;
            if (!(ss >> want_rows >> want_cols >> cls)) throw ParseError("bad matrix header", lineno);
            m.emplace();
            if (cls == "strict") m->cls = MatrixClass::strict;
            else if (cls == "semi") m->cls = MatrixClass::semi;
            else if (cls == "code") m->cls = MatrixClass::code;
            else if (cls == "correction") m->cls = MatrixClass::correction;
            else throw ParseError("unknown matrix class '" + cls + "'", lineno);
            if (m->cls == MatrixClass::code && !(ss >> m->stabilizers))
                throw ParseError("code matrix header needs the stabilizer row count", lineno);
            continue;
        }
        if (tok.size() != want_cols) throw ParseError("row has " + std::to_string(tok.size()) + " entries", lineno);
        if (tok.find_first_not_of("01") != std::string::npos) throw ParseError("matrix entries must be 0 or 1", lineno);
        rows.push_back(tok);
    }
    if (!m) throw ParseError("empty matrix file");
    if (rows.size() != want_rows) throw ParseError("expected " + std::to_string(want_rows) + " rows");
    BinMatrix out(rows, m->cls, m->stabilizers);
    if (out.stabilizers > out.rows()) throw ParseError("stabilizer count exceeds rows");
    return out;
}

inline BinMatrix load_matrix(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matrix file " + path);
    return parse_matrix(in);
}

inline std::string data_path(const std::string &rel) { return std::string(PATCHWORK_DATA_DIR) + "/" + rel; }

inline void write_matrix(std::ostream &out, const BinMatrix &m) {
    out << "matrix " << m.rows() << " " << m.cols() << " " << class_name(m.cls);
    if (m.cls == MatrixClass::code) out << " " << m.stabilizers;
    out << "\n" << m.str();
}

// ---------------------------------------------------------------------------
// triorthogonality

enum class TriorthLevel { strict, semi, quarter };

struct TriorthReport {
    bool ok = true;
    std::string violation;
};

/// strict: weights mod 8, pair overlaps mod 4, triple overlaps mod 2.
/// semi: all three mod 2. quarter (pi/4-level codes): weights mod 4, pairs mod 2.
inline TriorthReport check_triorthogonal(const BinMatrix &G, TriorthLevel level = TriorthLevel::strict) {
    if (G.rows() == 0 || G.cols() == 0) throw DimensionError("check_triorthogonal: empty matrix");
    size_t m1 = 8, m2 = 4, m3 = 2;
    if (level == TriorthLevel::semi) m1 = m2 = 2;
    if (level == TriorthLevel::quarter) m1 = 4, m2 = 2, m3 = 0;
    size_t R = G.rows(), C = G.cols();
    for (size_t a = 0; a < R; a++)
        if (G.row_weight(a) % m1) return {false, "row " + std::to_string(a) + " weight " + std::to_string(G.row_weight(a))};
    for (size_t a = 0; a < R; a++)
        for (size_t b = a + 1; b < R; b++) {
            size_t s = 0;
            for (size_t i = 0; i < C; i++) s += G(a, i) & G(b, i);
            if (s % m2) return {false, "rows " + std::to_string(a) + "," + std::to_string(b) + " overlap " + std::to_string(s)};
        }
    if (m3)
        for (size_t a = 0; a < R; a++)
            for (size_t b = a + 1; b < R; b++)
                for (size_t c = b + 1; c < R; c++) {
                    size_t s = 0;
                    for (size_t i = 0; i < C; i++) s += G(a, i) & G(b, i) & G(c, i);
                    if (s % m3)
                        return {false, "rows " + std::to_string(a) + "," + std::to_string(b) + "," +
                                           std::to_string(c) + " overlap " + std::to_string(s)};
                }
    return {};
}

/// Undo puncturing: one unit column per logical row, in front.
inline BinMatrix g_form(const BinMatrix &M) {
    BinMatrix G = M;
    G.cls = MatrixClass::strict;
    size_t k = M.logicals();
    for (size_t r = 0; r < M.rows(); r++) {
        std::vector<uint8_t> unit(k, 0);
        if (r >= M.stabilizers) unit[r - M.stabilizers] = 1;
        G.a[r].insert(G.a[r].begin(), unit.begin(), unit.end());
    }
    G.stabilizers = 0;
    return G;
}

/// Reduced row echelon form over GF(2) with the natural pivot order, then
/// rows reversed and the pivot columns moved (stably) to the front, so the
/// leading block is an anti-diagonal identity.
inline BinMatrix echelon(const BinMatrix &G) {
    BinMatrix E = G;
    size_t R = E.rows(), C = E.cols(), r = 0;
    std::vector<size_t> pivots;
    for (size_t c = 0; c < C && r < R; c++) {
        size_t p = r;
        while (p < R && !E.a[p][c]) p++;
        if (p == R) continue;
        std::swap(E.a[p], E.a[r]);
        for (size_t q = 0; q < R; q++)
            if (q != r && E.a[q][c])
                for (size_t j = 0; j < C; j++) E.a[q][j] ^= E.a[r][j];
        pivots.push_back(c);
        r++;
    }
    E.a.resize(r);  // drop dependent rows
    std::reverse(E.a.begin(), E.a.end());
    std::vector<size_t> order = pivots;
    for (size_t c = 0; c < C; c++)
        if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) order.push_back(c);
    for (auto &row : E.a) {
        std::vector<uint8_t> nr;
        for (auto c : order) nr.push_back(row[c]);
        row = nr;
    }
    return E;
}

/// Echelon form, then remove the first k columns (each must contain a
/// single 1). Even-weight rows become stabilizers, odd-weight rows logicals.
inline BinMatrix puncture(const BinMatrix &G, size_t k) {
    BinMatrix E = echelon(G);
    if (k > E.cols()) throw DimensionError("puncture: more columns than the matrix has");
    for (size_t c = 0; c < k; c++)
        if (E.col_weight(c) != 1)
            throw InvariantError("puncture: only " + std::to_string(c) + " leading weight-1 columns, need " +
                                 std::to_string(k));
    BinMatrix M;
    M.cls = MatrixClass::code;
    std::vector<std::vector<uint8_t>> stab, logi;
    for (auto &row : E.a) {
        std::vector<uint8_t> nr(row.begin() + long(k), row.end());
        size_t w = 0;
        for (auto x : nr) w += x;
        (w % 2 ? logi : stab).push_back(nr);
    }
    M.stabilizers = stab.size();
    M.a = stab;
    M.a.insert(M.a.end(), logi.begin(), logi.end());
    return M;
}

// ---------------------------------------------------------------------------
// circuit extraction

struct DistillationCircuit {
    size_t qubits = 0, stabilizers = 0;
    /// pi/2^level rotations: 3 for magic states, 2 for |Y> states.
    int level = 3;
    std::vector<Prep> init;
    std::vector<PauliRotation> rotations;
    std::vector<PauliRotation> correction;
    /// Code column behind each injected state: first the absorbed columns
    /// (one per qubit they were folded into), then one per rotation.
    std::vector<size_t> absorbed_qubit;  // qubit per absorbed column
    size_t inputs() const { return absorbed_qubit.size() + rotations.size(); }
    size_t outputs() const { return qubits - stabilizers; }
};

/// Column pairs that, appended to M, make its G form strictly triorthogonal.
/// Each pair becomes a Z-type pi/4 rotation on the rows where it has a 1.
struct CorrectionSearch {
    std::optional<std::vector<std::vector<uint8_t>>> pairs;
    bool from_seed = false;
    size_t candidates_tried = 0;
    size_t max_pairs = 0;
};

inline bool completes(const BinMatrix &M, const std::vector<std::vector<uint8_t>> &pairs) {
    BinMatrix X = M;
    for (auto &v : pairs)
        for (size_t r = 0; r < X.rows(); r++) X.a[r].push_back(v[r]), X.a[r].push_back(v[r]);
    return check_triorthogonal(g_form(X)).ok;
}

/// Breadth-first over multisets of column pairs, supported on the rows that
/// take part in a violation. `max_width` counts columns (two per pair).
inline CorrectionSearch find_correction(const BinMatrix &M, const std::optional<BinMatrix> &seed = std::nullopt,
                                        size_t max_width = 8) {
    CorrectionSearch out;
    out.max_pairs = max_width / 2;
    if (check_triorthogonal(g_form(M)).ok) {
        out.pairs = std::vector<std::vector<uint8_t>>{};
        return out;
    }
    if (seed) {
        if (seed->rows() != M.rows()) throw DimensionError("correction seed has the wrong number of rows");
        if (seed->cols() % 2) throw InvariantError("correction seed must have an even number of columns");
        std::vector<std::vector<uint8_t>> pairs;
        bool paired = true;
        for (size_t c = 0; c + 1 < seed->cols(); c += 2) {
            if (seed->column(c) != seed->column(c + 1)) paired = false;
            pairs.push_back(seed->column(c));
        }
        out.candidates_tried++;
        if (paired && completes(M, pairs)) {
            out.pairs = pairs;
            out.from_seed = true;
            return out;
        }
    }
    // rows involved in weight or pair violations
    BinMatrix G = g_form(M);
    std::vector<size_t> rows;
    for (size_t a = 0; a < M.rows(); a++) {
        bool bad = G.row_weight(a) % 8 != 0;
        for (size_t b = 0; b < M.rows() && !bad; b++) {
            if (b == a) continue;
            size_t s = 0;
            for (size_t i = 0; i < G.cols(); i++) s += G(a, i) & G(b, i);
            bad = s % 4 != 0;
        }
        if (bad) rows.push_back(a);
    }
    if (rows.size() > 16) throw CapacityError("correction search over " + std::to_string(rows.size()) + " rows");
    std::vector<std::vector<uint8_t>> cand;
    for (uint32_t s = 1; s < (1u << rows.size()); s++) {
        std::vector<uint8_t> v(M.rows(), 0);
        for (size_t j = 0; j < rows.size(); j++) v[rows[j]] = uint8_t(s >> j & 1);
        cand.push_back(v);
    }
    // multisets of size w in non-decreasing index order
    for (size_t w = 1; w <= out.max_pairs; w++) {
        std::vector<size_t> idx(w, 0);
        while (true) {
            std::vector<std::vector<uint8_t>> pick;
            for (auto i : idx) pick.push_back(cand[i]);
            out.candidates_tried++;
            if (completes(M, pick)) {
                out.pairs = pick;
                return out;
            }
            size_t j = w;
            while (j > 0 && idx[j - 1] == cand.size() - 1) j--;
            if (j == 0) break;
            idx[j - 1]++;
            for (size_t t = j; t < w; t++) idx[t] = idx[j - 1];
        }
    }
    return out;
}

/// One |+> per row (stabilizers first), one Z-type pi/2^level rotation per
/// column. Weight-1 columns are absorbed into the initial state of their row.
/// For semi-triorthogonal codes pass the correction pairs; they become
/// Z-type -pi/4 rotations after the pi/8 rotations.
inline DistillationCircuit extract_circuit(const BinMatrix &M, int level = 3,
                                           const std::vector<std::vector<uint8_t>> &correction = {}) {
    if (M.cls != MatrixClass::code) throw InvariantError("extract_circuit needs a code matrix");
    if (level != 2 && level != 3) throw InvariantError("extract_circuit: level must be 2 (pi/4) or 3 (pi/8)");
    DistillationCircuit c;
    c.qubits = M.rows();
    c.stabilizers = M.stabilizers;
    c.level = level;
    if (c.qubits > kDefaultSimBound) throw CapacityError("distillation circuit on " + std::to_string(c.qubits) + " qubits");
    c.init.assign(c.qubits, Prep::plus());
    auto zaxis = [&](const std::vector<uint8_t> &col) {
        PauliString p(c.qubits);
        for (size_t r = 0; r < c.qubits; r++)
            if (col[r]) p.set(r, 'Z');
        return p;
    };
    for (size_t j = 0; j < M.cols(); j++) {
        auto col = M.column(j);
        if (M.col_weight(j) == 0) throw InvariantError("code matrix has an empty column");
        if (M.col_weight(j) == 1) {
            size_t r = size_t(std::find(col.begin(), col.end(), 1) - col.begin());
            bool fresh = c.init[r].label == StateLabel::plus;
            if (fresh) {
                c.init[r] = level == 3 ? Prep::magic() : Prep::y();
                c.absorbed_qubit.push_back(r);
                continue;
            }
        }
        c.rotations.emplace_back(zaxis(col), Angle::pi_over(level));
    }
    for (auto &v : correction) {
        if (v.size() != c.qubits) throw DimensionError("correction column has the wrong length");
        c.correction.emplace_back(zaxis(v), Angle::pi_over(2, -1));
    }
    return c;
}

/// Merge the correction into the circuit: single-qubit pieces turn |m> into
/// |mbar>, the rest add to an equal-axis rotation. Pieces with no partner
/// stay in the correction list.
inline DistillationCircuit fold_correction(DistillationCircuit c) {
    std::vector<PauliRotation> rest;
    for (auto &corr : c.correction) {
        bool done = false;
        if (corr.axis.weight() == 1) {
            size_t q = 0;
            while (corr.axis.letter(q) == 'I') q++;
            if (c.init[q].label == StateLabel::magic && corr.angle == Angle::pi_over(2, -1)) {
                c.init[q] = Prep::magic_bar();
                done = true;
            }
        }
        for (auto &r : c.rotations)
            if (!done && r.axis == corr.axis) {
                r.angle = r.angle + corr.angle;
                done = true;
            }
        if (!done) rest.push_back(corr);
    }
    c.correction = rest;
    return c;
}

// ---------------------------------------------------------------------------
// protocol registry and closed-form models

struct BlockCost {
    std::string variant;
    int tiles = 0;
    int ticks = 0;
};

struct ProtocolSpec {
    std::string name;
    int n = 0, k = 0, m_x = 0;
    /// explicit rotations in the extracted circuit
    int rotations = 0;
    /// output error = coef * p^exp; `total` means for all k outputs together
    double err_coef = 0;
    int err_exp = 0;
    bool err_total = false;
    int level = 3;
    std::vector<BlockCost> blocks;  // first entry is the default variant
    std::string matrix_file;        // code matrix, if bundled
    std::string correction_file;    // Clifford-correction seed, if any
    /// Concatenation: level-1 protocol and the number of level-1 blocks.
    std::string inner;
    int inner_blocks = 0;
    std::string note;
};

inline const std::vector<ProtocolSpec> &protocol_registry() {
    static const std::vector<ProtocolSpec> reg = {
        {"15-to-1", 15, 1, 4, 11, 35, 3, false, 3, {{"default", 11, 11}, {"modified", 12, 11}}, "matrices/m15.txt", "", "", 0, ""},
        {"14-to-2", 14, 2, 3, 11, 7, 2, false, 3, {}, "matrices/m14.txt", "", "", 0, ""},
        {"20-to-4", 20, 4, 3, 17, 22, 2, true, 3, {{"default", 14, 17}}, "matrices/m20.txt", "matrices/m20_correction.txt", "", 0,
         "errors of the four outputs are correlated"},
        {"7-to-1", 7, 1, 3, 4, 7, 3, false, 2, {{"default", 7, 4}}, "matrices/steane7.txt", "", "", 0, "distills |Y> states"},
        {"116-to-12", 116, 12, 17, 99, 41.25, 4, false, 3, {{"compact", 44, 99}, {"wide", 81, 50}, {"modified", 93, 53}}, "", "", "", 0,
         "closed-form model only"},
        {"912-to-112", 912, 112, 64, 848, 10.63, 6, false, 3, {{"wide", 440, 424}}, "", "", "", 0, "closed-form model only"},
        {"225-to-1", 225, 1, 0, 15, 1500625, 9, false, 3, {{"default", 176, 15}}, "", "", "15-to-1", 11,
         "two levels of 15-to-1"},
    };
    return reg;
}

inline const ProtocolSpec &find_protocol(const std::string &name) {
    for (auto &p : protocol_registry())
        if (p.name == name) return p;
    throw InvariantError("unknown distillation protocol '" + name + "'");
}

inline BlockCost block_cost(const ProtocolSpec &p, const std::string &variant = "") {
    if (p.blocks.empty()) {
        // generic layout of the compact construction
        double tiles = 1.5 * (p.m_x + p.k) + 4;
        return {"generic", int(std::ceil(tiles)), p.n - p.m_x};
    }
    if (variant.empty()) return p.blocks.front();
    for (auto &b : p.blocks)
        if (b.variant == variant) return b;
    throw InvariantError("protocol " + p.name + " has no '" + variant + "' block");
}

struct ErrorModel {
    double total = 0, per_state = 0;
    bool correlated = false;
};

inline ErrorModel error_model(const ProtocolSpec &p, double perr) {
    if (perr < 0 || perr >= 1) throw DimensionError("input error rate must be in [0, 1)");
    ErrorModel e;
    if (p.name == "225-to-1") {
        double inner = 35 * std::pow(perr, 3);
        e.total = e.per_state = 35 * std::pow(inner, 3);
        return e;
    }
    double v = p.err_coef * std::pow(perr, p.err_exp);
    if (p.err_total) {
        e.total = v;
        e.per_state = v / p.k;
        e.correlated = p.k > 1;
    } else {
        e.per_state = v;
        e.total = v * p.k;
    }
    return e;
}

inline double success_probability(const ProtocolSpec &p, double perr) {
    if (p.name == "225-to-1") return std::pow(1 - 35 * std::pow(perr, 3), 15);
    return std::pow(1 - perr, p.n);
}

/// [1.5(m_x + k) + 4](n - m_x) / (k (1-p)^n), in units of d^3.
inline double cost_per_state(int n, int m_x, int k, double p) {
    if (p < 0 || p >= 1) throw DimensionError("cost_per_state: p must be in [0, 1)");
    if (k <= 0 || n < m_x) throw DimensionError("cost_per_state: bad code parameters");
    return (1.5 * (m_x + k) + 4) * (n - m_x) / (k * std::pow(1 - p, n));
}

/// Tabulated block: tiles * ticks / (k * success), in units of d^3.
inline double block_cost_per_state(const ProtocolSpec &p, double perr, const std::string &variant = "") {
    auto b = block_cost(p, variant);
    return double(b.tiles) * b.ticks / (p.k * success_probability(p, perr));
}

/// Average ticks between output states of one block.
inline double ticks_per_state(const ProtocolSpec &p, double perr, const std::string &variant = "") {
    auto b = block_cost(p, variant);
    return b.ticks / (p.k * success_probability(p, perr));
}

// ---------------------------------------------------------------------------
// two-level pipeline

struct PipelineResult {
    double level1_period = 0;   // ticks between level-1 states arriving (steady state)
    double output_period = 0;   // mean ticks per accepted level-2 output
    double skip_rate = 0;       // fraction of level-2 time steps without an input
    double cost_d3 = 0;         // tiles * output_period / k
    uint64_t ticks = 0, outputs = 0;
};

/// Event-driven run of `blocks` level-1 blocks feeding one level-2 block,
/// one level-1 state per tick at most. Level-1 blocks are staggered so that
/// their completions spread evenly. The level-2 block takes one state per
/// time step it rotates; a step without a state is skipped. `d_ratio`
/// scales level-1 tick length (reduced-distance lower levels).
inline PipelineResult concatenated_throughput(const ProtocolSpec &outer, double perr, uint64_t ticks = 2000000,
                                              uint64_t seed = 1, double d_ratio = 1.0) {
    if (outer.inner.empty() || outer.inner_blocks <= 0) throw InvariantError(outer.name + " is not a concatenated protocol");
    const auto &inner = find_protocol(outer.inner);
    auto ib = block_cost(inner);
    int blocks = outer.inner_blocks;
    double q1 = std::pow(1 - perr, inner.n);
    double q2 = std::pow(1 - error_model(inner, perr).per_state, inner.n);
    int needed = inner.n;  // level-2 rotations, one input state each
    if (d_ratio <= 0 || d_ratio > 1) throw DimensionError("d_ratio must be in (0, 1]");
    double inner_ticks = ib.ticks * d_ratio;
    Philox4x32 rng(seed, 0);
    // next completion time of every level-1 block
    std::vector<double> next(static_cast<size_t>(blocks));
    for (int b = 0; b < blocks; b++) next[size_t(b)] = inner_ticks * (b + 1) / blocks;
    PipelineResult r;
    uint64_t buffered = 0, consumed = 0, steps = 0, skipped = 0;
    for (uint64_t t = 1; t <= ticks; t++) {
        for (auto &nt : next)
            while (nt <= double(t)) {
                if (rng.uniform() < q1) buffered++;
                nt += inner_ticks;
            }
        steps++;
        if (buffered > 0) {
            buffered--;
            consumed++;
            if (consumed == uint64_t(needed)) {
                consumed = 0;
                if (rng.uniform() < q2) r.outputs++;
            }
        } else {
            skipped++;
        }
        buffered = std::min<uint64_t>(buffered, 1);  // a single transfer slot
    }
    r.ticks = ticks;
    r.level1_period = inner_ticks / blocks;
    r.skip_rate = double(skipped) / double(steps);
    r.output_period = r.outputs ? double(ticks) / double(r.outputs) : INFINITY;
    auto ob = block_cost(outer);
    r.cost_d3 = ob.tiles * r.output_period / outer.k;
    return r;
}

}  // namespace patchwork
