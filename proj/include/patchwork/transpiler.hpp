#pragma once

// Clifford+T (and Clifford+phi) circuits to canonical form: layers of
// mutually commuting non-Clifford rotations, a trailing Clifford frame and
// terminal Pauli product measurements.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <variant>

#include "patchwork/rotation.hpp"

namespace patchwork {

/// C(P_1, ..., P_m): applies -1 on the joint (-1, ..., -1) eigenspace of
/// the mutually commuting P_j. For m = 2 this is the P_1-controlled-P_2 gate.
struct ControlledGate {
    std::vector<PauliString> paulis;
};

struct NamedGate {
    std::string name;
    std::vector<size_t> targets;
};

using CircuitElement = std::variant<PauliRotation, ControlledGate, NamedGate, PauliMeasurement>;

struct GateCircuit {
    size_t num_qubits = 0;
    std::vector<CircuitElement> elements;

    explicit GateCircuit(size_t n = 0) : num_qubits(n) {}
    GateCircuit &add(CircuitElement e) {
        elements.push_back(std::move(e));
        return *this;
    }
};

struct RotationLayer {
    std::vector<PauliRotation> rotations;
};

struct CanonicalCircuit {
    size_t num_qubits = 0;
    std::vector<RotationLayer> layers;
    std::vector<PauliMeasurement> measurements;
    /// Clifford (pi/4) and Pauli (pi/2) rotations in time order, applied
    /// after all layers. Original axes, kept for audit and replay.
    std::vector<PauliRotation> clifford_frame;

    std::vector<PauliRotation> rotations() const {
        std::vector<PauliRotation> r;
        for (auto &l : layers) r.insert(r.end(), l.rotations.begin(), l.rotations.end());
        return r;
    }
    bool operator==(const CanonicalCircuit &o) const {
        if (num_qubits != o.num_qubits || layers.size() != o.layers.size() || measurements != o.measurements ||
            clifford_frame != o.clifford_frame)
            return false;
        for (size_t i = 0; i < layers.size(); i++)
            if (layers[i].rotations != o.layers[i].rotations) return false;
        return true;
    }
};

struct CircuitMetrics {
    size_t t_count = 0, t_depth = 0, rotation_count = 0, rotation_depth = 0;
    bool operator==(const CircuitMetrics &) const = default;
};

// ---------------------------------------------------------------------------
// decompositions

/// 2^m - 1 rotations of magnitude pi/2^m, one per non-empty subset S of the
/// m operators, with sign (-1)^{|S|}. The subsets are emitted with the full
/// product first, then by decreasing size, later operators first. They mutually commute.
inline std::vector<PauliRotation> multi_controlled_to_rotations(const std::vector<PauliString> &paulis) {
    size_t m = paulis.size();
    if (m < 2) throw InvariantError("multi-controlled gate needs at least two Pauli operators, got " + std::to_string(m));
    if (m > 30) throw CapacityError("multi-controlled gate with " + std::to_string(m) + " operators");
    for (size_t i = 0; i < m; i++) {
        if (paulis[i].phase_exp() != 0 || paulis[i].is_identity())
            throw InvariantError("multi-controlled operators must be non-identity with phase +1");
        for (size_t j = i + 1; j < m; j++)
            if (!paulis[i].commutes(paulis[j])) throw InvariantError("multi-controlled operators must commute");
    }
    std::vector<uint32_t> subsets;
    for (uint32_t s = 1; s < (1u << m); s++) subsets.push_back(s);
    std::sort(subsets.begin(), subsets.end(), [](uint32_t a, uint32_t b) {
        int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa > pb : a > b;
    });
    std::vector<PauliRotation> out;
    for (uint32_t s : subsets) {
        PauliString p(paulis[0].num_qubits());
        for (size_t j = 0; j < m; j++)
            if (s >> j & 1) p = p * paulis[j];
        int sign = (std::popcount(s) % 2 == 0) ? 1 : -1;
        // the product of commuting Hermitian Paulis is Hermitian (phase +-1)
        out.emplace_back(p, Angle::pi_over(int(m), sign));
    }
    return out;
}

inline const std::set<std::string> &supported_gate_names() {
    static const std::set<std::string> names = {"H",    "S",  "SDG", "T",   "TDG",     "X",  "Y",
                                                "Z",    "CX", "CNOT", "CZ", "TOFFOLI", "CCX", "CCZ"};
    return names;
}

inline std::vector<PauliRotation> named_gate_to_rotations(const NamedGate &g, size_t n) {
    std::string name = g.name;
    std::transform(name.begin(), name.end(), name.begin(), ::toupper);
    if (name == "S†" || name == "SDAG") name = "SDG";
    if (name == "T†" || name == "TDAG") name = "TDG";
    if (!supported_gate_names().count(name)) throw InvariantError("unknown gate '" + g.name + "'");
    size_t arity = 1;
    if (name == "CX" || name == "CNOT" || name == "CZ") arity = 2;
    if (name == "TOFFOLI" || name == "CCX" || name == "CCZ") arity = 3;
    if (g.targets.size() != arity)
        throw InvariantError("gate " + g.name + " takes " + std::to_string(arity) + " targets");
    std::set<size_t> distinct(g.targets.begin(), g.targets.end());
    if (distinct.size() != arity) throw InvariantError("gate " + g.name + " has repeated targets");
    for (auto t : g.targets)
        if (t >= n) throw DimensionError("gate " + g.name + " target " + std::to_string(t) + " out of range");
    auto on = [&](size_t q, char c) { return PauliString::single(n, q, c); };
    size_t a = g.targets[0];
    if (name == "H") return {{on(a, 'Z'), Angle::pi_over(2)}, {on(a, 'X'), Angle::pi_over(2)}, {on(a, 'Z'), Angle::pi_over(2)}};
    if (name == "S") return {{on(a, 'Z'), Angle::pi_over(2)}};
    if (name == "SDG") return {{on(a, 'Z'), Angle::pi_over(2, -1)}};
    if (name == "T") return {{on(a, 'Z'), Angle::pi_over(3)}};
    if (name == "TDG") return {{on(a, 'Z'), Angle::pi_over(3, -1)}};
    if (name == "X" || name == "Y" || name == "Z") return {{on(a, name[0]), Angle::pi_over(1)}};
    size_t b = g.targets[1];
    if (name == "CX" || name == "CNOT") return multi_controlled_to_rotations({on(a, 'Z'), on(b, 'X')});
    if (name == "CZ") return multi_controlled_to_rotations({on(a, 'Z'), on(b, 'Z')});
    size_t c = g.targets[2];
    if (name == "CCZ") return multi_controlled_to_rotations({on(a, 'Z'), on(b, 'Z'), on(c, 'Z')});
    return multi_controlled_to_rotations({on(a, 'Z'), on(b, 'Z'), on(c, 'X')});
}

/// All rotations of a circuit in time order (measurements excluded).
inline std::vector<PauliRotation> flatten_rotations(const GateCircuit &c) {
    std::vector<PauliRotation> out;
    for (auto &e : c.elements) {
        if (auto *r = std::get_if<PauliRotation>(&e)) {
            if (r->num_qubits() != c.num_qubits) throw DimensionError("rotation width differs from circuit width");
            out.push_back(*r);
        } else if (auto *cg = std::get_if<ControlledGate>(&e)) {
            for (auto &p : cg->paulis)
                if (p.num_qubits() != c.num_qubits) throw DimensionError("controlled-gate width differs from circuit width");
            auto rs = multi_controlled_to_rotations(cg->paulis);
            out.insert(out.end(), rs.begin(), rs.end());
        } else if (auto *g = std::get_if<NamedGate>(&e)) {
            auto rs = named_gate_to_rotations(*g, c.num_qubits);
            out.insert(out.end(), rs.begin(), rs.end());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Clifford conjugation

/// C^dagger P C for C = exp(-i theta Q), theta a multiple of pi/4. Returns a
/// Hermitian Pauli with its sign in the phase.
inline PauliString conjugate_by(const PauliString &P, const PauliRotation &C) {
    if (P.commutes(C.axis)) return P;
    const Angle &a = C.angle;
    if (a.is_zero()) return P;
    if (a.is_pauli()) return P.negated();
    if (!a.is_clifford()) throw InvariantError("conjugate_by: " + C.str() + " is not a Clifford rotation");
    // theta = +-pi/4: P exp(-2 i theta Q) = -+ i P Q
    PauliString pq = P * C.axis;
    return pq.times_i(a.numerator() > 0 ? 3 : 1);
}

namespace detail {

/// Split an angle into a non-Clifford part with |phi| < pi/4 (or zero) and a
/// Clifford remainder (zero, pi/4 or pi/2 multiple).
inline std::pair<Angle, Angle> split_angle(const Angle &a) {
    if (a.is_dyadic()) {
        if (a.power() <= 2) return {Angle::zero(), a};
        // a = num pi / 2^k, |num| < 2^{k-1}. If |a| > pi/4 shift by pi/2.
        int64_t quarter = int64_t{1} << (a.power() - 2);
        int64_t num = a.numerator();
        if (num > quarter) return {Angle::dyadic(num - 2 * quarter, a.power()), Angle::pi_over(1)};
        if (num < -quarter) return {Angle::dyadic(num + 2 * quarter, a.power()), Angle::pi_over(1)};
        return {a, Angle::zero()};
    }
    double r = a.to_radians(), q = std::numbers::pi / 4;
    if (r > q) return {Angle::radians(r - 2 * q), Angle::pi_over(1)};
    if (r < -q) return {Angle::radians(r + 2 * q), Angle::pi_over(1)};
    return {a, Angle::zero()};
}

inline bool commutes_with_all(const PauliRotation &r, const RotationLayer &l) {
    for (auto &o : l.rotations)
        if (!r.axis.commutes(o.axis)) return false;
    return true;
}

/// Conjugate everything "after" a Clifford that is being moved to the end.
inline void push_through(CanonicalCircuit &c, size_t from_layer, const PauliRotation &C) {
    for (size_t i = from_layer; i < c.layers.size(); i++)
        for (auto &r : c.layers[i].rotations) r = PauliRotation(conjugate_by(r.axis, C), r.angle);
    for (auto &m : c.measurements) {
        auto b = conjugate_by(m.signed_basis(), C);
        m = PauliMeasurement(b);
    }
    c.clifford_frame.insert(c.clifford_frame.begin(), C);
}

/// Add `r` to `layer`, merging with an equal axis. Returns a Clifford
/// rotation if the merge produced one (it has been removed from the layer).
inline std::optional<PauliRotation> add_to_layer(RotationLayer &layer, const PauliRotation &r) {
    for (size_t k = 0; k < layer.rotations.size(); k++) {
        auto &o = layer.rotations[k];
        if (o.axis == r.axis) {
            Angle sum = o.angle + r.angle;
            auto [small, cliff] = split_angle(sum);
            if (small.is_zero()) {
                layer.rotations.erase(layer.rotations.begin() + long(k));
            } else {
                o.angle = small;
            }
            if (!cliff.is_zero()) return PauliRotation(r.axis, cliff);
            return std::nullopt;
        }
    }
    layer.rotations.push_back(r);
    return std::nullopt;
}

}  // namespace detail

/// Move every Clifford to the end of the circuit. The non-Clifford rotations
/// (conjugated) are grouped naively: a new layer starts whenever a rotation
/// fails to commute with the current layer.
inline CanonicalCircuit push_clifford_right(const GateCircuit &c) {
    CanonicalCircuit out;
    out.num_qubits = c.num_qubits;
    std::vector<PauliRotation> frame;  // time order, original axes
    std::vector<bool> measured(c.num_qubits, false);
    auto conj_frame = [&](PauliString p) {
        for (size_t k = frame.size(); k-- > 0;) p = conjugate_by(p, frame[k]);
        return p;
    };
    auto touches_measured = [&](const PauliString &p) {
        for (size_t q = 0; q < p.num_qubits(); q++)
            if (p.letter(q) != 'I' && measured[q]) return true;
        return false;
    };
    auto emit = [&](const PauliRotation &r) {
        if (touches_measured(r.axis)) throw InvariantError("unsupported element: operation after measurement");
        auto [small, cliff] = detail::split_angle(r.angle);
        if (!small.is_zero()) {
            PauliRotation t(conj_frame(r.axis), small);
            if (out.layers.empty() || !detail::commutes_with_all(t, out.layers.back())) out.layers.push_back({});
            auto extra = detail::add_to_layer(out.layers.back(), t);
            if (extra) {
                // extra is expressed on the conjugated axis; moving it to the
                // end needs no further conjugation (nothing follows yet)
                // except ordering: it acts before the current frame.
                frame.insert(frame.begin(), *extra);
            }
            if (out.layers.back().rotations.empty()) out.layers.pop_back();
        }
        if (!cliff.is_zero()) frame.push_back(PauliRotation(r.axis, cliff));
    };
    for (auto &e : c.elements) {
        if (auto *m = std::get_if<PauliMeasurement>(&e)) {
            if (m->num_qubits() != c.num_qubits) throw DimensionError("measurement width differs from circuit width");
            if (touches_measured(m->basis)) throw InvariantError("unsupported element: qubit measured twice");
            out.measurements.push_back(*m);
            for (size_t q = 0; q < c.num_qubits; q++)
                if (m->basis.letter(q) != 'I') measured[q] = true;
            continue;
        }
        GateCircuit one(c.num_qubits);
        one.elements.push_back(e);
        for (auto &r : flatten_rotations(one)) emit(r);
    }
    for (auto &m : out.measurements) m = PauliMeasurement(conj_frame(m.signed_basis()));
    out.clifford_frame = frame;
    return out;
}

/// Algorithm 1: repeatedly move rotations from layer i+1 into layer i when
/// they commute with all of layer i. Equal axes merge; Clifford results of a
/// merge are commuted to the end.
inline CanonicalCircuit compress_layers(CanonicalCircuit c) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < c.layers.size(); i++) {
            auto &next = c.layers[i + 1].rotations;
            for (size_t j = 0; j < next.size();) {
                if (!detail::commutes_with_all(next[j], c.layers[i])) {
                    j++;
                    continue;
                }
                PauliRotation r = next[j];
                next.erase(next.begin() + long(j));
                changed = true;
                auto extra = detail::add_to_layer(c.layers[i], r);
                if (extra) detail::push_through(c, i + 1, *extra);
            }
        }
        auto empty = [](const RotationLayer &l) { return l.rotations.empty(); };
        c.layers.erase(std::remove_if(c.layers.begin(), c.layers.end(), empty), c.layers.end());
    }
    return c;
}

inline CircuitMetrics metrics(const CanonicalCircuit &c) {
    CircuitMetrics m;
    for (auto &l : c.layers) {
        size_t t = 0, r = 0;
        for (auto &rot : l.rotations) {
            t += rot.angle.is_t_level();
            r += rot.angle.is_non_clifford();
        }
        m.t_count += t;
        m.rotation_count += r;
        m.t_depth += t > 0;
        m.rotation_depth += r > 0;
    }
    return m;
}

/// Every pair within a layer commutes and no axis repeats.
inline bool layers_valid(const CanonicalCircuit &c) {
    for (auto &l : c.layers)
        for (size_t a = 0; a < l.rotations.size(); a++)
            for (size_t b = a + 1; b < l.rotations.size(); b++)
                if (!l.rotations[a].axis.commutes(l.rotations[b].axis) || l.rotations[a].axis == l.rotations[b].axis)
                    return false;
    return true;
}

/// Canonical input order: one rotation per layer, exactly as naive pushing
/// would emit them before grouping. Used to build naive layerings by hand.
inline CanonicalCircuit from_layers(size_t n, std::vector<std::vector<PauliRotation>> layers) {
    CanonicalCircuit c;
    c.num_qubits = n;
    for (auto &l : layers) c.layers.push_back({std::move(l)});
    return c;
}

// ---------------------------------------------------------------------------
// text format
//
//   # comment
//   qubits N
//   ROT <signed axis> <angle>        angle: num/2^k (units of pi), 0, or <real>r
//   GATE <name> <q0> [<q1> [<q2>]]   H S SDG T TDG X Y Z CX CNOT CZ TOFFOLI CCX CCZ
//   CTRL <signed axis> <signed axis> [...]   multi-controlled Pauli gate
//   MEAS <signed axis>

inline GateCircuit parse_circuit(std::istream &in) {
    GateCircuit c;
    bool have_n = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::string kw;
        if (!(ss >> kw)) continue;
        std::vector<std::string> args;
        for (std::string a; ss >> a;) args.push_back(a);
        auto pauli = [&](const std::string &s) {
            try {
                auto p = PauliString::from_str(s);
                if (p.num_qubits() != c.num_qubits)
                    throw ParseError("axis '" + s + "' has " + std::to_string(p.num_qubits()) + " letters, expected " +
                                         std::to_string(c.num_qubits),
                                     lineno);
                return p;
            } catch (const ParseError &e) {
                if (e.line) throw;
                throw ParseError(e.what(), lineno);
            }
        };
        try {
            if (kw == "qubits") {
                if (have_n) throw ParseError("qubit count given twice", lineno);
                if (args.size() != 1) throw ParseError("usage: qubits N", lineno);
                int n = 0;
                try {
                    n = std::stoi(args[0]);
                } catch (const std::logic_error &) {
                    throw ParseError("bad qubit count '" + args[0] + "'", lineno);
                }
                if (n < 1) throw ParseError("qubit count must be positive", lineno);
                c.num_qubits = size_t(n);
                have_n = true;
                continue;
            }
            if (!have_n) throw ParseError("'qubits N' must come first", lineno);
            if (kw == "ROT") {
                if (args.size() != 2) throw ParseError("usage: ROT <axis> <angle>", lineno);
                Angle a;
                try {
                    a = Angle::parse(args[1]);
                } catch (const ParseError &e) {
                    throw ParseError(e.what(), lineno);
                }
                c.add(PauliRotation(pauli(args[0]), a));
            } else if (kw == "GATE") {
                if (args.empty()) throw ParseError("usage: GATE <name> <targets>", lineno);
                NamedGate g{args[0], {}};
                for (size_t i = 1; i < args.size(); i++) {
                    try {
                        size_t used = 0;
                        long v = std::stol(args[i], &used);
                        if (used != args[i].size() || v < 0) throw std::invalid_argument("");
                        g.targets.push_back(size_t(v));
                    } catch (const std::logic_error &) {
                        throw ParseError("bad target '" + args[i] + "'", lineno);
                    }
                }
                named_gate_to_rotations(g, c.num_qubits);  // validate now for a line number
                c.add(g);
            } else if (kw == "CTRL") {
                if (args.size() < 2) throw ParseError("usage: CTRL <axis> <axis> [...]", lineno);
                ControlledGate g;
                for (auto &a : args) g.paulis.push_back(pauli(a));
                multi_controlled_to_rotations(g.paulis);
                c.add(g);
            } else if (kw == "MEAS") {
                if (args.size() != 1) throw ParseError("usage: MEAS <axis>", lineno);
                c.add(PauliMeasurement(pauli(args[0])));
            } else {
                throw ParseError("unknown keyword '" + kw + "'", lineno);
            }
        } catch (const ParseError &) {
            throw;
        } catch (const std::exception &e) {
            throw ParseError(e.what(), lineno);
        }
    }
    // a file with no instructions at all is the empty circuit
    return c;
}

inline GateCircuit parse_circuit(const std::string &text) {
    std::istringstream ss(text);
    return parse_circuit(ss);
}

}  // namespace patchwork
