#pragma once

// Dense equivalence check between a gate circuit and its canonical form.
// The gate side is built from the textbook matrices of the named gates, not
// from their rotation decompositions.

#include <cmath>
#include <numbers>

#include "patchwork/dense.hpp"
#include "patchwork/transpiler.hpp"

namespace patchwork {

/// 1 - 2 prod_j (1 - P_j) / 2
inline Matrix controlled_unitary(const std::vector<PauliString> &ps, size_t bound = kDefaultDenseBound) {
    size_t n = ps.front().num_qubits();
    if (n > bound) throw CapacityError("controlled gate on " + std::to_string(n) + " qubits exceeds dense bound");
    Matrix id = Matrix::Identity(Eigen::Index(1) << n, Eigen::Index(1) << n);
    Matrix proj = id;
    for (auto &p : ps) proj = proj * (id - to_matrix(p, bound)) * 0.5;
    return id - 2 * proj;
}

inline Matrix named_gate_unitary(const NamedGate &g, size_t n, size_t bound = kDefaultDenseBound) {
    std::string name = g.name;
    std::transform(name.begin(), name.end(), name.begin(), ::toupper);
    if (name == "S†" || name == "SDAG") name = "SDG";
    if (name == "T†" || name == "TDAG") name = "TDG";
    // validates arity and targets
    named_gate_to_rotations(g, n);
    auto on = [&](size_t k, char c) { return PauliString::single(n, g.targets[k], c); };
    if (name == "CX" || name == "CNOT") return controlled_unitary({on(0, 'Z'), on(1, 'X')}, bound);
    if (name == "CZ") return controlled_unitary({on(0, 'Z'), on(1, 'Z')}, bound);
    if (name == "TOFFOLI" || name == "CCX") return controlled_unitary({on(0, 'Z'), on(1, 'Z'), on(2, 'X')}, bound);
    if (name == "CCZ") return controlled_unitary({on(0, 'Z'), on(1, 'Z'), on(2, 'Z')}, bound);
    Matrix z = to_matrix(on(0, 'Z'), bound), id = Matrix::Identity(z.rows(), z.cols());
    Matrix p1 = (id - z) * 0.5;  // projector on |1> of the target
    if (name == "H") return (to_matrix(on(0, 'X'), bound) + z) / std::sqrt(2.0);
    if (name == "X" || name == "Y" || name == "Z") return to_matrix(on(0, name[0]), bound);
    double phase = name == "S" ? 0.5 : name == "SDG" ? -0.5 : name == "T" ? 0.25 : -0.25;
    return id + (std::polar(1.0, phase * std::numbers::pi) - 1.0) * p1;
}

/// Unitary of the circuit's gates and rotations (measurements ignored).
inline Matrix circuit_unitary(const GateCircuit &c, size_t bound = kDefaultDenseBound) {
    if (c.num_qubits > bound)
        throw CapacityError("circuit on " + std::to_string(c.num_qubits) + " qubits exceeds dense bound");
    Matrix u = Matrix::Identity(Eigen::Index(1) << c.num_qubits, Eigen::Index(1) << c.num_qubits);
    for (auto &e : c.elements) {
        if (auto *r = std::get_if<PauliRotation>(&e)) u = as_unitary(*r, bound) * u;
        else if (auto *cg = std::get_if<ControlledGate>(&e)) u = controlled_unitary(cg->paulis, bound) * u;
        else if (auto *g = std::get_if<NamedGate>(&e)) u = named_gate_unitary(*g, c.num_qubits, bound) * u;
    }
    return u;
}

/// Layers in order, then the Clifford frame.
inline Matrix canonical_unitary(const CanonicalCircuit &c, size_t bound = kDefaultDenseBound) {
    if (c.num_qubits > bound)
        throw CapacityError("circuit on " + std::to_string(c.num_qubits) + " qubits exceeds dense bound");
    Matrix u = Matrix::Identity(Eigen::Index(1) << c.num_qubits, Eigen::Index(1) << c.num_qubits);
    for (auto &r : c.rotations()) u = as_unitary(r, bound) * u;
    for (auto &r : c.clifford_frame) u = as_unitary(r, bound) * u;
    return u;
}

}  // namespace patchwork
