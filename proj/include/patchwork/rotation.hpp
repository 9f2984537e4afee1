#pragma once

#include <string>

#include "patchwork/angle.hpp"
#include "patchwork/pauli.hpp"

namespace patchwork {

/// exp(-i P phi). The axis always has phase +1; a negative axis is folded
/// into the angle.
struct PauliRotation {
    PauliString axis;
    Angle angle;

    PauliRotation() = default;
    PauliRotation(PauliString p, Angle a) : axis(std::move(p)), angle(a) {
        if (axis.phase_exp() & 1) throw InvariantError("rotation axis must be Hermitian: " + axis.str());
        if (axis.phase_exp() == 2) angle = -angle;
        axis.set_phase_exp(0);
    }
    PauliRotation(std::string_view p, Angle a) : PauliRotation(PauliString::from_str(p), a) {}

    size_t num_qubits() const { return axis.num_qubits(); }
    bool operator==(const PauliRotation &o) const { return axis == o.axis && angle == o.angle; }
    std::string str() const { return axis.str() + " " + angle.str(); }
};

struct PauliMeasurement {
    PauliString basis;
    int sign = 1;

    PauliMeasurement() = default;
    PauliMeasurement(PauliString p, int s = 1) : basis(std::move(p)), sign(s) {
        if (basis.phase_exp() & 1) throw InvariantError("measurement basis must be Hermitian: " + basis.str());
        if (basis.phase_exp() == 2) sign = -sign;
        basis.set_phase_exp(0);
        if (sign != 1 && sign != -1) throw InvariantError("measurement sign must be +-1");
        if (basis.is_identity()) throw InvariantError("measurement basis is the identity");
    }
    PauliMeasurement(std::string_view p) : PauliMeasurement(PauliString::from_str(p)) {}

    PauliString signed_basis() const { return sign > 0 ? basis : basis.negated(); }
    size_t num_qubits() const { return basis.num_qubits(); }
    bool operator==(const PauliMeasurement &o) const { return basis == o.basis && sign == o.sign; }
    std::string str() const { return signed_basis().str(); }
};

}  // namespace patchwork
