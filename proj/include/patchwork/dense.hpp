#pragma once

// Dense-matrix views of Pauli objects. Only meant for small registers; used as
// an oracle by the tests and by --verify in the CLI.

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "patchwork/rotation.hpp"

namespace patchwork {

using Matrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline constexpr size_t kDefaultDenseBound = 6;

inline Matrix pauli_letter_matrix(char c) {
    Matrix m(2, 2);
    switch (c) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw DimensionError("bad Pauli letter");
    }
    return m;
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++)
        for (Eigen::Index j = 0; j < a.cols(); j++)
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

/// Qubit 0 is the leftmost Kronecker factor.
inline Matrix to_matrix(const PauliString &p, size_t bound = 10) {
    if (p.num_qubits() > bound)
        throw CapacityError("dense matrix of " + std::to_string(p.num_qubits()) + " qubits exceeds bound " +
                            std::to_string(bound));
    Matrix m = Matrix::Identity(1, 1);
    for (size_t q = 0; q < p.num_qubits(); q++) m = kron(m, pauli_letter_matrix(p.letter(q)));
    return p.phase() * m;
}

/// exp(-i P phi) = cos(phi) I - i sin(phi) P
inline Matrix as_unitary(const PauliRotation &r, size_t bound = kDefaultDenseBound) {
    if (r.num_qubits() > bound)
        throw CapacityError("rotation on " + std::to_string(r.num_qubits()) + " qubits exceeds dense bound " +
                            std::to_string(bound));
    Matrix p = to_matrix(r.axis, bound);
    double phi = r.angle.to_radians();
    return std::cos(phi) * Matrix::Identity(p.rows(), p.cols()) - cplx(0, std::sin(phi)) * p;
}

/// min over global phase t of ||A - e^{it} B||_F / sqrt(dim). The optimal
/// phase is aligned explicitly so the result keeps full precision near zero.
inline double projective_distance(const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("projective_distance: shape mismatch");
    cplx overlap = (b.adjoint() * a).trace();
    cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx(1, 0);
    return (a - phase * b).norm() / std::sqrt(double(a.cols()));
}

/// Largest deviation of U^dagger U from the identity.
inline double unitarity_error(const Matrix &u) {
    return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace patchwork
