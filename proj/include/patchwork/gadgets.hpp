#pragma once

// Measurement-based rotation gadgets as measurement programs. In every
// gadget `P` is an axis on the full register that acts as identity on the
// ancilla qubits; corrections are appended as conditional rotations so that
// the program as a whole implements the target rotation exactly.

#include "patchwork/program.hpp"

namespace patchwork::gadgets {

namespace detail {
inline PauliString with(const PauliString &base, size_t q, char c) {
    PauliString p = base;
    if (p.letter(q) != 'I') throw DimensionError("gadget: ancilla qubit overlaps the rotation axis");
    p.set(q, c);
    return p;
}
inline PauliString on(size_t n, size_t q, char c) { return PauliString::single(n, q, c); }
inline void check_axis(const PauliString &p) {
    if (p.is_identity()) throw InvariantError("gadget: identity axis");
    if (p.phase_exp() != 0) throw InvariantError("gadget: axis must carry phase +1");
}
}  // namespace detail

/// P_{pi/8} by consuming |m>: measure P (x) Z_m, then X_m. A -1 on the first
/// measurement calls for P_{pi/4}, a -1 on the second for P.
inline void consume_magic(Program &prog, const PauliString &P, size_t m) {
    detail::check_axis(P);
    size_t n = prog.num_qubits;
    prog.prepare(m, Prep::magic());
    size_t s1 = prog.measure(detail::with(P, m, 'Z'), "P.Zm");
    size_t s2 = prog.measure(detail::on(n, m, 'X'), "Xm");
    prog.release(m);
    prog.rotate(PauliRotation(P, Angle::pi_over(2)), Condition::outcome(s1, -1), "clifford correction");
    prog.rotate(PauliRotation(P, Angle::pi_over(1)), Condition::outcome(s2, -1), "pauli correction");
}

/// P_{sign pi/4} by consuming |Y>: measure P (x) Z_a, then X on the
/// ancilla. Outcomes that agree give P_{pi/4}, differing ones P_{-pi/4}; a
/// Pauli P fixes the wrong sign.
inline void consume_y(Program &prog, const PauliString &P, size_t a, int sign = 1) {
    detail::check_axis(P);
    size_t n = prog.num_qubits;
    prog.prepare(a, Prep::y());
    size_t s1 = prog.measure(detail::with(P, a, 'Z'), "P.Za");
    size_t s2 = prog.measure(detail::on(n, a, 'X'), "Xa");
    prog.release(a);
    prog.rotate(PauliRotation(P, Angle::pi_over(1)), Condition::parity({s1, s2}, sign > 0 ? -1 : 1),
                "pauli correction");
}

/// P_{pi/4} with a |0> ancilla: measure -P (x) Y, then X on the ancilla.
/// Differing outcomes call for a P correction.
inline void pi4_via_y(Program &prog, const PauliString &P, size_t a) {
    detail::check_axis(P);
    size_t n = prog.num_qubits;
    prog.prepare(a, Prep::zero());
    size_t s1 = prog.measure(PauliMeasurement(detail::with(P, a, 'Y'), -1), "-P.Ya");
    size_t s2 = prog.measure(detail::on(n, a, 'X'), "Xa");
    prog.release(a);
    prog.rotate(PauliRotation(P, Angle::pi_over(1)), Condition::parity({s1, s2}, -1), "pauli correction");
}

/// Selective P_{pi/4}: the -P (x) Y measurement is always made; reading the
/// ancilla in X performs the rotation, reading it in Z performs identity.
inline void selective_pi4(Program &prog, const PauliString &P, size_t a, bool perform) {
    detail::check_axis(P);
    size_t n = prog.num_qubits;
    prog.prepare(a, Prep::zero());
    size_t s1 = prog.measure(PauliMeasurement(detail::with(P, a, 'Y'), -1), "-P.Ya");
    size_t s2 = prog.measure(detail::on(n, a, perform ? 'X' : 'Z'), perform ? "Xa" : "Za");
    prog.release(a);
    Condition fix = perform ? Condition::parity({s1, s2}, -1) : Condition::outcome(s2, -1);
    prog.rotate(PauliRotation(P, Angle::pi_over(1)), fix, "pauli correction");
}

namespace detail {
/// The c readout: X when `x_when` holds, Z otherwise. Returns its slot and
/// appends the Pauli correction. `zy` is the Z_m (x) Y_c outcome, `pz` the
/// P (x) Z_m outcome, `xm` the X_m outcome.
inline void correction_readout(Program &prog, const PauliString &P, size_t c, size_t pz, size_t zy, size_t xm,
                               int sign) {
    size_t n = prog.num_qubits;
    // +pi/8 needs the pi/4 fix when P.Zm = -1; -pi/8 when P.Zm = +1
    int x_value = sign > 0 ? -1 : 1;
    Condition use_x = Condition::outcome(pz, x_value);
    Condition use_z = Condition::outcome(pz, -x_value);
    size_t rc = prog.measure_either(on(n, c, 'Z'), on(n, c, 'X'), use_x, "Zc|Xc");
    prog.release(c);
    Condition fix = (use_z && Condition::parity({xm, rc}, -1)) || (use_x && Condition::parity({zy, xm, rc}, -1));
    prog.rotate(PauliRotation(P, Angle::pi_over(1)), fix, "pauli correction");
}
}  // namespace detail

/// Auto-corrected P_{sign pi/8}: measure P (x) Z_m and Z_m (x) Y_c together,
/// X on |m>, then |c> in X (apply the pi/4 fix) or Z (skip it).
inline void auto_corrected_pi8(Program &prog, const PauliString &P, size_t m, size_t c, int sign = 1) {
    detail::check_axis(P);
    size_t n = prog.num_qubits;
    prog.prepare(m, Prep::magic());
    prog.prepare(c, Prep::zero());
    size_t pz = prog.measure(detail::with(P, m, 'Z'), "P.Zm");
    PauliString zy = detail::on(n, m, 'Z');
    zy.set(c, 'Y');
    size_t szy = prog.measure(zy, "Zm.Yc");
    size_t xm = prog.measure(detail::on(n, m, 'X'), "Xm");
    prog.release(m);
    detail::correction_readout(prog, P, c, pz, szy, xm, sign);
}

/// Post-corrected pi/8, part 1: the |m>-|c> resource state.
struct PostCorrected {
    size_t m, c, zy = 0, pz = 0, xm = 0;
    PauliString P;
};

inline PostCorrected post_corrected_resource(Program &prog, size_t m, size_t c) {
    size_t n = prog.num_qubits;
    prog.prepare(m, Prep::magic());
    prog.prepare(c, Prep::zero());
    PauliString zy = detail::on(n, m, 'Z');
    zy.set(c, 'Y');
    PostCorrected pc{m, c};
    pc.zy = prog.measure(zy, "Zm.Yc");
    return pc;
}

/// Part 2: consume |m> along P; |c> stays alive.
inline void post_corrected_consume(Program &prog, PostCorrected &pc, const PauliString &P) {
    detail::check_axis(P);
    pc.P = P;
    pc.pz = prog.measure(detail::with(P, pc.m, 'Z'), "P.Zm");
    pc.xm = prog.measure(detail::on(prog.num_qubits, pc.m, 'X'), "Xm");
    prog.release(pc.m);
}

/// Part 3: decide the sign late by the choice of |c> basis.
inline void post_corrected_decide(Program &prog, const PostCorrected &pc, int sign) {
    detail::correction_readout(prog, pc.P, pc.c, pc.pz, pc.zy, pc.xm, sign);
}

/// Controlled-P2 on the P1 = -1 eigenspace: (P1 P2)_{pi/4} (P2)_{-pi/4} (P1)_{-pi/4}.
inline void controlled_pauli(Program &prog, const PauliString &P1, const PauliString &P2) {
    prog.rotate(PauliRotation(P1 * P2, Angle::pi_over(2)));
    prog.rotate(PauliRotation(P2, Angle::pi_over(2, -1)));
    prog.rotate(PauliRotation(P1, Angle::pi_over(2, -1)));
}

/// Post-corrected P_phi cascade with resources |2^j phi>, j = 0..L-1, all
/// entangled by one C(P, X^{(x)L}). Resource j is read in Z while every
/// earlier Z readout gave -1 (the rotation came out as its negative); once a
/// +1 is seen the remaining resources are discarded in X.
/// Returns the slots of the resource readouts. If all L readouts give -1 the
/// applied rotation is P_{-(2^L - 1) phi}; callers treat that as a stall.
inline std::vector<size_t> phi_cascade(Program &prog, const PauliString &P, const std::vector<size_t> &resources,
                                       double phi) {
    detail::check_axis(P);
    size_t n = prog.num_qubits;
    PauliString xs(n);
    for (size_t j = 0; j < resources.size(); j++) {
        prog.prepare(resources[j], Prep::rotated(std::ldexp(phi, int(j))));
        xs = xs * detail::on(n, resources[j], 'X');
        if (P.letter(resources[j]) != 'I') throw DimensionError("phi_cascade: resource overlaps the axis");
    }
    controlled_pauli(prog, P, xs);
    std::vector<size_t> slots;
    Condition done;  // some earlier Z readout gave +1
    bool first = true;
    for (size_t j = 0; j < resources.size(); j++) {
        size_t r = resources[j];
        size_t s;
        if (first) {
            s = prog.measure(detail::on(n, r, 'Z'), "Zr");
        } else {
            s = prog.measure_either(detail::on(n, r, 'Z'), detail::on(n, r, 'X'), done, "Zr|Xr");
            prog.rotate(PauliRotation(P, Angle::pi_over(1)), done && Condition::outcome(s, -1), "pauli correction");
        }
        // success at j: all earlier readouts -1 and this one +1
        Condition here = Condition::outcome(s, 1);
        for (auto prev : slots) here = here && Condition::outcome(prev, -1);
        done = first ? here : (done || here);
        first = false;
        slots.push_back(s);
        prog.release(r);
    }
    return slots;
}

}  // namespace patchwork::gadgets
