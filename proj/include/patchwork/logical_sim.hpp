#pragma once

// Dense state-vector simulator for logical qubits. It is the oracle the other
// modules check themselves against, so it favours directness over speed.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <tuple>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "patchwork/rng.hpp"
#include "patchwork/rotation.hpp"

namespace patchwork {

using cplx = std::complex<double>;

inline constexpr size_t kDefaultSimBound = 14;

enum class StateLabel { zero, plus, magic, magic_bar, y, phi };

/// A single-qubit state to prepare. `phi` is only used by StateLabel::phi:
/// |phi> = |0> + e^{2 i phi} |1>.
struct Prep {
    StateLabel label = StateLabel::zero;
    double phi = 0.0;

    static Prep zero() { return {StateLabel::zero}; }
    static Prep plus() { return {StateLabel::plus}; }
    static Prep magic() { return {StateLabel::magic}; }
    static Prep magic_bar() { return {StateLabel::magic_bar}; }
    static Prep y() { return {StateLabel::y}; }
    static Prep rotated(double phi) { return {StateLabel::phi, phi}; }

    /// Pauli eigenstates are prepared exactly; everything else is injected.
    bool is_pauli_eigenstate() const { return label == StateLabel::zero || label == StateLabel::plus; }

    std::array<cplx, 2> amplitudes() const {
        const double r = 1 / std::sqrt(2.0);
        switch (label) {
            case StateLabel::zero: return {1.0, 0.0};
            case StateLabel::plus: return {r, r};
            case StateLabel::magic: return {r, r * std::polar(1.0, std::numbers::pi / 4)};
            case StateLabel::magic_bar: return {r, r * std::polar(1.0, -std::numbers::pi / 4)};
            case StateLabel::y: return {r, cplx(0, r)};
            case StateLabel::phi: return {r, r * std::polar(1.0, 2 * phi)};
        }
        return {1.0, 0.0};
    }

    std::string str() const {
        switch (label) {
            case StateLabel::zero: return "|0>";
            case StateLabel::plus: return "|+>";
            case StateLabel::magic: return "|m>";
            case StateLabel::magic_bar: return "|mbar>";
            case StateLabel::y: return "|Y>";
            case StateLabel::phi: return "|phi(" + std::to_string(phi) + ")>";
        }
        return "?";
    }
};

/// Injected-state noise. `uniform`: a uniformly random non-identity Pauli
/// with probability p. `dephasing`: a Z error with probability p; this is
/// the reading under which a faulty injected T rotation is P_{pi/8} * P.
struct NoiseSpec {
    enum class Channel { uniform, dephasing };
    double p = 0.0;
    Channel channel = Channel::uniform;
};

class LogicalState {
  public:
    explicit LogicalState(size_t n, size_t bound = kDefaultSimBound) : n_(n), fresh_(n, true) {
        if (n == 0) throw DimensionError("LogicalState needs at least one qubit");
        if (n > bound)
            throw CapacityError("simulator bound is " + std::to_string(bound) + " qubits, requested " +
                                std::to_string(n));
        amps_.assign(size_t{1} << n, 0.0);
        amps_[0] = 1.0;
    }

    /// First log2(data.size()) qubits hold `data`; the rest are fresh |0>.
    static LogicalState with_data(size_t n, const std::vector<cplx> &data, size_t bound = kDefaultSimBound) {
        LogicalState s(n, bound);
        size_t k = std::countr_zero(data.size());
        if ((size_t{1} << k) != data.size() || k > n) throw DimensionError("with_data: bad data register size");
        std::fill(s.amps_.begin(), s.amps_.end(), 0.0);
        for (size_t i = 0; i < data.size(); i++) s.amps_[i << (n - k)] = data[i];
        for (size_t q = 0; q < k; q++) s.fresh_[q] = false;
        return s;
    }

    size_t num_qubits() const { return n_; }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    std::vector<cplx> &amplitudes() { return amps_; }
    bool is_fresh(size_t q) const { return fresh_.at(q); }

    double norm() const {
        double s = 0;
        for (auto &a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    /// Set a fresh qubit to `prep`, then apply the injection noise.
    void prepare(size_t q, const Prep &prep, const NoiseSpec &noise = {}, Philox4x32 *rng = nullptr) {
        check_qubit(q);
        if (!fresh_[q]) throw InvariantError("prepare: qubit " + std::to_string(q) + " is in use");
        auto [a, b] = prep.amplitudes();
        size_t bit = mask(q);
        for (size_t i = 0; i < amps_.size(); i++) {
            if (i & bit) continue;
            cplx v = amps_[i];
            amps_[i] = a * v;
            amps_[i | bit] = b * v;
        }
        fresh_[q] = false;
        if (noise.p > 0 && !prep.is_pauli_eigenstate()) {
            if (!rng) throw InvariantError("prepare: noisy preparation needs an RNG");
            if (rng->uniform() < noise.p) {
                char c = 'Z';
                if (noise.channel == NoiseSpec::Channel::uniform) c = "XYZ"[(*rng)() % 3];
                apply_pauli(PauliString::single(n_, q, c));
            }
        }
    }

    /// P|psi>, including the string's phase.
    std::vector<cplx> pauli_image(const PauliString &p) const {
        check_dims(p);
        auto [xm, zm, ny] = masks(p);
        cplx ph = p.phase() * ipow(ny);
        std::vector<cplx> out(amps_.size());
        for (size_t i = 0; i < amps_.size(); i++) {
            double s = (std::popcount(i & zm) & 1) ? -1.0 : 1.0;
            out[i ^ xm] = ph * s * amps_[i];
        }
        return out;
    }

    void apply_pauli(const PauliString &p) {
        amps_ = pauli_image(p);
        touch(p);
    }

    /// exp(-i P phi)
    void apply_rotation(const PauliRotation &r) {
        check_dims(r.axis);
        if (r.angle.is_zero()) return;
        auto img = pauli_image(r.axis);
        double phi = r.angle.to_radians();
        double c = std::cos(phi), s = std::sin(phi);
        if (r.angle.is_pauli()) c = 0, s = r.angle.numerator() > 0 ? 1 : -1;
        for (size_t i = 0; i < amps_.size(); i++) amps_[i] = c * amps_[i] - cplx(0, s) * img[i];
        touch(r.axis);
    }

    /// Born probability of outcome `outcome` (+-1) for the signed basis.
    double probability(const PauliMeasurement &m, int outcome) const {
        auto img = pauli_image(m.basis);
        double s = double(m.sign * outcome), tot = 0;
        for (size_t i = 0; i < amps_.size(); i++) tot += std::norm(0.5 * (amps_[i] + s * img[i]));
        return tot;
    }

    /// Measure; returns the outcome. `forced` selects the outcome (it must
    /// have non-zero probability); otherwise it is sampled from `rng`.
    int measure(const PauliMeasurement &m, std::optional<int> forced = std::nullopt, Philox4x32 *rng = nullptr,
                double *branch_probability = nullptr, double zero_tol = 1e-12) {
        auto img = pauli_image(m.basis);
        double p_plus = 0;
        for (size_t i = 0; i < amps_.size(); i++) p_plus += std::norm(0.5 * (amps_[i] + double(m.sign) * img[i]));
        p_plus = std::clamp(p_plus, 0.0, 1.0);
        int outcome;
        if (forced) {
            outcome = *forced;
            double pr = outcome > 0 ? p_plus : 1 - p_plus;
            if (pr < zero_tol)
                throw InvariantError("measure: forced outcome " + std::to_string(outcome) + " of " + m.str() +
                                     " has zero probability");
        } else {
            if (!rng) throw InvariantError("measure: sampling needs an RNG");
            outcome = rng->uniform() < p_plus ? 1 : -1;
        }
        double pr = outcome > 0 ? p_plus : 1 - p_plus;
        if (branch_probability) *branch_probability = pr;
        double s = double(m.sign * outcome);
        double scale = 1 / std::sqrt(pr);
        for (size_t i = 0; i < amps_.size(); i++) amps_[i] = 0.5 * (amps_[i] + s * img[i]) * scale;
        touch(m.basis);
        return outcome;
    }

    /// Reset a qubit that is in a product state with the rest of the
    /// register back to |0> and mark it fresh.
    void release(size_t q, double tol = 1e-9) {
        check_qubit(q);
        size_t bit = mask(q);
        // find the qubit's state from the largest amplitude pair
        size_t best = 0;
        double bn = -1;
        for (size_t i = 0; i < amps_.size(); i++) {
            if (i & bit) continue;
            double v = std::norm(amps_[i]) + std::norm(amps_[i | bit]);
            if (v > bn) bn = v, best = i;
        }
        cplx a = amps_[best], b = amps_[best | bit];
        double nab = std::sqrt(std::norm(a) + std::norm(b));
        a /= nab, b /= nab;
        // unitary sending (a, b) to (1, 0): rows (conj a, conj b), (-b, a)
        double residue = 0;
        for (size_t i = 0; i < amps_.size(); i++) {
            if (i & bit) continue;
            cplx u = amps_[i], v = amps_[i | bit];
            amps_[i] = std::conj(a) * u + std::conj(b) * v;
            cplx w = -b * u + a * v;
            residue += std::norm(w);
            amps_[i | bit] = 0;
        }
        if (residue > tol)
            throw InvariantError("release: qubit " + std::to_string(q) + " is entangled (residue " +
                                 std::to_string(residue) + ")");
        double nn = norm();
        for (auto &x : amps_) x /= nn;
        fresh_[q] = true;
    }

    /// |<a|b>|^2 for normalised states.
    static double fidelity(const std::vector<cplx> &a, const std::vector<cplx> &b) {
        if (a.size() != b.size()) throw DimensionError("fidelity: size mismatch");
        cplx ov = 0;
        double na = 0, nb = 0;
        for (size_t i = 0; i < a.size(); i++) ov += std::conj(a[i]) * b[i], na += std::norm(a[i]), nb += std::norm(b[i]);
        return std::norm(ov) / (na * nb);
    }

  private:
    size_t mask(size_t q) const { return size_t{1} << (n_ - 1 - q); }
    void check_qubit(size_t q) const {
        if (q >= n_) throw DimensionError("qubit " + std::to_string(q) + " out of range");
    }
    void check_dims(const PauliString &p) const {
        if (p.num_qubits() != n_)
            throw DimensionError("Pauli on " + std::to_string(p.num_qubits()) + " qubits applied to a " +
                                 std::to_string(n_) + "-qubit state");
    }
    std::tuple<size_t, size_t, int> masks(const PauliString &p) const {
        size_t xm = 0, zm = 0;
        int ny = 0;
        for (size_t q = 0; q < n_; q++) {
            if (p.xbit(q)) xm |= mask(q);
            if (p.zbit(q)) zm |= mask(q);
            ny += p.xbit(q) && p.zbit(q);
        }
        return {xm, zm, ny};
    }
    static cplx ipow(int k) {
        static const cplx u[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return u[k & 3];
    }
    void touch(const PauliString &p) {
        for (size_t q = 0; q < n_; q++)
            if (p.letter(q) != 'I') fresh_[q] = false;
    }

    size_t n_;
    std::vector<bool> fresh_;
    std::vector<cplx> amps_;
};

}  // namespace patchwork
