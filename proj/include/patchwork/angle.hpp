#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <string>

#include "patchwork/errors.hpp"

namespace patchwork {

/// Rotation angle, either exact (num * pi / 2^k) or a generic real.
///
/// Angles are reduced modulo pi into (-pi/2, pi/2]: P_{phi+pi} = -P_phi
/// equals P_phi up to global phase. Exact angles keep an odd numerator; the
/// zero angle is stored as num = 0, k = 0.
class Angle {
  public:
    enum class Kind { dyadic, generic };

    Angle() = default;

    static Angle zero() { return Angle(); }

    static Angle dyadic(int64_t num, int k) {
        if (k < 0 || k > 62) throw DimensionError("dyadic power out of range: " + std::to_string(k));
        Angle a;
        if (num == 0) return a;
        while (k > 0 && (num & 1) == 0) {
            num /= 2;
            k--;
        }
        if (k == 0) return a;  // integer multiples of pi vanish mod pi
        // reduce num mod 2^k into (-2^{k-1}, 2^{k-1}]
        int64_t mod = int64_t{1} << k;
        int64_t half = mod >> 1;
        num %= mod;
        if (num <= -half) num += mod;
        if (num > half) num -= mod;
        a.num_ = num;
        a.k_ = k;
        return a;
    }

    /// pi / 2^k
    static Angle pi_over(int k, int sign = 1) { return dyadic(sign, k); }

    static Angle radians(double r) {
        Angle a;
        a.kind_ = Kind::generic;
        double pi = std::numbers::pi;
        r = std::remainder(r, pi);  // [-pi/2, pi/2]
        if (r <= -pi / 2) r += pi;
        a.rad_ = r;
        return a;
    }

    Kind kind() const { return kind_; }
    bool is_dyadic() const { return kind_ == Kind::dyadic; }
    int64_t numerator() const { return num_; }
    int power() const { return k_; }

    double to_radians() const {
        if (kind_ == Kind::generic) return rad_;
        return double(num_) * std::numbers::pi / std::ldexp(1.0, k_);
    }

    bool is_zero() const { return kind_ == Kind::dyadic ? num_ == 0 : rad_ == 0.0; }
    /// pi/2: the rotation is a Pauli operator up to phase.
    bool is_pauli() const { return is_dyadic() && k_ == 1; }
    /// +-pi/4
    bool is_clifford() const { return is_dyadic() && k_ == 2; }
    /// odd multiple of pi/8
    bool is_t_level() const { return is_dyadic() && k_ == 3; }
    /// Any non-Clifford angle (pi/8, finer dyadic, or generic non-zero).
    bool is_non_clifford() const { return kind_ == Kind::generic ? rad_ != 0.0 : k_ >= 3; }

    Angle operator-() const {
        if (kind_ == Kind::generic) return radians(-rad_);
        return dyadic(-num_, k_);
    }

    friend Angle operator+(const Angle &a, const Angle &b) {
        if (a.is_dyadic() && b.is_dyadic()) {
            int k = std::max(a.k_, b.k_);
            int64_t na = a.num_ << (k - a.k_);
            int64_t nb = b.num_ << (k - b.k_);
            return dyadic(na + nb, k);
        }
        return radians(a.to_radians() + b.to_radians());
    }
    friend Angle operator-(const Angle &a, const Angle &b) { return a + (-b); }

    bool operator==(const Angle &o) const {
        if (kind_ != o.kind_) return false;
        if (kind_ == Kind::generic) return rad_ == o.rad_;
        return num_ == o.num_ && k_ == o.k_;
    }

    /// "1/8" means pi/8; generic angles print as radians with an "r" suffix.
    std::string str() const {
        if (kind_ == Kind::generic) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17gr", rad_);
            return buf;
        }
        if (num_ == 0) return "0";
        return std::to_string(num_) + "/" + std::to_string(int64_t{1} << k_);
    }

    /// Inverse of str(): "num/2^k" (units of pi), "0", or a real with "r" suffix.
    static Angle parse(const std::string &s) {
        if (s.empty()) throw ParseError("empty angle");
        if (s == "0") return zero();
        if (s.back() == 'r') {
            try {
                size_t used = 0;
                double r = std::stod(s.substr(0, s.size() - 1), &used);
                if (used != s.size() - 1) throw ParseError("bad angle '" + s + "'");
                return radians(r);
            } catch (const std::logic_error &) {
                throw ParseError("bad angle '" + s + "'");
            }
        }
        auto slash = s.find('/');
        if (slash == std::string::npos) throw ParseError("bad angle '" + s + "' (expected num/2^k)");
        int64_t num, den;
        try {
            size_t u1 = 0, u2 = 0;
            num = std::stoll(s.substr(0, slash), &u1);
            den = std::stoll(s.substr(slash + 1), &u2);
            if (u1 != slash || u2 != s.size() - slash - 1) throw ParseError("bad angle '" + s + "'");
        } catch (const std::logic_error &) {
            throw ParseError("bad angle '" + s + "'");
        }
        if (den <= 0 || (den & (den - 1)) != 0) throw ParseError("angle denominator must be a power of two: '" + s + "'");
        return dyadic(num, std::countr_zero(uint64_t(den)));
    }

  private:
    Kind kind_ = Kind::dyadic;
    int64_t num_ = 0;
    int k_ = 0;
    double rad_ = 0.0;
};

}  // namespace patchwork
