#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>

namespace patchwork {

struct Interval {
    double lo = 0, hi = 0;
};

/// Wilson score interval for k successes in n trials at z standard deviations.
inline Interval wilson_interval(uint64_t k, uint64_t n, double z = 1.96) {
    if (n == 0) return {0, 1};
    double nn = double(n), ph = double(k) / nn, z2 = z * z;
    double centre = (ph + z2 / (2 * nn)) / (1 + z2 / nn);
    double half = z / (1 + z2 / nn) * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Binomial standard error of a rate with true value `p` over n trials.
inline double binomial_sigma(double p, uint64_t n) { return n ? std::sqrt(p * (1 - p) / double(n)) : 1.0; }

}  // namespace patchwork
