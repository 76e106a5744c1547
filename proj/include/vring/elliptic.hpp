#pragma once

#include <cmath>
#include <limits>

namespace vring::elliptic {

struct KE {
    double K; ///< complete elliptic integral of the first kind
    double E; ///< complete elliptic integral of the second kind
};

/// Complete elliptic integrals K(k), E(k) by the arithmetic-geometric mean.
///
/// Arguments are the parameter m = k^2 and the complementary modulus
/// kc = k' = sqrt(1 - m).  Callers are expected to supply BOTH, each computed
/// in a cancellation-free way for their regime (near k = 1 the interesting
/// quantity is kc, and forming it as sqrt(1 - m) would lose all precision).
/// m + kc^2 == 1 is assumed, not checked.
///
/// m == 0 returns K = E = pi/2 exactly; kc == 0 returns {inf, 1}.
inline KE agm(double m, double kc) {
    constexpr double half_pi = 1.5707963267948966;
    if (m == 0.0)
        return {half_pi, half_pi};
    if (kc == 0.0)
        return {std::numeric_limits<double>::infinity(), 1.0};

    double a = 1.0;
    double g = kc;
    double sum = 0.5 * m; // 2^{n-1} c_n^2 accumulated, c_0 = k
    double p = 0.5;
    for (int it = 0; it < 64; ++it) {
        const double c = 0.5 * (a - g);
        const double an = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = an;
        p *= 2.0;
        sum += p * c * c;
        if (std::abs(c) <= 0.5e-17 * a)
            break;
    }
    const double K = half_pi / a;
    return {K, K * (1.0 - sum)};
}

/// Q(m) = (2-m) E(k) - 2 (1-m) K(k), the combination entering the
/// cos(theta)-weighted ring integral.  For small m the two terms cancel to
/// O(m^2), so a power series is used there:
///   Q(m) = (pi/2) sum_{j>=2} q_j m^j,
///   q_j  = 4 j c_j/(1-2j) + c_{j-1} (5-4j)/(3-2j).
inline double q_combination(double m, double kc) {
    if (m > 0.5) {
        // (2-m) E - 2 kc^2 K; no cancellation since E ~ 1 dominates here.
        const KE ke = agm(m, kc);
        return (2.0 - m) * ke.E - 2.0 * (kc * kc) * ke.K;
    }
    double c_prev = 0.25; // c_1
    double mj = m;        // m^{j-1} entering the loop at j
    double s = 0.0;
    for (int j = 2; j <= 120; ++j) {
        const double f = (2.0 * j - 1.0) / (2.0 * j);
        const double c = c_prev * f * f; // c_j
        mj *= m;                         // m^j
        const double qj =
            4.0 * j * c / (1.0 - 2.0 * j) + c_prev * (5.0 - 4.0 * j) / (3.0 - 2.0 * j);
        const double term = qj * mj;
        s += term;
        c_prev = c;
        if (std::abs(term) < 1e-18 * std::abs(s))
            break;
    }
    return 1.5707963267948966 * s;
}

} // namespace vring::elliptic
