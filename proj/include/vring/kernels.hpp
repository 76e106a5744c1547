#pragma once

#include <cmath>

#include "vring/elliptic.hpp"
#include "vring/errors.hpp"
#include "vring/vec2.hpp"

namespace vring {

enum class KernelMode { Planar, AxisymQuadrature, AxisymElliptic };

/// Shared kernel parameters.  r0 is the ring radius in the (z, r - r0)
/// coordinate system; delta is the planar regularization length; mode picks
/// the evaluation path used by velocity sums.
struct KernelConfig {
    double r0 = 0.0;
    double quad_rel_tol = 1e-10;
    double delta = 0.0;
    KernelMode mode = KernelMode::AxisymElliptic;
};

/// Throws ConfigError unless the invariants hold:
/// r0 > 0 for axisymmetric modes, quad_rel_tol in (0, 1e-3], delta >= 0.
void validate(const KernelConfig& cfg);

constexpr double kInv2Pi = 0.15915494309189535; // 1/(2 pi)
constexpr double kPi = 3.141592653589793;

/// Planar point-vortex kernel K(x) = (1/2pi) (-x2, x1)/|x|^2.
inline Vec2 planar_kernel(Vec2 x) {
    const double n2 = x.norm2();
    if (n2 == 0.0)
        throw SingularInputError("planar_kernel: |x| = 0");
    const double f = kInv2Pi / n2;
    return {-x.x2 * f, x.x1 * f};
}

/// Regularized planar kernel (1/2pi) (-x2, x1)/(|x|^2 + delta^2).
/// Total for delta > 0; returns (0,0) at x = 0.
inline Vec2 planar_kernel_regularized(Vec2 x, double delta) {
    const double den = x.norm2() + delta * delta;
    if (den == 0.0)
        return {0.0, 0.0};
    const double f = kInv2Pi / den;
    return {-x.x2 * f, x.x1 * f};
}

namespace detail {

/// Elliptic-integral closed form of G = (G1, G2).  Raw coordinate interface
/// for the N-body hot loop; preconditions (positive radii, x != y) are the
/// caller's responsibility and violations surface as SingularInputError.
inline Vec2 axisym_elliptic_raw(double x1, double x2, double y1, double y2, double r0) {
    const double r = r0 + x2;
    const double rp = r0 + y2;
    if (!(r > 0.0) || !(rp > 0.0))
        throw DomainError("axisym kernel: point outside the half-plane r0 + x2 > 0");
    const double dz = x1 - y1;
    const double dr = x2 - y2;
    const double A = dz * dz + dr * dr;
    if (A == 0.0)
        throw SingularInputError("axisym kernel: coincident points");

    const double rs = r + rp;
    const double D2 = dz * dz + rs * rs; // = A + 4 r rp
    const double D = std::sqrt(D2);
    const double m = 4.0 * r * rp / D2;   // modulus^2
    const double kp2 = A / D2;            // complementary modulus^2
    const double kp = std::sqrt(A) / D;

    if (!(m < 1.0) || kp == 0.0)
        throw SingularInputError("axisym kernel: modulus reached 1");

    if (m > 0.5) {
        const auto ke = elliptic::agm(m, kp);
        // (rp - r) E + kp^2 (2 r K - (r + rp) E), grouped so the O(|x-y|)
        // leading term is carried by the exact difference rp - r = -(dr).
        const double bracket = -dr * ke.E + kp2 * (2.0 * r * ke.K - rs * ke.E);
        const double g1 = rp * bracket / (kPi * D * m * A);
        const double killer = ((1.0 + kp2) * ke.E - 2.0 * kp2 * ke.K) / (m * kp2);
        const double g2 = rp * dz * killer / (kPi * D * D2);
        return {g1, g2};
    }
    // Far regime: the cos(theta) moment cancels to O(m^2); use the series
    // combination Q(m) = (2-m)E - 2(1-m)K.
    const auto ke = elliptic::agm(m, kp);
    const double i0 = 2.0 * ke.E / (A * D);
    const double q = elliptic::q_combination(m, kp);
    const double i1 = 2.0 * q / (D * D2 * m * kp2);
    const double g1 = rp * kInv2Pi * (rp * i0 - r * i1);
    const double g2 = rp * kInv2Pi * dz * i1;
    return {g1, g2};
}

} // namespace detail

/// Exact axisymmetric velocity kernel G(x, y) by adaptive quadrature of the
/// theta-integrals to relative tolerance cfg.quad_rel_tol.
Vec2 axisym_kernel_quadrature(Vec2 x, Vec2 y, const KernelConfig& cfg);

/// Same value through complete elliptic integrals (AGM); the fast path.
Vec2 axisym_kernel_elliptic(Vec2 x, Vec2 y, const KernelConfig& cfg);

/// Dispatch on cfg.mode (Planar is not a valid mode here).
Vec2 axisym_kernel(Vec2 x, Vec2 y, const KernelConfig& cfg);

/// D(x, y) = G(x, y) - K(x - y), computed by integrating the difference of
/// the G integrand and a theta-integral representation of K, so the result
/// carries the full relative accuracy of the quadrature rather than the
/// cancellation of two large kernel values.
Vec2 kernel_difference(Vec2 x, Vec2 y, const KernelConfig& cfg);

/// Upper bound for the operator norm of the Jacobian of K on {|x| >= r_min}.
/// The Jacobian of K is symmetric traceless with spectral norm exactly
/// 1/(2 pi |x|^2), so the bound is attained at |x| = r_min.
double lipschitz_constant_planar(double r_min);

} // namespace vring
