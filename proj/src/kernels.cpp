#include "vring/kernels.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "vring/quadrature.hpp"

namespace vring {

void validate(const KernelConfig& cfg) {
    if (cfg.mode != KernelMode::Planar && !(cfg.r0 > 0.0))
        throw ConfigError("kernel: r0 must be > 0 in axisymmetric modes (got " +
                          std::to_string(cfg.r0) + ")");
    if (!(cfg.quad_rel_tol > 0.0) || cfg.quad_rel_tol > 1e-3)
        throw ConfigError("kernel: quad_rel_tol must lie in (0, 1e-3], got " +
                          std::to_string(cfg.quad_rel_tol));
    if (cfg.delta < 0.0)
        throw ConfigError("kernel: delta must be >= 0");
}

namespace {

constexpr double kS1 = 0.70710678118654752; // sin(pi/4): theta in [0, pi/2]

struct RingGeometry {
    double r, rp, dz, dr, A, Cq; // Cq = 4 r rp multiplies s^2 in the denominator
    double wk1, wk2;             // numerator of the K representation: (y2-x2, dz)
};

RingGeometry make_geometry(Vec2 x, Vec2 y, const KernelConfig& cfg) {
    RingGeometry g;
    g.r = cfg.r0 + x.x2;
    g.rp = cfg.r0 + y.x2;
    if (!(g.r > 0.0) || !(g.rp > 0.0))
        throw DomainError("axisym kernel: point outside the half-plane r0 + x2 > 0");
    g.dz = x.x1 - y.x1;
    g.dr = x.x2 - y.x2;
    g.A = g.dz * g.dz + g.dr * g.dr;
    if (g.A == 0.0)
        throw SingularInputError("axisym kernel: coincident points");
    g.Cq = 4.0 * g.r * g.rp;
    g.wk1 = -g.dr;
    g.wk2 = g.dz;
    return g;
}

// Seed panels: geometric refinement toward s = 0 where the integrand peaks
// with half-width sqrt(A/Cq), plus two panels on the smooth theta segment.
std::vector<quad::Panel> seed_panels(const RingGeometry& g) {
    std::vector<quad::Panel> seeds;
    const double sw = std::sqrt(g.A / g.Cq);
    if (sw >= kS1 / 4.0) {
        seeds.push_back({0.0, kS1 / 2.0, {}, 0.0, 0});
        seeds.push_back({kS1 / 2.0, kS1, {}, 0.0, 0});
    } else {
        double lo = 0.0, hi = sw;
        while (hi < kS1) {
            seeds.push_back({lo, hi, {}, 0.0, 0});
            lo = hi;
            hi *= 4.0;
        }
        seeds.push_back({lo, kS1, {}, 0.0, 0});
    }
    seeds.push_back({0.5 * kPi, 0.75 * kPi, {}, 0.0, 1});
    seeds.push_back({0.75 * kPi, kPi, {}, 0.0, 1});
    return seeds;
}

// G integrand.  fn = 0: s-variable (theta = 2 asin s, cos theta = 1 - 2 s^2)
// over [0, sin(pi/4)]; fn = 1: plain theta over [pi/2, pi].
std::array<double, 2> g_integrand(const RingGeometry& g, int fn, double t) {
    if (fn == 0) {
        const double s2 = t * t;
        const double den = g.A + g.Cq * s2;
        const double d32 = den * std::sqrt(den);
        const double jac = 2.0 / std::sqrt(1.0 - s2);
        const double ct = 1.0 - 2.0 * s2;
        const double f = kInv2Pi * g.rp * jac / d32;
        return {f * (g.rp - g.r * ct), f * g.dz * ct};
    }
    const double ct = std::cos(t);
    const double den = g.A + 0.5 * g.Cq * (1.0 - ct);
    const double d32 = den * std::sqrt(den);
    const double f = kInv2Pi * g.rp / d32;
    return {f * (g.rp - g.r * ct), f * g.dz * ct};
}

// K(x-y) = (1/2pi) (y2-x2, dz)/A has the representation
//   K = (1/2pi) * 2 sqrt(r rp) * (y2-x2, dz) * Integral_0^inf ds/(A+Cq s^2)^{3/2}.
// The pointwise difference g - k cancels to O(s^2, dr) near the peak; the
// groupings below keep every term a product of small factors so the
// quadrature sees the difference at full relative precision:
//   jac - 2        = 2 s^2 / [sqrt(1-s^2) (1 + sqrt(1-s^2))]
//   jac cos - 2    = -2 s^2 (3 - 4 s^2) / [sqrt(1-s^2) (1 - 2s^2 + sqrt(1-s^2))]
//   2 sqrt(r rp) - 2 rp = 2 sqrt(rp) dr / (sqrt(r) + sqrt(rp)).
std::array<double, 2> diff_integrand(const RingGeometry& g, double s) {
    const double s2 = s * s;
    const double den = g.A + g.Cq * s2;
    const double d32 = den * std::sqrt(den);
    const double rt = std::sqrt(1.0 - s2);
    const double jac = 2.0 / rt;
    const double j2 = 2.0 * s2 / (rt * (1.0 + rt));
    const double jc2 = -2.0 * s2 * (3.0 - 4.0 * s2) / (rt * (1.0 - 2.0 * s2 + rt));
    const double sqr = std::sqrt(g.r);
    const double sqrp = std::sqrt(g.rp);
    const double rad = 2.0 * sqrp * g.dr / (sqr + sqrp); // 2 rp - 2 sqrt(r rp)

    const double f = kInv2Pi / d32;
    const double d1 =
        f * (g.dr * (rad - g.rp * j2) + 2.0 * g.r * g.rp * jac * s2);
    const double d2 = f * g.dz * (g.rp * jc2 - rad);
    return {d1, d2};
}

// Integral_{s1}^inf ds/(A + Cq s^2)^{3/2} in closed, cancellation-free form.
double k_rep_tail(const RingGeometry& g, double s1) {
    const double root = std::sqrt(g.A + g.Cq * s1 * s1);
    const double sq = std::sqrt(g.Cq);
    return 1.0 / (sq * root * (root + s1 * sq));
}

} // namespace

Vec2 axisym_kernel_quadrature(Vec2 x, Vec2 y, const KernelConfig& cfg) {
    const RingGeometry g = make_geometry(x, y, cfg);
    auto f = [&g](int fn, double t) { return g_integrand(g, fn, t); };
    const auto res = quad::integrate(f, seed_panels(g), cfg.quad_rel_tol);
    return {res.value[0], res.value[1]};
}

Vec2 axisym_kernel_elliptic(Vec2 x, Vec2 y, const KernelConfig& cfg) {
    if (!(cfg.r0 + x.x2 > 0.0) || !(cfg.r0 + y.x2 > 0.0))
        throw DomainError("axisym kernel: point outside the half-plane r0 + x2 > 0");
    return detail::axisym_elliptic_raw(x.x1, x.x2, y.x1, y.x2, cfg.r0);
}

Vec2 axisym_kernel(Vec2 x, Vec2 y, const KernelConfig& cfg) {
    switch (cfg.mode) {
    case KernelMode::AxisymQuadrature:
        return axisym_kernel_quadrature(x, y, cfg);
    case KernelMode::AxisymElliptic:
        return axisym_kernel_elliptic(x, y, cfg);
    default:
        throw ConfigError("axisym_kernel: Planar mode has no (x, y) kernel");
    }
}

Vec2 kernel_difference(Vec2 x, Vec2 y, const KernelConfig& cfg) {
    const RingGeometry g = make_geometry(x, y, cfg);

    auto f = [&g](int fn, double t) -> std::array<double, 2> {
        if (fn == 0)
            return diff_integrand(g, t);
        return g_integrand(g, 1, t);
    };

    const double tail = k_rep_tail(g, kS1);
    const double tf = kInv2Pi * 2.0 * std::sqrt(g.r * g.rp) * tail;
    const Vec2 tail_vec{tf * g.wk1, tf * g.wk2};

    const auto res =
        quad::integrate(f, seed_panels(g), cfg.quad_rel_tol, tail_vec.norm());
    return {res.value[0] - tail_vec.x1, res.value[1] - tail_vec.x2};
}

double lipschitz_constant_planar(double r_min) {
    if (!(r_min > 0.0))
        throw DomainError("lipschitz_constant_planar: r_min must be > 0");
    return kInv2Pi / (r_min * r_min);
}

} // namespace vring
