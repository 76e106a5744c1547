#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <algorithm>
#include <vector>

#include "vring/errors.hpp"

namespace vring::quad {

/// Integrand: maps the abscissa to a 2-vector (both kernel components share
/// one denominator, so they are integrated together).
using Integrand2 = std::function<std::array<double, 2>(double)>;

struct Panel {
    double a, b;
    std::array<double, 2> value{};
    double err = 0.0;
    int fn = 0; // which integrand of the piecewise family

    bool operator<(const Panel& o) const { return err < o.err; }
};

struct Result {
    std::array<double, 2> value{};
    double abs_err = 0.0;
    int evals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr std::array<double, 8> xgk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> wg = {0.129484966168870, 0.279705391489277,
                                             0.381830050505119, 0.417959183673469};

template <class F>
inline Panel gk15(F&& f, double a, double b, int fn) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    std::array<std::array<double, 2>, 15> fv;
    std::array<double, 2> resk{0.0, 0.0};
    std::array<double, 2> resg{0.0, 0.0};

    const auto fc = f(fn, c);
    fv[14] = fc;
    resk[0] = wgk[7] * fc[0];
    resk[1] = wgk[7] * fc[1];
    resg[0] = wg[3] * fc[0];
    resg[1] = wg[3] * fc[1];

    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const auto f1 = f(fn, c - dx);
        const auto f2 = f(fn, c + dx);
        fv[j] = f1;
        fv[7 + j] = f2;
        resk[0] += wgk[j] * (f1[0] + f2[0]);
        resk[1] += wgk[j] * (f1[1] + f2[1]);
        if (j % 2 == 1) { // odd Kronrod indices are the Gauss nodes
            const int jg = (j - 1) / 2;
            resg[0] += wg[jg] * (f1[0] + f2[0]);
            resg[1] += wg[jg] * (f1[1] + f2[1]);
        }
    }

    Panel p;
    p.a = a;
    p.b = b;
    p.fn = fn;
    p.value = {resk[0] * h, resk[1] * h};

    // QUADPACK-style error estimate: the raw |K15 - G7| gauges the Gauss
    // error, which wildly overestimates the Kronrod error on resolved
    // panels; rescale by the mean absolute deviation resasc.
    const double ah = std::abs(h);
    double err = 0.0;
    for (int comp = 0; comp < 2; ++comp) {
        const double mean = 0.5 * resk[comp];
        double resasc = wgk[7] * std::abs(fv[14][comp] - mean);
        for (int j = 0; j < 7; ++j)
            resasc += wgk[j] * (std::abs(fv[j][comp] - mean) +
                                std::abs(fv[7 + j][comp] - mean));
        resasc *= ah;
        double e = std::abs(resk[comp] - resg[comp]) * ah;
        if (resasc != 0.0 && e != 0.0)
            e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
        err += e;
    }
    p.err = err;
    return p;
}

} // namespace detail

/// Adaptive Gauss-Kronrod over a list of seed panels (each tagged with the
/// piecewise integrand it belongs to).  Bisects the worst panel until
///     abs_err <= rel_tol * max(|value|, floor_scale),
/// where |value| is the 2-norm of the result.  Totals are recomputed from the
/// live panel set at every checkpoint (running increments would accumulate
/// cancellation noise far above tight tolerances).  `floor_scale` lets
/// difference-kernels control error relative to an external magnitude.
/// Throws QuadratureError when the evaluation budget runs out first.
template <class F>
Result integrate(F&& f, const std::vector<Panel>& seeds, double rel_tol,
                 double floor_scale = 0.0, int max_evals = 400000) {
    std::vector<Panel> live;
    int evals = 0;
    for (const auto& s : seeds) {
        if (s.b > s.a) {
            live.push_back(detail::gk15(f, s.a, s.b, s.fn));
            evals += 15;
        }
    }
    std::make_heap(live.begin(), live.end());

    Result r;
    auto resum = [&] {
        double v0 = 0.0, c0 = 0.0, v1 = 0.0, c1 = 0.0, e = 0.0;
        for (const auto& p : live) {
            double t = v0 + p.value[0];
            c0 += std::abs(v0) >= std::abs(p.value[0]) ? (v0 - t) + p.value[0]
                                                       : (p.value[0] - t) + v0;
            v0 = t;
            t = v1 + p.value[1];
            c1 += std::abs(v1) >= std::abs(p.value[1]) ? (v1 - t) + p.value[1]
                                                       : (p.value[1] - t) + v1;
            v1 = t;
            e += p.err;
        }
        r.value = {v0 + c0, v1 + c1};
        r.abs_err = e;
        r.evals = evals;
    };
    auto scale = [&] {
        return std::max(std::hypot(r.value[0], r.value[1]),
                        std::max(floor_scale, 1e-300));
    };

    double prev_err = std::numeric_limits<double>::infinity();
    int stalled_checkpoints = 0;
    while (true) {
        resum();
        if (r.abs_err <= rel_tol * scale())
            return r;
        // refinement that stops reducing the estimate has hit the integrand's
        // rounding floor; report the achieved accuracy instead of burning the
        // whole budget on noise panels
        if (r.abs_err > 0.9 * prev_err) {
            if (++stalled_checkpoints >= 6)
                throw QuadratureError("quadrature stalled at the rounding floor",
                                      r.abs_err / scale(), rel_tol);
        } else {
            stalled_checkpoints = 0;
        }
        prev_err = r.abs_err;
        for (int burst = 0; burst < 16; ++burst) {
            if (live.empty() || live.front().err <= 0.0) {
                resum();
                if (r.abs_err <= rel_tol * scale())
                    return r;
                throw QuadratureError("quadrature stalled below the requested tolerance",
                                      r.abs_err / scale(), rel_tol);
            }
            if (evals + 30 > max_evals) {
                resum();
                if (r.abs_err <= rel_tol * scale())
                    return r;
                throw QuadratureError(
                    "theta-quadrature did not converge within node budget",
                    r.abs_err / scale(), rel_tol);
            }
            std::pop_heap(live.begin(), live.end());
            Panel worst = live.back();
            live.pop_back();
            const double mid = 0.5 * (worst.a + worst.b);
            if (!(mid > worst.a && mid < worst.b)) {
                worst.err = 0.0; // unsplittable sliver; keep its value
                live.push_back(worst);
                std::push_heap(live.begin(), live.end());
                continue;
            }
            live.push_back(detail::gk15(f, worst.a, mid, worst.fn));
            std::push_heap(live.begin(), live.end());
            live.push_back(detail::gk15(f, mid, worst.b, worst.fn));
            std::push_heap(live.begin(), live.end());
            evals += 30;
        }
    }
}

} // namespace vring::quad
