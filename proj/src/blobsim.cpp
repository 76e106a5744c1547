#include "vring/blobsim.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>

#include "vring/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vring {

SimConfig make_sim_config(double epsilon, double alpha, double dt, double horizon,
                          KernelConfig kernel, Interaction interaction) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw ConfigError("sim: epsilon must lie in (0, 1), got " + std::to_string(epsilon));
    if (!(dt > 0.0))
        throw ConfigError("sim: dt must be > 0");
    if (horizon < 0.0)
        throw ConfigError("sim: horizon must be >= 0");
    if (kernel.mode != KernelMode::Planar)
        kernel.r0 = std::pow(std::abs(std::log(epsilon)), alpha);
    validate(kernel);
    SimConfig cfg;
    cfg.epsilon = epsilon;
    cfg.alpha = alpha;
    cfg.dt = dt;
    cfg.horizon = horizon;
    cfg.kernel = kernel;
    cfg.interaction = interaction;
    return cfg;
}

namespace {

double plain_sum(const std::vector<double>& v, int begin, int end) {
    double s = 0.0;
    for (int i = begin; i < end; ++i)
        s += v[i];
    return s;
}

// Nudges the last element until the plain left-to-right sum over
// [begin, end) lands exactly on `target`.
void fix_total(std::vector<double>& v, int begin, int end, double target) {
    for (int iter = 0; iter < 64; ++iter) {
        const double s = plain_sum(v, begin, end);
        if (s == target)
            return;
        v[end - 1] += target - s;
    }
}

inline void neumaier_add(double& sum, double& comp, double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value))
        comp += (sum - t) + value;
    else
        comp += (value - t) + sum;
    sum = t;
}

constexpr int kBlock = 4096;

// Accumulates sum_q w_q * ker(x, x_q) over index ranges with blocked
// compensated summation in a fixed order, independent of threading.
template <class KernelFn>
Vec2 sum_ranges(double X, double Y, const std::vector<double>& qx,
                const std::vector<double>& qy, const std::vector<double>& w,
                const std::pair<int, int>* ranges, int nranges, int exclude,
                KernelFn&& ker) {
    double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0;
    for (int ri = 0; ri < nranges; ++ri) {
        for (int b = ranges[ri].first; b < ranges[ri].second; b += kBlock) {
            const int be = std::min(b + kBlock, ranges[ri].second);
            double bs1 = 0.0, bc1 = 0.0, bs2 = 0.0, bc2 = 0.0;
            for (int q = b; q < be; ++q) {
                if (q == exclude)
                    continue;
                const Vec2 g = ker(X, Y, qx[q], qy[q]);
                neumaier_add(bs1, bc1, w[q] * g.x1);
                neumaier_add(bs2, bc2, w[q] * g.x2);
            }
            neumaier_add(s1, c1, bs1 + bc1);
            neumaier_add(s2, c2, bs2 + bc2);
        }
    }
    return {s1 + c1, s2 + c2};
}

// Source ranges for an interaction mode; blob ranges are contiguous.
int make_ranges(const ParticleCloud& cloud, Interaction inter, int target_blob,
                std::pair<int, int>* out) {
    const int P = cloud.size();
    switch (inter) {
    case Interaction::Full:
        out[0] = {0, P};
        return 1;
    case Interaction::SelfOnly:
        if (target_blob < 0 || target_blob >= cloud.blob_count())
            throw ConfigError("eval_velocity: SelfOnly needs a valid target blob");
        out[0] = cloud.blob_range[target_blob];
        return 1;
    case Interaction::ExternalOnly: {
        if (target_blob < 0 || target_blob >= cloud.blob_count())
            throw ConfigError("eval_velocity: ExternalOnly needs a valid target blob");
        const auto [b0, b1] = cloud.blob_range[target_blob];
        int n = 0;
        if (b0 > 0)
            out[n++] = {0, b0};
        if (b1 < P)
            out[n++] = {b1, P};
        return n;
    }
    }
    return 0;
}

template <class KernelFn>
Vec2 velocity_at(double X, double Y, const ParticleCloud& cloud, Interaction inter,
                 int target_blob, int exclude, KernelFn&& ker) {
    std::pair<int, int> ranges[2];
    const int nr = make_ranges(cloud, inter, target_blob, ranges);
    return sum_ranges(X, Y, cloud.x1, cloud.x2, cloud.w, ranges, nr, exclude,
                      std::forward<KernelFn>(ker));
}

// Positional self-exclusion for evaluation at arbitrary points.
int positional_exclude(Vec2 x, const ParticleCloud& cloud) {
    for (int q = 0; q < cloud.size(); ++q)
        if (cloud.x1[q] == x.x1 && cloud.x2[q] == x.x2)
            return q;
    return -1;
}

} // namespace

ParticleCloud init_blobs(const std::vector<BlobInitSpec>& specs, const SimConfig& cfg) {
    if (specs.empty())
        throw ConfigError("init_blobs: no blobs given");
    const bool axisym = cfg.kernel.mode != KernelMode::Planar;

    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (!(s.epsilon > 0.0) || !(s.epsilon < 1.0))
            throw ConfigError("init_blobs: blob epsilon must lie in (0, 1)");
        if (s.intensity == 0.0)
            throw ConfigError("init_blobs: blob intensity must be nonzero");
        if (s.particles_per_diameter < 1)
            throw ConfigError("init_blobs: particles_per_diameter must be >= 1");
        if (axisym && !(cfg.kernel.r0 + s.center.x2 - s.epsilon > 0.0))
            throw ConfigError("init_blobs: blob " + std::to_string(i) +
                              " is not inside the half-plane r0 + x2 > 0");
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            const double d = (specs[i].center - specs[j].center).norm();
            if (d < specs[i].epsilon + specs[j].epsilon)
                throw ConfigError("init_blobs: blobs " + std::to_string(i) + " and " +
                                  std::to_string(j) + " overlap");
        }
    }

    ParticleCloud cloud;
    cloud.r0 = axisym ? cfg.kernel.r0 : 0.0;
    cloud.mode = cfg.kernel.mode;

    for (std::size_t b = 0; b < specs.size(); ++b) {
        const auto& s = specs[b];
        const double spacing = s.epsilon / s.particles_per_diameter;
        const double amplitude = s.intensity / (kPi * s.epsilon * s.epsilon);
        const int begin = cloud.size();
        const int nmax = s.particles_per_diameter + 1;
        for (int i = -nmax; i < nmax; ++i) {
            for (int j = -nmax; j < nmax; ++j) {
                const double px = (i + 0.5) * spacing;
                const double py = (j + 0.5) * spacing;
                if (px * px + py * py >= s.epsilon * s.epsilon)
                    continue;
                cloud.x1.push_back(s.center.x1 + px);
                cloud.x2.push_back(s.center.x2 + py);
                cloud.blob_of.push_back(static_cast<int>(b));
            }
        }
        const int end = cloud.size();
        const int n = end - begin;
        if (n == 0)
            throw ResolutionError("init_blobs: blob " + std::to_string(b) +
                                  " produced no particles; raise particles_per_diameter");
        cloud.w.resize(end);
        cloud.gamma.resize(end);
        for (int p = begin; p < end; ++p) {
            cloud.w[p] = s.intensity / n;
            cloud.gamma[p] =
                axisym ? amplitude / (cloud.r0 + cloud.x2[p]) : amplitude;
        }
        fix_total(cloud.w, begin, end, s.intensity);
        cloud.blob_range.emplace_back(begin, end);
    }
    return cloud;
}

Vec2 eval_velocity(Vec2 x, const ParticleCloud& cloud, const SimConfig& cfg,
                   int target_blob) {
    const Interaction inter = cfg.interaction;
    switch (cfg.kernel.mode) {
    case KernelMode::Planar: {
        const double delta = cfg.kernel.delta;
        return velocity_at(x.x1, x.x2, cloud, inter, target_blob, -1,
                           [delta](double X, double Y, double qx, double qy) {
                               return planar_kernel_regularized({X - qx, Y - qy}, delta);
                           });
    }
    case KernelMode::AxisymElliptic: {
        const int ex = positional_exclude(x, cloud);
        const double r0 = cloud.r0;
        return velocity_at(x.x1, x.x2, cloud, inter, target_blob, ex,
                           [r0](double X, double Y, double qx, double qy) {
                               return detail::axisym_elliptic_raw(X, Y, qx, qy, r0);
                           });
    }
    case KernelMode::AxisymQuadrature: {
        const int ex = positional_exclude(x, cloud);
        const KernelConfig& kc = cfg.kernel;
        return velocity_at(x.x1, x.x2, cloud, inter, target_blob, ex,
                           [&kc](double X, double Y, double qx, double qy) {
                               return axisym_kernel_quadrature({X, Y}, {qx, qy}, kc);
                           });
    }
    }
    throw ConfigError("eval_velocity: unknown kernel mode");
}

void particle_velocities(const std::vector<double>& px, const std::vector<double>& py,
                         const ParticleCloud& cloud, const SimConfig& cfg,
                         std::vector<double>& ux, std::vector<double>& uy) {
    const int P = cloud.size();
    ux.resize(P);
    uy.resize(P);
    const std::pair<int, int> all{0, P};
    std::exception_ptr error = nullptr;

    // RK4 stage positions must stay inside the half-plane before any kernel
    // sees them; scanning up front pins the offending particle id.
    if (cloud.mode != KernelMode::Planar)
        for (int p = 0; p < P; ++p)
            if (!(cloud.r0 + py[p] > 0.0))
                throw DomainExitError("particle " + std::to_string(p) +
                                          " left the half-plane r0 + x2 > 0",
                                      p);

    const KernelMode mode = cfg.kernel.mode;
    const double delta = cfg.kernel.delta;
    const double r0 = cloud.r0;
    const KernelConfig kc = cfg.kernel;

#pragma omp parallel for schedule(static)
    for (int p = 0; p < P; ++p) {
        if (error)
            continue;
        try {
            Vec2 u;
            switch (mode) {
            case KernelMode::Planar:
                u = sum_ranges(px[p], py[p], px, py, cloud.w, &all, 1, -1,
                               [delta](double X, double Y, double qx, double qy) {
                                   return planar_kernel_regularized({X - qx, Y - qy},
                                                                    delta);
                               });
                break;
            case KernelMode::AxisymElliptic:
                u = sum_ranges(px[p], py[p], px, py, cloud.w, &all, 1, p,
                               [r0](double X, double Y, double qx, double qy) {
                                   return detail::axisym_elliptic_raw(X, Y, qx, qy, r0);
                               });
                break;
            case KernelMode::AxisymQuadrature:
                u = sum_ranges(px[p], py[p], px, py, cloud.w, &all, 1, p,
                               [&kc](double X, double Y, double qx, double qy) {
                                   return axisym_kernel_quadrature({X, Y}, {qx, qy}, kc);
                               });
                break;
            }
            ux[p] = u.x1;
            uy[p] = u.x2;
        } catch (...) {
#pragma omp critical
            if (!error)
                error = std::current_exception();
        }
    }
    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const SingularInputError& e) {
            throw SingularInputError(std::string(e.what()) +
                                     " (while summing particle velocities)");
        }
    }
}

ParticleCloud step(const ParticleCloud& cloud, const SimConfig& cfg) {
    const int P = cloud.size();
    const double dt = cfg.dt;
    const bool axisym = cloud.mode != KernelMode::Planar;

    std::vector<double> k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
    std::vector<double> sx(P), sy(P);

    particle_velocities(cloud.x1, cloud.x2, cloud, cfg, k1x, k1y);
    for (int p = 0; p < P; ++p) {
        sx[p] = cloud.x1[p] + 0.5 * dt * k1x[p];
        sy[p] = cloud.x2[p] + 0.5 * dt * k1y[p];
    }
    particle_velocities(sx, sy, cloud, cfg, k2x, k2y);
    for (int p = 0; p < P; ++p) {
        sx[p] = cloud.x1[p] + 0.5 * dt * k2x[p];
        sy[p] = cloud.x2[p] + 0.5 * dt * k2y[p];
    }
    particle_velocities(sx, sy, cloud, cfg, k3x, k3y);
    for (int p = 0; p < P; ++p) {
        sx[p] = cloud.x1[p] + dt * k3x[p];
        sy[p] = cloud.x2[p] + dt * k3y[p];
    }
    particle_velocities(sx, sy, cloud, cfg, k4x, k4y);

    ParticleCloud next = cloud;
    for (int p = 0; p < P; ++p) {
        next.x1[p] =
            cloud.x1[p] + (dt / 6.0) * (k1x[p] + 2.0 * (k2x[p] + k3x[p]) + k4x[p]);
        next.x2[p] =
            cloud.x2[p] + (dt / 6.0) * (k1y[p] + 2.0 * (k2y[p] + k3y[p]) + k4y[p]);
        if (!std::isfinite(next.x1[p]) || !std::isfinite(next.x2[p]))
            throw NumericError("step: non-finite position for particle " +
                               std::to_string(p));
        if (axisym && !(next.r0 + next.x2[p] > 0.0))
            throw DomainExitError("step: particle " + std::to_string(p) +
                                      " left the half-plane r0 + x2 > 0",
                                  p);
    }
    return next;
}

double particle_intensity(const ParticleCloud& cloud, int p) {
    if (cloud.mode == KernelMode::Planar)
        return cloud.gamma[p];
    return cloud.gamma[p] * (cloud.r0 + cloud.x2[p]);
}

RunResult run(const std::vector<BlobInitSpec>& specs, const SimConfig& cfg,
              const Recorder& recorder, int cadence) {
    if (cadence < 1)
        throw ConfigError("run: cadence must be >= 1");
    RunResult result;
    ParticleCloud cloud = init_blobs(specs, cfg);
    const long nsteps = std::llround(cfg.horizon / cfg.dt);

    auto emit = [&](int step_index, double t) -> bool {
        result.snapshots.push_back({t, cloud});
        if (recorder && !recorder(step_index, t, cloud)) {
            result.halt_reason = "recorder";
            result.halted_at = t;
            return false;
        }
        return true;
    };

    if (!emit(0, 0.0))
        return result;
    for (long s = 1; s <= nsteps; ++s) {
        cloud = step(cloud, cfg);
        if (s % cadence == 0 || s == nsteps) {
            if (!emit(static_cast<int>(s), static_cast<double>(s) * cfg.dt))
                return result;
        }
    }
    return result;
}

} // namespace vring
