#include "vring/pointvortex.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vring/errors.hpp"
#include "vring/kernels.hpp"

namespace vring {

void validate(const VortexConfig& cfg) {
    const std::size_t n = cfg.positions.size();
    if (n == 0)
        throw ConfigError("point-vortex: need at least one vortex");
    if (cfg.intensities.size() != n)
        throw ConfigError("point-vortex: positions/intensities size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (cfg.intensities[i] == 0.0)
            throw ConfigError("point-vortex: intensity a_" + std::to_string(i) +
                              " must be nonzero");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if ((cfg.positions[i] - cfg.positions[j]).norm2() == 0.0)
                throw ConfigError("point-vortex: initial positions " + std::to_string(i) +
                                  " and " + std::to_string(j) + " coincide");
}

std::vector<Vec2> pv_rhs(const std::vector<Vec2>& state, const VortexConfig& cfg) {
    const std::size_t n = state.size();
    std::vector<Vec2> vel(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 u{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            const Vec2 d = state[i] - state[j];
            if (d.norm2() == 0.0)
                throw CollapseError("point-vortex collapse: vortices " + std::to_string(i) +
                                        " and " + std::to_string(j) + " coincide",
                                    static_cast<int>(i), static_cast<int>(j));
            u += cfg.intensities[j] * planar_kernel(d);
        }
        if (cfg.system == PVSystem::Drifted)
            u.x1 += cfg.intensities[i];
        vel[i] = u;
    }
    return vel;
}

namespace {

double min_pair_dist(const std::vector<Vec2>& z) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            best = std::min(best, (z[i] - z[j]).norm());
    return best;
}

} // namespace

PVTrajectory integrate(const VortexConfig& cfg, double dt, double horizon,
                       double collapse_floor) {
    validate(cfg);
    if (!(dt > 0.0))
        throw ConfigError("point-vortex integrate: dt must be > 0");
    if (horizon < 0.0)
        throw ConfigError("point-vortex integrate: horizon must be >= 0");

    const long nsteps = std::llround(horizon / dt);
    const std::size_t n = cfg.positions.size();

    PVTrajectory traj;
    traj.times.reserve(nsteps + 1);
    traj.states.reserve(nsteps + 1);
    traj.min_pair_distance.reserve(nsteps + 1);

    std::vector<Vec2> z = cfg.positions;
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.push_back(z);
        traj.min_pair_distance.push_back(min_pair_dist(z));
    };
    record(0.0);

    std::vector<Vec2> k1, k2, k3, k4, tmp(n);
    for (long s = 0; s < nsteps; ++s) {
        k1 = pv_rhs(z, cfg);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = z[i] + (0.5 * dt) * k1[i];
        k2 = pv_rhs(tmp, cfg);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = z[i] + (0.5 * dt) * k2[i];
        k3 = pv_rhs(tmp, cfg);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = z[i] + dt * k3[i];
        k4 = pv_rhs(tmp, cfg);
        for (std::size_t i = 0; i < n; ++i)
            z[i] += (dt / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

        for (std::size_t i = 0; i < n; ++i)
            if (!finite(z[i]))
                throw NumericError("point-vortex integrate: non-finite state at t = " +
                                   std::to_string((s + 1) * dt));

        const double t = static_cast<double>(s + 1) * dt;
        const double dmin = min_pair_dist(z);
        if (n > 1 && dmin < collapse_floor) {
            // find the offending pair for the event record
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if ((z[i] - z[j]).norm() == dmin) {
                        traj.collapse = CollapseEvent{t, static_cast<int>(i),
                                                      static_cast<int>(j), dmin};
                    }
            record(t);
            return traj;
        }
        record(t);
    }
    return traj;
}

double min_distance_over_horizon(const PVTrajectory& traj) {
    if (traj.times.empty())
        throw ConfigError("min_distance_over_horizon: empty trajectory");
    double best = std::numeric_limits<double>::infinity();
    for (double d : traj.min_pair_distance)
        best = std::min(best, d);
    return best;
}

} // namespace vring
