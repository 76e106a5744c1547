#pragma once

#include <optional>
#include <vector>

#include "vring/vec2.hpp"

namespace vring {

enum class PVSystem { Classical, Drifted };

/// Point-vortex data {z_i, a_i} plus the system variant.  The Drifted
/// variant adds the self-induced translation a_i (1, 0) of the critical
/// regime; it is exploratory only and never used by convergence claims.
struct VortexConfig {
    std::vector<Vec2> positions;
    std::vector<double> intensities;
    PVSystem system = PVSystem::Classical;
};

/// Throws ConfigError unless N >= 1, intensities nonzero, positions distinct.
void validate(const VortexConfig& cfg);

struct CollapseEvent {
    double t;
    int i, j;
    double distance;
};

struct PVTrajectory {
    std::vector<double> times;
    std::vector<std::vector<Vec2>> states;
    std::vector<double> min_pair_distance; // +inf for N = 1
    std::optional<CollapseEvent> collapse; // set when integration halted early
};

/// Right-hand side of the point-vortex system:
///   dz_i/dt = sum_{j != i} a_j K(z_i - z_j)  [+ a_i (1,0) when Drifted].
/// Throws CollapseError on a coincident pair.
std::vector<Vec2> pv_rhs(const std::vector<Vec2>& state, const VortexConfig& cfg);

/// Fixed-step RK4 up to the horizon (rounded to a whole number of steps).
/// Halts early, recording a collapse event, if any pair distance falls below
/// collapse_floor; throws NumericError on non-finite state.
PVTrajectory integrate(const VortexConfig& cfg, double dt, double horizon,
                       double collapse_floor = 1e-8);

/// min over stored times of min_{i != j} |z_i(t) - z_j(t)|; +inf for N = 1.
double min_distance_over_horizon(const PVTrajectory& traj);

} // namespace vring
