#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vring/kernels.hpp"
#include "vring/vec2.hpp"

namespace vring {

enum class Interaction { Full, SelfOnly, ExternalOnly };

enum class BlobProfile { UniformDisk };

/// One initial vortex blob: a uniform disk of radius epsilon around `center`
/// carrying total circulation `intensity`.  The implied amplitude
/// intensity/(pi eps^2) saturates the |omega| <= M eps^-2 bound with
/// M = |intensity|/pi.
struct BlobInitSpec {
    Vec2 center;
    double intensity = 1.0;
    double epsilon = 0.1;
    BlobProfile profile = BlobProfile::UniformDisk;
    int particles_per_diameter = 24;
};

struct SimConfig {
    double epsilon = 0.1;
    double alpha = 2.0;
    double dt = 1e-3;
    double horizon = 1.0;
    KernelConfig kernel;
    Interaction interaction = Interaction::Full;
};

/// Builds a SimConfig enforcing r0 = |log epsilon|^alpha for axisymmetric
/// kernel modes.  Throws ConfigError on invalid ranges.
SimConfig make_sim_config(double epsilon, double alpha, double dt, double horizon,
                          KernelConfig kernel, Interaction interaction);

/// Lagrangian particles.  Weights w_p (circulation mass) and gammas
/// (omega/r, or plain omega in planar mode) are set at initialization and
/// never mutated; positions are the only evolving state.
struct ParticleCloud {
    std::vector<double> x1, x2;
    std::vector<double> w;
    std::vector<double> gamma;
    std::vector<int> blob_of;
    std::vector<std::pair<int, int>> blob_range; // contiguous [begin, end) per blob
    double r0 = 0.0;
    KernelMode mode = KernelMode::Planar;

    int size() const { return static_cast<int>(x1.size()); }
    int blob_count() const { return static_cast<int>(blob_range.size()); }
};

inline constexpr int kAllBlobs = -1;

/// Lattice discretization of the initial blobs.  Weights are rescaled so the
/// plain left-to-right sum over each blob equals its intensity exactly.
ParticleCloud init_blobs(const std::vector<BlobInitSpec>& specs, const SimConfig& cfg);

/// Velocity at an arbitrary point.  target_blob selects the source set for
/// SelfOnly / ExternalOnly; Full ignores it.  In axisymmetric modes a source
/// coinciding with x is excluded; planar mode regularizes with cfg.kernel.delta.
Vec2 eval_velocity(Vec2 x, const ParticleCloud& cloud, const SimConfig& cfg,
                   int target_blob = kAllBlobs);

/// Velocities of all particles under Full interaction at externally supplied
/// positions (RK4 stages), with each particle excluded from its own sum in
/// axisymmetric modes.  Deterministic blocked compensated summation; parallel
/// over targets.
void particle_velocities(const std::vector<double>& px, const std::vector<double>& py,
                         const ParticleCloud& cloud, const SimConfig& cfg,
                         std::vector<double>& ux, std::vector<double>& uy);

/// One RK4 step of size cfg.dt.  Weights and gammas are carried over
/// untouched.  Throws DomainExitError if a particle leaves {r0 + x2 > 0},
/// NumericError on non-finite positions.
ParticleCloud step(const ParticleCloud& cloud, const SimConfig& cfg);

/// Pointwise vorticity carried by particle p: gamma_p (r0 + x2_p) in
/// axisymmetric modes, gamma_p itself in planar mode.
double particle_intensity(const ParticleCloud& cloud, int p);

struct Snapshot {
    double t;
    ParticleCloud cloud;
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    std::string halt_reason; // empty when the horizon was reached
    double halted_at = 0.0;
};

/// Recorder is invoked on every emitted snapshot; returning false requests a
/// halt (recorded, not thrown).  Snapshots are emitted at t = 0 and then
/// every `cadence` steps (plus the final step).
using Recorder = std::function<bool(int step_index, double t, const ParticleCloud&)>;

RunResult run(const std::vector<BlobInitSpec>& specs, const SimConfig& cfg,
              const Recorder& recorder = {}, int cadence = 1);

} // namespace vring
