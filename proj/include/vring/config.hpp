#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vring/blobsim.hpp"
#include "vring/pointvortex.hpp"

namespace vring {

struct BlobConfig {
    Vec2 center;
    double intensity = 1.0;
};

/// One experiment: concentrated blobs evolved under the chosen kernel mode
/// next to the matching point-vortex integration.
struct RunConfig {
    double epsilon = 0.05;
    double alpha = 2.0;
    double beta = 0.2;
    double dt = 0.0;      // <= 0: derived from the core-rotation timescale
    double horizon = -1.0; // < 0: min(1.0, eta log|log eps|)
    double eta = 0.2;
    int particles_per_diameter = 24;
    int cadence = 0; // <= 0: chosen so roughly 200 snapshots are kept
    KernelConfig kernel{0.0, 1e-10, 0.0, KernelMode::AxisymElliptic};
    Interaction interaction = Interaction::Full;
    PVSystem pv_system = PVSystem::Classical;
    std::vector<BlobConfig> blobs;
    std::string output_dir = "out";
    std::vector<double> diag_radii;                          // empty: defaults
    std::vector<std::pair<double, double>> diag_mollifiers;  // empty: defaults
};

struct SweepSettings {
    std::vector<double> epsilons; // strictly decreasing
    RunConfig base;
};

struct KernelCheckConfig {
    std::vector<double> r0_list{1e2, 1e3, 1e4};
    std::vector<double> separations; // empty: log-spaced 1e-6 .. 10
    std::vector<double> offsets{0.0, 0.5, 1.0}; // fractions of r0/2 for x2, y2
    double quad_rel_tol = 1e-10;
    std::string output_dir = "out";
};

/// Throws ConfigError with an actionable message unless alpha > 1 and
/// 0 < beta < (alpha - 1)/4, blobs nonempty, etc.
void validate_run_config(const RunConfig& cfg);
void validate_sweep_config(const SweepSettings& cfg);

/// Derived quantities with defaults applied.
double effective_dt(const RunConfig& cfg);
double effective_horizon(const RunConfig& cfg);
int effective_cadence(const RunConfig& cfg, double dt, double horizon);
std::vector<double> effective_radii(const RunConfig& cfg);
std::vector<std::pair<double, double>> effective_mollifiers(const RunConfig& cfg);

/// JSON file loading (schema documented in the README).
RunConfig load_run_config(const std::string& path);
SweepSettings load_sweep_config(const std::string& path);
KernelCheckConfig load_kernel_check_config(const std::string& path);

} // namespace vring
