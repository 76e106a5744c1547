#pragma once

#include <map>
#include <utility>
#include <vector>

#include "vring/blobsim.hpp"
#include "vring/pointvortex.hpp"
#include "vring/vec2.hpp"

namespace vring {

/// Radial cutoff W_{R,h}: 1 on |x| <= R, 0 on |x| >= R + h, quintic
/// smoothstep in between.  The profile constants are closed form:
/// max |W'| = (15/8)/h and the gradient Lipschitz constant is (10/sqrt(3))/h^2,
/// so C_W = max(15/8, 10/sqrt(3)) satisfies (W2) and (W3) with C_W > 1.
struct Mollifier {
    double R;
    double h;
    double C_W;

    Mollifier(double R_, double h_);
};

inline constexpr double kMollifierGradConst = 1.875;              // 15/8
inline constexpr double kMollifierLipConst = 5.773502691896258;   // 10/sqrt(3)

struct MollifierEval {
    double value;
    Vec2 gradient;
};

MollifierEval mollifier_eval(const Mollifier& mol, Vec2 x);

/// B = (1/a_i) sum_p w_p x_p over the blob (signed weights).
Vec2 center_of_vorticity(const ParticleCloud& cloud, int blob);

/// I = sum_p |w_p| |x_p - B|^2 (absolute weights).
double moment_of_inertia(const ParticleCloud& cloud, int blob);

/// m(R) = sum over the blob of |w_p| with |x_p - B| > R.
double mass_tail(const ParticleCloud& cloud, int blob, double R);

/// mu(R, h) = sum_p [1 - W_{R,h}(x_p - B)] |w_p|.
double mollified_mass(const ParticleCloud& cloud, int blob, const Mollifier& mol);

/// R_t = max_p |x_p - B| over the blob.
double support_radius(const ParticleCloud& cloud, int blob);

/// Sentinel returned by containment_time when no breach occurred.
double horizon_sentinel();

/// First snapshot time at which some particle of blob i satisfies
/// |x_p - z_i(t)| > |log eps|^{-beta}; horizon sentinel if never.
/// Snapshot and point-vortex grids must be aligned (same dt and cadence).
double containment_time(const std::vector<Snapshot>& snapshots, const PVTrajectory& pv,
                        double beta, double epsilon);

struct DeviationSeries {
    std::vector<double> times;
    std::vector<double> delta;                   // Delta(t) = sum_i |B_i - z_i|^2
    std::vector<std::vector<double>> dist_to_pv; // [time][blob]
};

DeviationSeries pv_deviation(const std::vector<Snapshot>& snapshots,
                             const PVTrajectory& pv);

/// Empirical measurements of the external-field split F = F1 + F2 at the
/// sample points: F1 is the planar-K sum over the other blobs, F2 the
/// (G - K) part.
struct FieldSplitReport {
    double sup_F1;
    double lip_F1; // largest |F1(a) - F1(b)| / |a - b| over sample pairs
    double sup_F2;
};

FieldSplitReport external_field_probe(const ParticleCloud& cloud, const SimConfig& cfg,
                                      int blob, const std::vector<Vec2>& samples);

/// Full per-blob, per-time diagnostics record (CSV row).
struct BlobDiagnostics {
    double t;
    int blob;
    Vec2 B;
    double I;
    double R_t;
    std::vector<double> m_at;
    std::vector<double> mu_at;
    double dist_to_pv;
    double delta_total;
};

std::vector<BlobDiagnostics> compute_diagnostics(
    const std::vector<Snapshot>& snapshots, const PVTrajectory& pv,
    const std::vector<double>& radii,
    const std::vector<std::pair<double, double>>& mollifier_params);

} // namespace vring
