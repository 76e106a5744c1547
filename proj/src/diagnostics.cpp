#include "vring/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vring/errors.hpp"

namespace vring {

Mollifier::Mollifier(double R_, double h_) : R(R_), h(h_) {
    if (!(h > 0.0) || !(R >= 2.0 * h))
        throw ConfigError("mollifier: need R >= 2h > 0 (got R = " + std::to_string(R_) +
                          ", h = " + std::to_string(h_) + ")");
    C_W = std::max(kMollifierGradConst, kMollifierLipConst);
}

MollifierEval mollifier_eval(const Mollifier& mol, Vec2 x) {
    const double rr = x.norm();
    if (rr <= mol.R)
        return {1.0, {0.0, 0.0}};
    if (rr >= mol.R + mol.h)
        return {0.0, {0.0, 0.0}};
    const double u = (rr - mol.R) / mol.h;
    // s(u) = 6u^5 - 15u^4 + 10u^3, clamped so W stays in [0, 1] exactly
    double s = u * u * u * (10.0 + u * (6.0 * u - 15.0));
    s = std::clamp(s, 0.0, 1.0);
    const double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    const double gfac = -ds / (mol.h * rr);
    return {1.0 - s, {gfac * x.x1, gfac * x.x2}};
}

namespace {

void check_blob(const ParticleCloud& cloud, int blob) {
    if (blob < 0 || blob >= cloud.blob_count())
        throw ConfigError("diagnostics: blob index " + std::to_string(blob) +
                          " out of range");
    const auto [b0, b1] = cloud.blob_range[blob];
    if (b0 == b1)
        throw ConfigError("diagnostics: blob " + std::to_string(blob) + " is empty");
}

} // namespace

Vec2 center_of_vorticity(const ParticleCloud& cloud, int blob) {
    check_blob(cloud, blob);
    const auto [b0, b1] = cloud.blob_range[blob];
    double a = 0.0, sx = 0.0, sy = 0.0;
    for (int p = b0; p < b1; ++p) {
        a += cloud.w[p];
        sx += cloud.w[p] * cloud.x1[p];
        sy += cloud.w[p] * cloud.x2[p];
    }
    if (a == 0.0)
        throw ConfigError("center_of_vorticity: blob has zero total intensity");
    return {sx / a, sy / a};
}

double moment_of_inertia(const ParticleCloud& cloud, int blob) {
    const Vec2 B = center_of_vorticity(cloud, blob);
    const auto [b0, b1] = cloud.blob_range[blob];
    double s = 0.0;
    for (int p = b0; p < b1; ++p) {
        const double dx = cloud.x1[p] - B.x1;
        const double dy = cloud.x2[p] - B.x2;
        s += std::abs(cloud.w[p]) * (dx * dx + dy * dy);
    }
    return s;
}

// m and mu below deliberately use the same plain left-to-right loop over the
// blob range: termwise domination of nonnegative summands then survives
// floating-point rounding, which keeps the sandwich inequality exact.
double mass_tail(const ParticleCloud& cloud, int blob, double R) {
    if (!(R > 0.0))
        throw DomainError("mass_tail: R must be > 0");
    const Vec2 B = center_of_vorticity(cloud, blob);
    const auto [b0, b1] = cloud.blob_range[blob];
    double s = 0.0;
    for (int p = b0; p < b1; ++p) {
        const double d = Vec2{cloud.x1[p] - B.x1, cloud.x2[p] - B.x2}.norm();
        if (d > R)
            s += std::abs(cloud.w[p]);
    }
    return s;
}

double mollified_mass(const ParticleCloud& cloud, int blob, const Mollifier& mol) {
    const Vec2 B = center_of_vorticity(cloud, blob);
    const auto [b0, b1] = cloud.blob_range[blob];
    double s = 0.0;
    for (int p = b0; p < b1; ++p) {
        const auto we =
            mollifier_eval(mol, {cloud.x1[p] - B.x1, cloud.x2[p] - B.x2});
        s += (1.0 - we.value) * std::abs(cloud.w[p]);
    }
    return s;
}

double support_radius(const ParticleCloud& cloud, int blob) {
    const Vec2 B = center_of_vorticity(cloud, blob);
    const auto [b0, b1] = cloud.blob_range[blob];
    double best = 0.0;
    for (int p = b0; p < b1; ++p)
        best = std::max(best, Vec2{cloud.x1[p] - B.x1, cloud.x2[p] - B.x2}.norm());
    return best;
}

double horizon_sentinel() { return std::numeric_limits<double>::infinity(); }

namespace {

// Snapshot times must be a subset of the point-vortex grid; returns the
// pv index for each snapshot or throws ConfigError.
std::vector<std::size_t> align_grids(const std::vector<Snapshot>& snapshots,
                                     const PVTrajectory& pv) {
    std::vector<std::size_t> idx(snapshots.size());
    std::size_t j = 0;
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const double t = snapshots[s].t;
        const double tol = 1e-9 * std::max(1.0, std::abs(t));
        while (j < pv.times.size() && pv.times[j] < t - tol)
            ++j;
        if (j >= pv.times.size() || std::abs(pv.times[j] - t) > tol)
            throw ConfigError(
                "diagnostics: snapshot and point-vortex time grids are misaligned "
                "(same dt and cadence required)");
        idx[s] = j;
    }
    return idx;
}

} // namespace

double containment_time(const std::vector<Snapshot>& snapshots, const PVTrajectory& pv,
                        double beta, double epsilon) {
    if (snapshots.empty())
        throw ConfigError("containment_time: no snapshots");
    const auto idx = align_grids(snapshots, pv);
    const double lambda = std::abs(std::log(epsilon));
    const double threshold = std::pow(lambda, -beta);
    const double thr2 = threshold * threshold;

    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const auto& cloud = snapshots[s].cloud;
        const auto& z = pv.states[idx[s]];
        for (int b = 0; b < cloud.blob_count(); ++b) {
            const auto [b0, b1] = cloud.blob_range[b];
            for (int p = b0; p < b1; ++p) {
                const double dx = cloud.x1[p] - z[b].x1;
                const double dy = cloud.x2[p] - z[b].x2;
                if (dx * dx + dy * dy > thr2)
                    return snapshots[s].t;
            }
        }
    }
    return horizon_sentinel();
}

DeviationSeries pv_deviation(const std::vector<Snapshot>& snapshots,
                             const PVTrajectory& pv) {
    const auto idx = align_grids(snapshots, pv);
    DeviationSeries out;
    out.times.reserve(snapshots.size());
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const auto& cloud = snapshots[s].cloud;
        const auto& z = pv.states[idx[s]];
        std::vector<double> dists(cloud.blob_count());
        double delta = 0.0;
        for (int b = 0; b < cloud.blob_count(); ++b) {
            const Vec2 B = center_of_vorticity(cloud, b);
            const double d = (B - z[b]).norm();
            dists[b] = d;
            delta += d * d;
        }
        out.times.push_back(snapshots[s].t);
        out.delta.push_back(delta);
        out.dist_to_pv.push_back(std::move(dists));
    }
    return out;
}

FieldSplitReport external_field_probe(const ParticleCloud& cloud, const SimConfig& cfg,
                                      int blob, const std::vector<Vec2>& samples) {
    check_blob(cloud, blob);
    const auto [b0, b1] = cloud.blob_range[blob];

    std::vector<Vec2> f1(samples.size(), Vec2{0.0, 0.0});
    std::vector<Vec2> f2(samples.size(), Vec2{0.0, 0.0});
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (int q = 0; q < cloud.size(); ++q) {
            if (q >= b0 && q < b1)
                continue;
            const Vec2 xq{cloud.x1[q], cloud.x2[q]};
            f1[s] += cloud.w[q] * planar_kernel(samples[s] - xq);
            f2[s] += cloud.w[q] * kernel_difference(samples[s], xq, cfg.kernel);
        }
    }

    FieldSplitReport rep{0.0, 0.0, 0.0};
    for (std::size_t s = 0; s < samples.size(); ++s) {
        rep.sup_F1 = std::max(rep.sup_F1, f1[s].norm());
        rep.sup_F2 = std::max(rep.sup_F2, f2[s].norm());
        for (std::size_t t = s + 1; t < samples.size(); ++t) {
            const double d = (samples[s] - samples[t]).norm();
            if (d > 0.0)
                rep.lip_F1 = std::max(rep.lip_F1, (f1[s] - f1[t]).norm() / d);
        }
    }
    return rep;
}

std::vector<BlobDiagnostics> compute_diagnostics(
    const std::vector<Snapshot>& snapshots, const PVTrajectory& pv,
    const std::vector<double>& radii,
    const std::vector<std::pair<double, double>>& mollifier_params) {
    const DeviationSeries dev = pv_deviation(snapshots, pv);
    std::vector<Mollifier> mols;
    mols.reserve(mollifier_params.size());
    for (auto [R, h] : mollifier_params)
        mols.emplace_back(R, h);

    std::vector<BlobDiagnostics> rows;
    for (std::size_t s = 0; s < snapshots.size(); ++s) {
        const auto& cloud = snapshots[s].cloud;
        for (int b = 0; b < cloud.blob_count(); ++b) {
            BlobDiagnostics row;
            row.t = snapshots[s].t;
            row.blob = b;
            row.B = center_of_vorticity(cloud, b);
            row.I = moment_of_inertia(cloud, b);
            row.R_t = support_radius(cloud, b);
            for (double R : radii)
                row.m_at.push_back(mass_tail(cloud, b, R));
            for (const auto& mol : mols)
                row.mu_at.push_back(mollified_mass(cloud, b, mol));
            row.dist_to_pv = dev.dist_to_pv[s][b];
            row.delta_total = dev.delta[s];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace vring
