#include "vring/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "vring/csv.hpp"
#include "vring/errors.hpp"

namespace vring {

namespace fs = std::filesystem;

namespace {

using csv::fmt;

void write_pv_csv(const std::string& path, const PVTrajectory& pv, int cadence) {
    csv::Writer out(path, {"t", "i", "z1", "z2", "min_pair_dist"});
    const std::size_t n = pv.times.size();
    for (std::size_t s = 0; s < n; ++s) {
        if (s % cadence != 0 && s + 1 != n)
            continue;
        for (std::size_t i = 0; i < pv.states[s].size(); ++i)
            out.row({fmt(pv.times[s]), std::to_string(i), fmt(pv.states[s][i].x1),
                     fmt(pv.states[s][i].x2), fmt(pv.min_pair_distance[s])});
    }
}

void write_snapshot_csv(const std::string& path, const std::vector<Snapshot>& snaps) {
    csv::Writer out(path, {"t", "blob", "particle", "x1", "x2", "w", "gamma"});
    for (const auto& s : snaps) {
        const auto& c = s.cloud;
        for (int p = 0; p < c.size(); ++p)
            out.row({fmt(s.t), std::to_string(c.blob_of[p]), std::to_string(p),
                     fmt(c.x1[p]), fmt(c.x2[p]), fmt(c.w[p]), fmt(c.gamma[p])});
    }
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<BlobDiagnostics>& rows,
                           const std::vector<double>& radii,
                           const std::vector<std::pair<double, double>>& mols) {
    std::vector<std::string> header{"t", "blob", "B1", "B2", "I", "R_t"};
    for (double R : radii)
        header.push_back("m_at_" + fmt(R));
    for (auto [R, h] : mols)
        header.push_back("mu_at_" + fmt(R) + "_" + fmt(h));
    header.push_back("dist_to_pv");
    header.push_back("Delta");
    csv::Writer out(path, header);
    for (const auto& r : rows) {
        std::vector<std::string> cells{fmt(r.t),  std::to_string(r.blob), fmt(r.B.x1),
                                       fmt(r.B.x2), fmt(r.I),             fmt(r.R_t)};
        for (double v : r.m_at)
            cells.push_back(fmt(v));
        for (double v : r.mu_at)
            cells.push_back(fmt(v));
        cells.push_back(fmt(r.dist_to_pv));
        cells.push_back(fmt(r.delta_total));
        out.row(cells);
    }
}

} // namespace

RunRecord run_single(const RunConfig& cfg) {
    validate_run_config(cfg);
    fs::create_directories(cfg.output_dir);

    const double dt = effective_dt(cfg);
    const double horizon = effective_horizon(cfg);
    const int cadence = effective_cadence(cfg, dt, horizon);
    const auto radii = effective_radii(cfg);
    const auto mols = effective_mollifiers(cfg);

    RunRecord rec;
    rec.epsilon = cfg.epsilon;
    rec.alpha = cfg.alpha;
    rec.beta = cfg.beta;
    rec.T_containment = horizon_sentinel();

    SimConfig sim = make_sim_config(cfg.epsilon, cfg.alpha, dt, horizon, cfg.kernel,
                                    cfg.interaction);
    rec.r0 = sim.kernel.mode == KernelMode::Planar ? 0.0 : sim.kernel.r0;

    VortexConfig pv_cfg;
    std::vector<BlobInitSpec> specs;
    for (const auto& b : cfg.blobs) {
        specs.push_back({b.center, b.intensity, cfg.epsilon, BlobProfile::UniformDisk,
                         cfg.particles_per_diameter});
        pv_cfg.positions.push_back(b.center);
        pv_cfg.intensities.push_back(b.intensity);
    }
    pv_cfg.system = cfg.pv_system;

    PVTrajectory pv = integrate(pv_cfg, dt, horizon);
    double horizon_eff = horizon;
    if (pv.collapse) {
        rec.halted = "pv-collapse";
        horizon_eff = pv.times.back();
        sim.horizon = horizon_eff;
    }

    // Containment monitor: halt as soon as a particle leaves the
    // |log eps|^-beta disk around its point-vortex position.
    const double lambda = std::abs(std::log(cfg.epsilon));
    const double thr = std::pow(lambda, -cfg.beta);
    const double thr2 = thr * thr;
    auto monitor = [&](int step_index, double, const ParticleCloud& cloud) -> bool {
        const auto& z = pv.states[static_cast<std::size_t>(step_index)];
        for (int b = 0; b < cloud.blob_count(); ++b) {
            const auto [b0, b1] = cloud.blob_range[b];
            for (int p = b0; p < b1; ++p) {
                const double dx = cloud.x1[p] - z[b].x1;
                const double dy = cloud.x2[p] - z[b].x2;
                if (dx * dx + dy * dy > thr2)
                    return false;
            }
        }
        return true;
    };

    RunResult result;
    try {
        result = run(specs, sim, monitor, cadence);
        if (result.halt_reason == "recorder")
            rec.halted = "containment";
    } catch (const DomainExitError& e) {
        rec.halted = std::string("domain-exit: ") + e.what();
    } catch (const NumericError& e) {
        rec.halted = std::string("numeric: ") + e.what();
    }

    write_pv_csv(cfg.output_dir + "/pv.csv", pv, cadence);
    write_snapshot_csv(cfg.output_dir + "/snapshots.csv", result.snapshots);

    if (!result.snapshots.empty()) {
        const auto diag = compute_diagnostics(result.snapshots, pv, radii, mols);
        write_diagnostics_csv(cfg.output_dir + "/diagnostics.csv", diag, radii, mols);
        for (const auto& row : diag) {
            rec.sup_dist_to_pv = std::max(rec.sup_dist_to_pv, row.dist_to_pv);
            rec.sup_I = std::max(rec.sup_I, row.I);
        }
        rec.T_containment =
            containment_time(result.snapshots, pv, cfg.beta, cfg.epsilon);
    }

    {
        csv::Writer out(cfg.output_dir + "/record.csv",
                        {"epsilon", "alpha", "beta", "r0", "sup_dist_to_pv", "sup_I",
                         "T_containment", "halted"});
        out.row({fmt(rec.epsilon), fmt(rec.alpha), fmt(rec.beta), fmt(rec.r0),
                 fmt(rec.sup_dist_to_pv), fmt(rec.sup_I), fmt(rec.T_containment),
                 rec.halted});
    }
    return rec;
}

std::vector<RunRecord> run_sweep(const SweepSettings& sweep) {
    validate_sweep_config(sweep);
    fs::create_directories(sweep.base.output_dir);

    std::vector<RunRecord> records;
    for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
        RunConfig cfg = sweep.base;
        cfg.epsilon = sweep.epsilons[i];
        cfg.output_dir =
            sweep.base.output_dir + "/eps_" + std::to_string(i) + "_" +
            fmt(sweep.epsilons[i]);
        try {
            records.push_back(run_single(cfg));
        } catch (const Error& e) {
            RunRecord rec;
            rec.epsilon = cfg.epsilon;
            rec.alpha = cfg.alpha;
            rec.beta = cfg.beta;
            rec.r0 = std::pow(std::abs(std::log(cfg.epsilon)), cfg.alpha);
            rec.sup_dist_to_pv = std::numeric_limits<double>::quiet_NaN();
            rec.sup_I = std::numeric_limits<double>::quiet_NaN();
            rec.T_containment = std::numeric_limits<double>::quiet_NaN();
            rec.halted = std::string("error: ") + e.what();
            records.push_back(rec);
        }
    }
    write_summary_csv(sweep.base.output_dir + "/summary.csv", records);
    return records;
}

FitResult fit_loglog(const std::string& quantity, const std::vector<double>& x,
                     const std::vector<double>& y, double expected_slope) {
    if (x.size() != y.size() || x.size() < 3)
        throw DomainError("fit: need at least 3 points");
    const int n = static_cast<int>(x.size());
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw DomainError("fit: values must be positive and finite");
        u[i] = std::log(x[i]);
        v[i] = std::log(y[i]);
    }
    double um = 0.0, vm = 0.0;
    for (int i = 0; i < n; ++i) {
        um += u[i];
        vm += v[i];
    }
    um /= n;
    vm /= n;
    double suu = 0.0, suv = 0.0;
    for (int i = 0; i < n; ++i) {
        suu += (u[i] - um) * (u[i] - um);
        suv += (u[i] - um) * (v[i] - vm);
    }
    if (!(suu > 1e-12))
        throw DomainError("fit: degenerate abscissae (|log eps| values too close)");
    FitResult fit;
    fit.quantity = quantity;
    fit.n = n;
    fit.slope = suv / suu;
    fit.intercept = vm - fit.slope * um;
    double ss_res = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = v[i] - (fit.intercept + fit.slope * u[i]);
        ss_res += r * r;
    }
    fit.stderr_slope = n > 2 ? std::sqrt(ss_res / (n - 2) / suu) : 0.0;
    fit.ci95_lo = fit.slope - 1.96 * fit.stderr_slope;
    fit.ci95_hi = fit.slope + 1.96 * fit.stderr_slope;
    fit.expected_slope = expected_slope;
    return fit;
}

std::vector<FitResult> fit_scaling(const std::vector<RunRecord>& records) {
    std::vector<double> lam, dist, inertia;
    double alpha = 0.0;
    for (const auto& r : records) {
        if (!r.halted.empty() && r.halted.rfind("error:", 0) == 0)
            continue;
        if (!(r.sup_dist_to_pv > 0.0) || !(r.sup_I > 0.0))
            continue;
        lam.push_back(std::abs(std::log(r.epsilon)));
        dist.push_back(r.sup_dist_to_pv);
        inertia.push_back(r.sup_I);
        alpha = r.alpha;
    }
    std::vector<FitResult> fits;
    fits.push_back(fit_loglog("sup_dist_to_pv", lam, dist, -(alpha - 1.0)));
    fits.push_back(fit_loglog("sup_I", lam, inertia, -2.0 * (alpha - 1.0)));
    return fits;
}

void write_fit_csv(const std::string& path, const std::vector<FitResult>& fits) {
    csv::Writer out(path, {"quantity", "n", "slope", "stderr", "ci95_lo", "ci95_hi",
                           "intercept", "expected_slope"});
    for (const auto& f : fits)
        out.row({f.quantity, std::to_string(f.n), fmt(f.slope), fmt(f.stderr_slope),
                 fmt(f.ci95_lo), fmt(f.ci95_hi), fmt(f.intercept),
                 fmt(f.expected_slope)});
}

void write_summary_csv(const std::string& path, const std::vector<RunRecord>& records) {
    csv::Writer out(path, {"epsilon", "alpha", "beta", "r0", "sup_dist_to_pv", "sup_I",
                           "T_containment", "halted"});
    for (const auto& r : records)
        out.row({fmt(r.epsilon), fmt(r.alpha), fmt(r.beta), fmt(r.r0),
                 fmt(r.sup_dist_to_pv), fmt(r.sup_I), fmt(r.T_containment), r.halted});
}

std::vector<RunRecord> read_summary_csv(const std::string& path) {
    const auto rows = csv::read(path);
    if (rows.empty() || rows[0].size() != 8)
        throw ConfigError("summary: " + path + " is not a sweep summary");
    std::vector<RunRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        RunRecord rec;
        rec.epsilon = std::stod(r[0]);
        rec.alpha = std::stod(r[1]);
        rec.beta = std::stod(r[2]);
        rec.r0 = std::stod(r[3]);
        rec.sup_dist_to_pv = std::stod(r[4]);
        rec.sup_I = std::stod(r[5]);
        rec.T_containment = std::stod(r[6]);
        rec.halted = r[7];
        records.push_back(rec);
    }
    return records;
}

std::vector<KernelCheckSummary> kernel_check_run(const KernelCheckConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    csv::Writer out(cfg.output_dir + "/kernel_check.csv",
                    {"r0", "x1", "x2", "y1", "y2", "sep", "D1", "D2", "bound_ratio"});

    std::vector<double> seps = cfg.separations;
    if (seps.empty())
        for (double s = 1e-6; s <= 10.0 * (1.0 + 1e-12); s *= 10.0)
            seps.push_back(s);

    const Vec2 dirs[3] = {{1.0, 0.0}, {0.0, 1.0},
                          {0.70710678118654752, 0.70710678118654752}};

    std::vector<KernelCheckSummary> summaries;
    for (double r0 : cfg.r0_list) {
        KernelConfig kc{r0, cfg.quad_rel_tol, 0.0, KernelMode::AxisymQuadrature};
        validate(kc);
        KernelCheckSummary sum{r0, 0.0, 0.0, 0};
        for (double ox : cfg.offsets) {
            const double x2 = ox * r0 / 2.0;
            for (double sep : seps) {
                for (const Vec2& dir : dirs) {
                    const Vec2 x{0.0, x2};
                    const Vec2 y = x + sep * dir;
                    if (std::abs(y.x2) > r0 / 2.0)
                        continue;
                    const Vec2 d = kernel_difference(x, y, kc);
                    const double env =
                        1.0 + std::log(r0) + std::max(0.0, std::log(1.0 / sep));
                    const double ratio = d.norm() * r0 / env;
                    out.row({fmt(r0), fmt(x.x1), fmt(x.x2), fmt(y.x1), fmt(y.x2),
                             fmt(sep), fmt(d.x1), fmt(d.x2), fmt(ratio)});
                    sum.max_ratio = std::max(sum.max_ratio, ratio);
                    sum.max_d2_times_r0 = std::max(sum.max_d2_times_r0,
                                                   std::abs(d.x2) * r0);
                    ++sum.points;
                }
            }
        }
        summaries.push_back(sum);
    }
    return summaries;
}

} // namespace vring
