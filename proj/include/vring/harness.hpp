#pragma once

#include <string>
#include <vector>

#include "vring/config.hpp"
#include "vring/diagnostics.hpp"

namespace vring {

struct RunRecord {
    double epsilon = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double r0 = 0.0;
    double sup_dist_to_pv = 0.0;
    double sup_I = 0.0;
    double T_containment = 0.0; // +inf sentinel when no breach
    std::string halted;         // empty when the horizon was reached cleanly
};

/// Runs the PDE side (blob particles) and the ODE side (point vortices) on
/// identical time grids, writes snapshots.csv / pv.csv / diagnostics.csv /
/// record.csv under cfg.output_dir, and returns the aggregate record.
/// Halting conditions (containment breach, domain exit, pv collapse, numeric
/// failure) are recorded, not thrown.
RunRecord run_single(const RunConfig& cfg);

/// run_single once per epsilon (descending), under per-run subdirectories of
/// base.output_dir; writes summary.csv.  Individual failures appear as rows
/// with a halt reason, never as gaps.
std::vector<RunRecord> run_sweep(const SweepSettings& sweep);

struct FitResult {
    std::string quantity;
    int n = 0;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    double intercept = 0.0;
    double expected_slope = 0.0;
};

/// Least-squares fit of log(y) against log(x); throws DomainError on fewer
/// than 3 points or degenerate abscissae.
FitResult fit_loglog(const std::string& quantity, const std::vector<double>& x,
                     const std::vector<double>& y, double expected_slope);

/// Fits log sup|B - z| and log sup I against log|log eps| over the records
/// (expected slopes -(alpha-1) and -2(alpha-1)).
std::vector<FitResult> fit_scaling(const std::vector<RunRecord>& records);

void write_fit_csv(const std::string& path, const std::vector<FitResult>& fits);
void write_summary_csv(const std::string& path, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_summary_csv(const std::string& path);

struct KernelCheckSummary {
    double r0;
    double max_ratio;        // sup |D| r0 / (1 + log r0 + max(0, log 1/sep))
    double max_d2_times_r0;  // sup |D2| r0
    int points;
};

/// Tabulates the kernel difference over the configured grid into
/// <output_dir>/kernel_check.csv and returns the per-r0 envelope maxima.
std::vector<KernelCheckSummary> kernel_check_run(const KernelCheckConfig& cfg);

} // namespace vring
