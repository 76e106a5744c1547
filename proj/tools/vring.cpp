#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vring/csv.hpp"
#include "vring/errors.hpp"
#include "vring/harness.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitHalt = 4;

void apply_thread_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("VRING_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            omp_set_num_threads(n);
    }
#endif
}

void print_record(const vring::RunRecord& rec) {
    std::cout << "epsilon=" << vring::csv::fmt(rec.epsilon) << " r0="
              << vring::csv::fmt(rec.r0)
              << " sup|B-z|=" << vring::csv::fmt(rec.sup_dist_to_pv)
              << " sup I=" << vring::csv::fmt(rec.sup_I)
              << " T_containment=" << vring::csv::fmt(rec.T_containment)
              << (rec.halted.empty() ? "" : " halted=" + rec.halted) << "\n";
}

int cmd_simulate(const std::string& path) {
    const auto cfg = vring::load_run_config(path);
    const auto rec = vring::run_single(cfg);
    print_record(rec);
    std::cout << "outputs in " << cfg.output_dir << "\n";
    return rec.halted.empty() ? kExitOk : kExitHalt;
}

int cmd_sweep(const std::string& path) {
    const auto sweep = vring::load_sweep_config(path);
    const auto records = vring::run_sweep(sweep);
    for (const auto& r : records)
        print_record(r);
    if (records.size() >= 3) {
        try {
            const auto fits = vring::fit_scaling(records);
            vring::write_fit_csv(sweep.base.output_dir + "/fit.csv", fits);
            for (const auto& f : fits)
                std::cout << f.quantity << ": slope=" << vring::csv::fmt(f.slope)
                          << " (expected ~" << vring::csv::fmt(f.expected_slope)
                          << ", ci95 [" << vring::csv::fmt(f.ci95_lo) << ", "
                          << vring::csv::fmt(f.ci95_hi) << "])\n";
        } catch (const vring::DomainError& e) {
            std::cout << "fit skipped: " << e.what() << "\n";
        }
    }
    std::cout << "summary in " << sweep.base.output_dir << "/summary.csv\n";
    return kExitOk;
}

int cmd_pv(const std::string& path) {
    const auto cfg = vring::load_run_config(path);
    vring::VortexConfig pv_cfg;
    for (const auto& b : cfg.blobs) {
        pv_cfg.positions.push_back(b.center);
        pv_cfg.intensities.push_back(b.intensity);
    }
    pv_cfg.system = cfg.pv_system;
    const double dt = vring::effective_dt(cfg);
    const double horizon = vring::effective_horizon(cfg);
    const auto traj = vring::integrate(pv_cfg, dt, horizon);

    std::filesystem::create_directories(cfg.output_dir);
    vring::csv::Writer out(cfg.output_dir + "/pv.csv",
                           {"t", "i", "z1", "z2", "min_pair_dist"});
    for (std::size_t s = 0; s < traj.times.size(); ++s)
        for (std::size_t i = 0; i < traj.states[s].size(); ++i)
            out.row({vring::csv::fmt(traj.times[s]), std::to_string(i),
                     vring::csv::fmt(traj.states[s][i].x1),
                     vring::csv::fmt(traj.states[s][i].x2),
                     vring::csv::fmt(traj.min_pair_distance[s])});
    std::cout << "pv trajectory in " << cfg.output_dir << "/pv.csv\n";
    if (traj.collapse) {
        std::cout << "collapse of vortices " << traj.collapse->i << ", "
                  << traj.collapse->j << " at t=" << traj.collapse->t << "\n";
        return kExitHalt;
    }
    return kExitOk;
}

int cmd_kernel_check(const std::string& path) {
    const auto cfg = vring::load_kernel_check_config(path);
    const auto summaries = vring::kernel_check_run(cfg);
    for (const auto& s : summaries)
        std::cout << "r0=" << vring::csv::fmt(s.r0)
                  << " max_ratio=" << vring::csv::fmt(s.max_ratio)
                  << " max|D2|*r0=" << vring::csv::fmt(s.max_d2_times_r0)
                  << " points=" << s.points << "\n";
    std::cout << "table in " << cfg.output_dir << "/kernel_check.csv\n";
    return kExitOk;
}

int cmd_report(const std::string& dir) {
    const auto records = vring::read_summary_csv(dir + "/summary.csv");
    const auto fits = vring::fit_scaling(records);
    vring::write_fit_csv(dir + "/fit.csv", fits);
    for (const auto& f : fits)
        std::cout << f.quantity << ": slope=" << vring::csv::fmt(f.slope)
                  << " stderr=" << vring::csv::fmt(f.stderr_slope) << " (expected ~"
                  << vring::csv::fmt(f.expected_slope) << ")\n";
    std::cout << "fit table in " << dir << "/fit.csv\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_env();

    CLI::App app{"vortex-blob simulator and point-vortex convergence harness"};
    app.require_subcommand(1);

    std::string sim_cfg, sweep_cfg, pv_cfg, kc_cfg, report_dir;
    auto* sim = app.add_subcommand("simulate", "run one blob simulation + diagnostics");
    sim->add_option("config", sim_cfg, "JSON run configuration")->required();
    auto* sweep = app.add_subcommand("sweep", "run an epsilon sweep and fit scalings");
    sweep->add_option("config", sweep_cfg, "JSON sweep configuration")->required();
    auto* pv = app.add_subcommand("pv", "integrate the point-vortex system only");
    pv->add_option("config", pv_cfg, "JSON run configuration")->required();
    auto* kc = app.add_subcommand("kernel-check", "tabulate the G - K envelope");
    kc->add_option("config", kc_cfg, "JSON kernel-check configuration")->required();
    auto* rep = app.add_subcommand("report", "recompute fits from a sweep directory");
    rep->add_option("dir", report_dir, "sweep output directory")->required();

    try {
        app.parse(argc, argv);
        if (sim->parsed())
            return cmd_simulate(sim_cfg);
        if (sweep->parsed())
            return cmd_sweep(sweep_cfg);
        if (pv->parsed())
            return cmd_pv(pv_cfg);
        if (kc->parsed())
            return cmd_kernel_check(kc_cfg);
        if (rep->parsed())
            return cmd_report(report_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const vring::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const vring::CollapseError& e) {
        std::cerr << "collapse: " << e.what() << "\n";
        return kExitHalt;
    } catch (const vring::Error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
