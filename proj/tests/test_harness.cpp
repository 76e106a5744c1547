#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vring/csv.hpp"
#include "vring/errors.hpp"
#include "vring/harness.hpp"

using namespace vring;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunConfig tiny_axisym_run(const std::string& outdir) {
    RunConfig cfg;
    cfg.epsilon = 0.05;
    cfg.alpha = 2.0;
    cfg.beta = 0.2;
    cfg.dt = 1e-3;
    cfg.horizon = 0.01;
    cfg.particles_per_diameter = 4;
    cfg.cadence = 5;
    cfg.kernel = {0.0, 1e-10, 0.0, KernelMode::AxisymElliptic};
    cfg.blobs = {{{0.0, 0.0}, 1.0}, {{2.0, 0.0}, 1.0}};
    cfg.output_dir = outdir;
    return cfg;
}

} // namespace

TEST_CASE("run config validation messages are actionable") {
    RunConfig cfg = tiny_axisym_run("harness_out/validate");

    cfg.beta = 0.3; // outside (0, 0.25)
    try {
        validate_run_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("beta") != std::string::npos);
        CHECK(std::string(e.what()).find("0.25") != std::string::npos);
    }

    cfg.beta = 0.2;
    cfg.alpha = 1.0;
    try {
        validate_run_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }

    cfg.alpha = 2.0;
    cfg.blobs.clear();
    CHECK_THROWS_AS(validate_run_config(cfg), ConfigError);
}

TEST_CASE("sweep config validation") {
    SweepSettings sweep;
    sweep.base = tiny_axisym_run("harness_out/sweepv");
    sweep.epsilons = {0.05, 0.1}; // increasing: rejected
    CHECK_THROWS_AS(validate_sweep_config(sweep), ConfigError);
    sweep.epsilons = {0.1, 0.05};
    CHECK_NOTHROW(validate_sweep_config(sweep));
}

TEST_CASE("fit recovers exact power laws") {
    // sup_dist = |log eps|^-(alpha-1) exactly -> slope -(alpha-1) to 1e-12
    const double alpha = 2.0;
    std::vector<double> lam, val;
    for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
        lam.push_back(std::abs(std::log(eps)));
        val.push_back(std::pow(std::abs(std::log(eps)), -(alpha - 1.0)));
    }
    const auto fit = fit_loglog("d", lam, val, -(alpha - 1.0));
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(fit.stderr_slope) <= 1e-12);

    // constant records fit slope 0
    const auto flat = fit_loglog("c", lam, {2.0, 2.0, 2.0, 2.0}, 0.0);
    CHECK(std::abs(flat.slope) <= 1e-14);

    // degenerate abscissae
    CHECK_THROWS_AS(fit_loglog("x", {5.0, 5.0, 5.0}, {1.0, 2.0, 3.0}, 0.0),
                    DomainError);
    CHECK_THROWS_AS(fit_loglog("x", {1.0, 2.0}, {1.0, 2.0}, 0.0), DomainError);
}

TEST_CASE("run_single: zero horizon reflects initial diagnostics only") {
    RunConfig cfg = tiny_axisym_run("harness_out/zero");
    cfg.horizon = 0.0;
    const auto rec = run_single(cfg);
    CHECK(rec.halted.empty());
    CHECK(std::isinf(rec.T_containment));
    CHECK(rec.sup_dist_to_pv <= cfg.epsilon); // sqrt(Delta(0)) <= eps
    CHECK(rec.sup_I <= 1.0 * cfg.epsilon * cfg.epsilon);
    CHECK(fs::exists("harness_out/zero/snapshots.csv"));
    CHECK(fs::exists("harness_out/zero/pv.csv"));
    CHECK(fs::exists("harness_out/zero/diagnostics.csv"));
    CHECK(fs::exists("harness_out/zero/record.csv"));
}

TEST_CASE("run_single: byte-identical reruns") {
    const auto rec1 = run_single(tiny_axisym_run("harness_out/det1"));
    const auto rec2 = run_single(tiny_axisym_run("harness_out/det2"));
    CHECK(rec1.sup_dist_to_pv == rec2.sup_dist_to_pv);
    CHECK(rec1.sup_I == rec2.sup_I);
    CHECK(slurp("harness_out/det1/snapshots.csv") ==
          slurp("harness_out/det2/snapshots.csv"));
    CHECK(slurp("harness_out/det1/diagnostics.csv") ==
          slurp("harness_out/det2/diagnostics.csv"));
    CHECK(slurp("harness_out/det1/pv.csv") == slurp("harness_out/det2/pv.csv"));
}

TEST_CASE("run_sweep: failures appear as rows, order follows the epsilon grid") {
    SweepSettings sweep;
    sweep.base = tiny_axisym_run("harness_out/sweep");
    // first epsilon makes r0 = |log 0.9|^2 ~ 0.011 < blob radius: config error
    sweep.epsilons = {0.9, 0.05};
    const auto records = run_sweep(sweep);
    REQUIRE(records.size() == 2);
    CHECK(records[0].epsilon == 0.9);
    CHECK(records[0].halted.rfind("error:", 0) == 0);
    CHECK(records[1].epsilon == 0.05);
    CHECK(records[1].halted.empty());
    CHECK(fs::exists("harness_out/sweep/summary.csv"));

    const auto readback = read_summary_csv("harness_out/sweep/summary.csv");
    REQUIRE(readback.size() == 2);
    CHECK(readback[0].epsilon == 0.9);
    CHECK(readback[1].sup_I == records[1].sup_I);
}

TEST_CASE("run_sweep: singleton grid equals run_single") {
    SweepSettings sweep;
    sweep.base = tiny_axisym_run("harness_out/single_sweep");
    sweep.epsilons = {0.05};
    const auto records = run_sweep(sweep);
    const auto direct = run_single(tiny_axisym_run("harness_out/single_direct"));
    REQUIRE(records.size() == 1);
    CHECK(records[0].sup_dist_to_pv == direct.sup_dist_to_pv);
    CHECK(records[0].sup_I == direct.sup_I);
    CHECK(records[0].T_containment == direct.T_containment);
}

TEST_CASE("kernel_check writes the envelope table") {
    KernelCheckConfig cfg;
    cfg.r0_list = {100.0};
    cfg.separations = {0.5, 1.0};
    cfg.offsets = {0.0, 0.5};
    cfg.quad_rel_tol = 1e-9;
    cfg.output_dir = "harness_out/kc";
    const auto summaries = kernel_check_run(cfg);
    REQUIRE(summaries.size() == 1);
    CHECK(summaries[0].points > 6);
    CHECK(summaries[0].max_ratio > 0.0);
    CHECK(summaries[0].max_ratio < 1.0); // measured envelope constant ~ 1/(4 pi)

    const auto rows = csv::read("harness_out/kc/kernel_check.csv");
    REQUIRE(rows.size() == static_cast<std::size_t>(summaries[0].points) + 1);
    CHECK(rows[0][8] == "bound_ratio");
    // the axial direction keeps x1 == y1, where D2 vanishes identically
    bool found_axial = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][1] == rows[i][3]) { // x1 == y1
            found_axial = true;
            CHECK(std::stod(rows[i][7]) == 0.0);
        }
    }
    CHECK(found_axial);
}

TEST_CASE("json config loading") {
    fs::create_directories("harness_out");
    {
        std::ofstream out("harness_out/run.json");
        out << R"({
  "epsilon": 0.05, "alpha": 2.0, "beta": 0.2,
  "dt": 0.001, "horizon": 0.01,
  "particles_per_diameter": 4, "cadence": 5,
  "interaction": "full", "pv_system": "classical",
  "kernel": {"mode": "axisym-elliptic", "quad_rel_tol": 1e-10, "delta": 0.0},
  "blobs": [{"center": [0.0, 0.0], "intensity": 1.0},
            {"center": [2.0, 0.0], "intensity": 1.0}],
  "output_dir": "harness_out/fromjson"
})";
    }
    const auto cfg = load_run_config("harness_out/run.json");
    CHECK(cfg.epsilon == 0.05);
    CHECK(cfg.kernel.mode == KernelMode::AxisymElliptic);
    CHECK(cfg.blobs.size() == 2);
    CHECK(cfg.blobs[1].center.x1 == 2.0);

    {
        std::ofstream out("harness_out/bad.json");
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_run_config("harness_out/bad.json"), ConfigError);

    {
        std::ofstream out("harness_out/badbeta.json");
        out << R"({"epsilon": 0.05, "beta": 0.7,
                   "blobs": [{"center": [0,0], "intensity": 1.0}]})";
    }
    CHECK_THROWS_AS(load_run_config("harness_out/badbeta.json"), ConfigError);
}

#ifdef VRING_CLI
TEST_CASE("cli exit codes") {
    fs::create_directories("harness_out");
    {
        std::ofstream out("harness_out/cli_bad.json");
        out << R"({"epsilon": 0.05, "beta": 0.9,
                   "blobs": [{"center": [0,0], "intensity": 1.0}]})";
    }
    const int rc_bad =
        std::system((std::string(VRING_CLI) + " simulate harness_out/cli_bad.json "
                                              ">/dev/null 2>&1")
                        .c_str());
    CHECK(WEXITSTATUS(rc_bad) == 2);

    {
        std::ofstream out("harness_out/cli_pv.json");
        out << R"({
  "epsilon": 0.05, "alpha": 2.0, "beta": 0.2, "dt": 0.001, "horizon": 0.05,
  "blobs": [{"center": [1.0, 0.0], "intensity": 6.283185307179586},
            {"center": [-1.0, 0.0], "intensity": 6.283185307179586}],
  "output_dir": "harness_out/cli_pv"
})";
    }
    const int rc_pv = std::system(
        (std::string(VRING_CLI) + " pv harness_out/cli_pv.json >/dev/null").c_str());
    CHECK(WEXITSTATUS(rc_pv) == 0);
    CHECK(fs::exists("harness_out/cli_pv/pv.csv"));

    const int rc_missing = std::system(
        (std::string(VRING_CLI) + " simulate harness_out/nope.json >/dev/null 2>&1")
            .c_str());
    CHECK(WEXITSTATUS(rc_missing) == 2);
}
#endif

TEST_CASE("two equal blobs stay contained over a short horizon") {
    RunConfig cfg = tiny_axisym_run("harness_out/contained");
    cfg.particles_per_diameter = 6;
    cfg.dt = 0.0;      // default: resolves the core rotation
    cfg.horizon = 0.05;
    const auto rec = run_single(cfg);
    CHECK(rec.halted.empty());
    CHECK(std::isinf(rec.T_containment));
    CHECK(rec.sup_dist_to_pv < std::pow(std::abs(std::log(0.05)), -0.2));
}

TEST_CASE("containment breach halts the run and is recorded") {
    // Drifted-system vortices translate at speed a_i while the axisymmetric
    // blob self-drifts at the much slower ring rate, so |B - z| grows ~ t
    // and crosses the |log eps|^-beta disk well before the horizon.
    RunConfig cfg;
    cfg.epsilon = 0.1;
    cfg.alpha = 2.0;
    cfg.beta = 0.2;
    cfg.dt = 0.0;
    cfg.horizon = 2.0;
    cfg.particles_per_diameter = 4;
    cfg.cadence = 10;
    cfg.kernel = {0.0, 1e-10, 0.0, KernelMode::AxisymElliptic};
    cfg.pv_system = PVSystem::Drifted;
    cfg.blobs = {{{0.0, 0.0}, 1.0}};
    cfg.output_dir = "harness_out/breach";
    const auto rec = run_single(cfg);
    CHECK(rec.halted == "containment");
    CHECK(!std::isinf(rec.T_containment));
    CHECK(rec.T_containment < 2.0);
    CHECK(rec.T_containment > 0.0);
}

#ifdef VRING_CLI
TEST_CASE("cli exit code 4 on a containment halt") {
    fs::create_directories("harness_out");
    {
        std::ofstream out("harness_out/cli_breach.json");
        out << R"({
  "epsilon": 0.1, "alpha": 2.0, "beta": 0.2, "horizon": 2.0,
  "particles_per_diameter": 4, "cadence": 10, "pv_system": "drifted",
  "kernel": {"mode": "axisym-elliptic"},
  "blobs": [{"center": [0.0, 0.0], "intensity": 1.0}],
  "output_dir": "harness_out/cli_breach"
})";
    }
    const int rc = std::system(
        (std::string(VRING_CLI) + " simulate harness_out/cli_breach.json >/dev/null")
            .c_str());
    CHECK(WEXITSTATUS(rc) == 4);
}
#endif
