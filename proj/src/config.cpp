#include "vring/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vring/csv.hpp"
#include "vring/errors.hpp"

namespace vring {

namespace csv {

std::vector<std::vector<std::string>> read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("csv: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

} // namespace csv

void validate_run_config(const RunConfig& cfg) {
    if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 1.0))
        throw ConfigError("config: epsilon must lie in (0, 1), got " +
                          std::to_string(cfg.epsilon));
    if (!(cfg.alpha > 1.0))
        throw ConfigError("config: alpha must be > 1 (the point-vortex limit regime); got " +
                          std::to_string(cfg.alpha));
    const double beta_max = (cfg.alpha - 1.0) / 4.0;
    if (!(cfg.beta > 0.0) || !(cfg.beta < beta_max))
        throw ConfigError("config: beta must lie in (0, (alpha-1)/4) = (0, " +
                          std::to_string(beta_max) + "); got " + std::to_string(cfg.beta));
    if (cfg.blobs.empty())
        throw ConfigError("config: at least one blob is required");
    if (cfg.particles_per_diameter < 1)
        throw ConfigError("config: particles_per_diameter must be >= 1");
    if (!(cfg.eta > 0.0))
        throw ConfigError("config: eta must be > 0");
}

void validate_sweep_config(const SweepSettings& cfg) {
    if (cfg.epsilons.size() < 1)
        throw ConfigError("sweep: epsilons must be nonempty");
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        if (!(cfg.epsilons[i] > 0.0) || !(cfg.epsilons[i] < 1.0))
            throw ConfigError("sweep: every epsilon must lie in (0, 1)");
        if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
            throw ConfigError("sweep: epsilons must be strictly decreasing");
    }
    RunConfig probe = cfg.base;
    probe.epsilon = cfg.epsilons.front();
    validate_run_config(probe);
}

double effective_dt(const RunConfig& cfg) {
    if (cfg.dt > 0.0)
        return cfg.dt;
    // Resolve the core rotation: a uniform blob spins at
    // Omega = |a|/(2 pi eps^2); keep Omega dt = 0.1.
    double amax = 0.0;
    for (const auto& b : cfg.blobs)
        amax = std::max(amax, std::abs(b.intensity));
    if (amax == 0.0)
        amax = 1.0;
    const double omega = amax / (2.0 * kPi * cfg.epsilon * cfg.epsilon);
    return 0.1 / omega;
}

double effective_horizon(const RunConfig& cfg) {
    if (cfg.horizon >= 0.0)
        return cfg.horizon;
    const double lambda = std::abs(std::log(cfg.epsilon));
    return std::min(1.0, cfg.eta * std::log(lambda));
}

int effective_cadence(const RunConfig& cfg, double dt, double horizon) {
    if (cfg.cadence > 0)
        return cfg.cadence;
    const long nsteps = std::lround(horizon / dt);
    return std::max(1L, nsteps / 200);
}

std::vector<double> effective_radii(const RunConfig& cfg) {
    if (!cfg.diag_radii.empty())
        return cfg.diag_radii;
    const double lambda = std::abs(std::log(cfg.epsilon));
    const double k = 0.5 * (cfg.beta + (cfg.alpha - 1.0) / 4.0); // beta < k < (alpha-1)/4
    const double rho_k = std::pow(lambda, -k);
    return {rho_k, 2.0 * rho_k, 3.0 * rho_k, std::pow(lambda, -cfg.beta)};
}

std::vector<std::pair<double, double>> effective_mollifiers(const RunConfig& cfg) {
    if (!cfg.diag_mollifiers.empty())
        return cfg.diag_mollifiers;
    const double lambda = std::abs(std::log(cfg.epsilon));
    const double k = 0.5 * (cfg.beta + (cfg.alpha - 1.0) / 4.0);
    const double rho_k = std::pow(lambda, -k);
    return {{rho_k, 0.5 * rho_k}, {3.0 * rho_k, 0.5 * rho_k}};
}

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + " is not valid JSON: " + e.what());
    }
}

KernelMode parse_mode(const std::string& s) {
    if (s == "planar")
        return KernelMode::Planar;
    if (s == "axisym-quadrature")
        return KernelMode::AxisymQuadrature;
    if (s == "axisym-elliptic")
        return KernelMode::AxisymElliptic;
    throw ConfigError("config: unknown kernel mode '" + s +
                      "' (expected planar | axisym-quadrature | axisym-elliptic)");
}

Interaction parse_interaction(const std::string& s) {
    if (s == "full")
        return Interaction::Full;
    if (s == "self-only")
        return Interaction::SelfOnly;
    if (s == "external-only")
        return Interaction::ExternalOnly;
    throw ConfigError("config: unknown interaction '" + s +
                      "' (expected full | self-only | external-only)");
}

PVSystem parse_system(const std::string& s) {
    if (s == "classical")
        return PVSystem::Classical;
    if (s == "drifted")
        return PVSystem::Drifted;
    throw ConfigError("config: unknown pv system '" + s +
                      "' (expected classical | drifted)");
}

RunConfig parse_run(const json& j) {
    RunConfig cfg;
    try {
        if (j.contains("epsilon"))
            cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("alpha"))
            cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("beta"))
            cfg.beta = j.at("beta").get<double>();
        if (j.contains("dt"))
            cfg.dt = j.at("dt").get<double>();
        if (j.contains("horizon"))
            cfg.horizon = j.at("horizon").get<double>();
        if (j.contains("eta"))
            cfg.eta = j.at("eta").get<double>();
        if (j.contains("particles_per_diameter"))
            cfg.particles_per_diameter = j.at("particles_per_diameter").get<int>();
        if (j.contains("cadence"))
            cfg.cadence = j.at("cadence").get<int>();
        if (j.contains("interaction"))
            cfg.interaction = parse_interaction(j.at("interaction").get<std::string>());
        if (j.contains("pv_system"))
            cfg.pv_system = parse_system(j.at("pv_system").get<std::string>());
        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            if (k.contains("mode"))
                cfg.kernel.mode = parse_mode(k.at("mode").get<std::string>());
            if (k.contains("quad_rel_tol"))
                cfg.kernel.quad_rel_tol = k.at("quad_rel_tol").get<double>();
            if (k.contains("delta"))
                cfg.kernel.delta = k.at("delta").get<double>();
        }
        if (j.contains("blobs")) {
            for (const auto& b : j.at("blobs")) {
                BlobConfig bc;
                const auto& c = b.at("center");
                bc.center = {c.at(0).get<double>(), c.at(1).get<double>()};
                bc.intensity = b.at("intensity").get<double>();
                cfg.blobs.push_back(bc);
            }
        }
        if (j.contains("output_dir"))
            cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("diag_radii"))
            cfg.diag_radii = j.at("diag_radii").get<std::vector<double>>();
        if (j.contains("diag_mollifiers")) {
            for (const auto& m : j.at("diag_mollifiers"))
                cfg.diag_mollifiers.emplace_back(m.at(0).get<double>(),
                                                 m.at(1).get<double>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed run configuration: ") + e.what());
    }
    return cfg;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    RunConfig cfg = parse_run(load_json(path));
    validate_run_config(cfg);
    return cfg;
}

SweepSettings load_sweep_config(const std::string& path) {
    const json j = load_json(path);
    SweepSettings sweep;
    sweep.base = parse_run(j);
    try {
        sweep.epsilons = j.at("epsilons").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: sweep needs an 'epsilons' array: ") +
                          e.what());
    }
    validate_sweep_config(sweep);
    return sweep;
}

KernelCheckConfig load_kernel_check_config(const std::string& path) {
    const json j = load_json(path);
    KernelCheckConfig cfg;
    try {
        if (j.contains("r0_list"))
            cfg.r0_list = j.at("r0_list").get<std::vector<double>>();
        if (j.contains("separations"))
            cfg.separations = j.at("separations").get<std::vector<double>>();
        if (j.contains("offsets"))
            cfg.offsets = j.at("offsets").get<std::vector<double>>();
        if (j.contains("quad_rel_tol"))
            cfg.quad_rel_tol = j.at("quad_rel_tol").get<double>();
        if (j.contains("output_dir"))
            cfg.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed kernel-check configuration: ") +
                          e.what());
    }
    for (double r0 : cfg.r0_list)
        if (!(r0 > 0.0))
            throw ConfigError("kernel-check: r0 values must be > 0");
    return cfg;
}

} // namespace vring
