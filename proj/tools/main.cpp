// hamstab: analyze, stabilize, simulate, or destabilize Hamiltonian
// equilibria from the command line.
//
// Exit codes: 0 success, 2 classification/config error, 3 precondition/gain
// error, 4 verification failure.

#include "hamstab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using hamstab::RunConfig;

void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw hamstab::ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw hamstab::ConfigError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw hamstab::ConfigError("config file must hold a JSON object");
    try {
        if (j.contains("system")) cfg.system_name = j["system"].get<std::string>();
        if (j.contains("param")) {
            for (auto& [k, v] : j["param"].items()) cfg.params[k] = v.get<double>();
        }
        if (j.contains("poly-file")) cfg.poly_file = j["poly-file"].get<std::string>();
        if (j.contains("guess")) cfg.guess = j["guess"].get<std::vector<double>>();
        if (j.contains("gain-c")) cfg.gain_c = j["gain-c"].get<double>();
        if (j.contains("gain-d")) cfg.gain_d = j["gain-d"].get<std::vector<double>>();
        if (j.contains("method")) cfg.method = j["method"].get<std::string>();
        if (j.contains("dt")) cfg.dt = j["dt"].get<double>();
        if (j.contains("rel-tol")) cfg.rel_tol = j["rel-tol"].get<double>();
        if (j.contains("abs-tol")) cfg.abs_tol = j["abs-tol"].get<double>();
        if (j.contains("t-final")) cfg.t_final = j["t-final"].get<double>();
        if (j.contains("record-stride")) cfg.record_stride = j["record-stride"].get<int>();
        if (j.contains("samples")) cfg.samples = j["samples"].get<int>();
        if (j.contains("csv-count")) cfg.csv_count = j["csv-count"].get<int>();
        if (j.contains("radius")) cfg.radius = j["radius"].get<double>();
        if (j.contains("conv-tol")) cfg.conv_tol = j["conv-tol"].get<double>();
        if (j.contains("threshold")) cfg.converged_threshold = j["threshold"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
        if (j.contains("no-control")) cfg.no_control = j["no-control"].get<bool>();
        if (j.contains("grid")) cfg.grid = j["grid"].get<bool>();
        if (j.contains("grid-points")) cfg.grid_points = j["grid-points"].get<int>();
        if (j.contains("grid-span")) cfg.grid_span = j["grid-span"].get<double>();
    } catch (const hamstab::ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw hamstab::ConfigError("config file " + path + ": " + e.what());
    }
}

void parse_params(const std::vector<std::string>& raw, RunConfig& cfg) {
    for (const std::string& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw hamstab::ConfigError("--param expects key=value, got '" + kv + "'");
        }
        const std::string key = kv.substr(0, eq);
        try {
            size_t used = 0;
            const double value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
            cfg.params[key] = value;
        } catch (const std::exception&) {
            throw hamstab::ConfigError("--param value for '" + key + "' is not a number");
        }
    }
}

std::string g_config_dummy;  // --config is consumed in the pre-scan

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::vector<std::string>& raw_params) {
    cmd->add_option("--config", g_config_dummy, "JSON config file (flags override)");
    cmd->add_option("--system", cfg.system_name,
                    "quadratic | model | hydrogen | polynomial")
        ->capture_default_str();
    cmd->add_option("--param", raw_params, "system parameter key=value (repeatable)");
    cmd->add_option("--poly-file", cfg.poly_file, "polynomial system JSON file");
    cmd->add_option("--guess", cfg.guess, "equilibrium guess (2n values)");
    cmd->add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
}

void add_dynamics_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--gain-c", cfg.gain_c, "proportional gain (default 2*lambda)");
    cmd->add_option("--gain-d", cfg.gain_d, "dissipative gains (repeatable, default 1)");
    cmd->add_option("--method", cfg.method, "rk4 | rkf45")->capture_default_str();
    cmd->add_option("--dt", cfg.dt, "RK4 step / RKF45 initial step")->capture_default_str();
    cmd->add_option("--rel-tol", cfg.rel_tol, "RKF45 relative tolerance")->capture_default_str();
    cmd->add_option("--abs-tol", cfg.abs_tol, "RKF45 absolute tolerance")->capture_default_str();
    cmd->add_option("--t-final", cfg.t_final, "integration horizon");
    cmd->add_option("--record-stride", cfg.record_stride, "record every k-th step")
        ->capture_default_str();
    cmd->add_option("--samples", cfg.samples, "verification sample count")->capture_default_str();
    cmd->add_option("--csv-count", cfg.csv_count, "trajectories written as CSV")
        ->capture_default_str();
    cmd->add_option("--radius", cfg.radius, "initial-condition ball radius")->capture_default_str();
    cmd->add_option("--conv-tol", cfg.conv_tol, "convergence distance")->capture_default_str();
    cmd->add_option("--threshold", cfg.converged_threshold,
                    "minimum converged fraction")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // --config is honored before flag parsing so flags override file values.
    try {
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") apply_config_file(argv[i + 1], cfg);
        }
    } catch (const hamstab::Error& e) {
        std::cerr << "hamstab: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"feedback stabilization of saddle equilibria in Hamiltonian systems"};
    app.require_subcommand(1);
    app.add_option("--config", g_config_dummy, "JSON config file (flags override)");

    std::vector<std::string> raw_params;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "equilibrium, spectrum, normal-form transform, feedback table");
    add_common_options(analyze, cfg, raw_params);
    analyze->add_flag("--grid", cfg.grid, "emit potential grid CSV (2-dof systems)");
    analyze->add_option("--grid-points", cfg.grid_points, "grid resolution")
        ->capture_default_str();
    analyze->add_option("--grid-span", cfg.grid_span, "grid half-width")
        ->capture_default_str();

    CLI::App* stabilize = app.add_subcommand(
        "stabilize", "build the closed loop, simulate and verify convergence");
    add_common_options(stabilize, cfg, raw_params);
    add_dynamics_options(stabilize, cfg);
    stabilize->add_flag("--no-control", cfg.no_control,
                        "simulate the uncontrolled system instead");
    stabilize->add_flag("--grid", cfg.grid, "emit modified-potential grid CSV");

    CLI::App* simulate = app.add_subcommand(
        "simulate", "integrate the uncontrolled system with transition diagnostics");
    add_common_options(simulate, cfg, raw_params);
    add_dynamics_options(simulate, cfg);

    CLI::App* destabilize = app.add_subcommand(
        "destabilize", "turn an all-center equilibrium into a saddle-center one");
    add_common_options(destabilize, cfg, raw_params);
    destabilize->add_option("--gain-c", cfg.gain_c, "gain c > omega_1 (default 2*omega_1)");

    app.add_subcommand("list-systems", "describe built-in systems");

    CLI11_PARSE(app, argc, argv);

    try {
        parse_params(raw_params, cfg);
    } catch (const hamstab::Error& e) {
        std::cerr << "hamstab: " << e.what() << "\n";
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return hamstab::dispatch(command, cfg);
}
