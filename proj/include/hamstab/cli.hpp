// Command implementations behind the hamstab tool: system selection,
// the analyze / stabilize / simulate / destabilize pipelines and their file
// outputs. Exit codes: 0 success, 2 classification or configuration error,
// 3 precondition or gain error, 4 verification failure.

#pragma once

#include "hamstab/control.hpp"
#include "hamstab/integrate.hpp"
#include "hamstab/io.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace hamstab {

struct RunConfig {
    std::string system_name = "model";
    std::map<std::string, double> params;
    std::string poly_file;
    std::vector<double> guess;       // equilibrium guess override

    double gain_c = std::numeric_limits<double>::quiet_NaN();  // default 2*lambda
    std::vector<double> gain_d;                                // default all ones

    std::string method = "rkf45";
    double dt = 1e-3;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_final = std::numeric_limits<double>::quiet_NaN();  // per-command default
    int record_stride = 1;

    int samples = 100;
    int csv_count = 10;
    double radius = 0.05;
    double conv_tol = 1e-6;
    double converged_threshold = 0.99;
    std::uint64_t seed = 1;

    std::string out_dir = "hamstab_out";
    bool no_control = false;

    bool grid = false;
    int grid_points = 101;
    double grid_span = 1.0;
};

struct PreparedSystem {
    HamiltonianSystem original;
    HamiltonianSystem shifted;  // displacement coordinates about the equilibrium
    Vec z0;                     // equilibrium in original coordinates
};

// Builds the requested system and locates its equilibrium by Newton search
// from the built-in (or user-supplied) guess.
PreparedSystem prepare_system(const RunConfig& cfg);

IntegratorConfig integrator_config(const RunConfig& cfg, double default_t_final);

int run_analyze(const RunConfig& cfg);
int run_stabilize(const RunConfig& cfg);
int run_simulate(const RunConfig& cfg);
int run_destabilize(const RunConfig& cfg);
int run_list_systems();

// Runs one command, mapping library exceptions onto the exit-code contract.
int dispatch(const std::string& command, const RunConfig& cfg);

}  // namespace hamstab
