// Explicit time integration (fixed-step RK4 and adaptive RKF45) with
// trajectory recording, plus Monte-Carlo verification of closed-loop
// asymptotic stability.

#pragma once

#include "hamstab/control.hpp"
#include "hamstab/hamiltonian.hpp"
#include "hamstab/types.hpp"

#include <cstdint>
#include <vector>

namespace hamstab {

enum class StepMethod { RK4, RKF45 };

struct IntegratorConfig {
    StepMethod method = StepMethod::RKF45;
    double dt = 1e-3;          // RK4 step; initial step guess for RKF45
    double rel_tol = 1e-9;     // RKF45
    double abs_tol = 1e-12;    // RKF45
    double t_final = 10.0;
    int record_stride = 1;     // record every k-th accepted step

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;       // strictly increasing
    std::vector<Vec> states;
    std::vector<double> energy;      // H samples (system overloads only)
    std::vector<double> energy_mod;  // H_mod samples (= H without a law)
    std::vector<Vec> feedback;       // F_i samples (closed loop only)

    size_t size() const { return times.size(); }
};

using VectorField = std::function<Vec(const Vec&)>;

// Core integrator. Throws IntegrationError (carrying the last accepted
// point) on step underflow, non-finite states, or domain violations raised
// by the field.
Trajectory integrate(const VectorField& field, const Vec& z_init,
                     const IntegratorConfig& cfg);

// Uncontrolled Hamiltonian flow; records H (and H_mod = H).
Trajectory integrate(const HamiltonianSystem& sys, const Vec& z_init,
                     const IntegratorConfig& cfg);

// Closed-loop flow; records H, H_mod and the feedback values.
Trajectory integrate(const ClosedLoopSystem& cl, const Vec& z_init,
                     const IntegratorConfig& cfg);

struct StabilityReport {
    int n_samples = 0;
    std::uint64_t seed = 0;
    double radius = 0.0;
    double conv_tol = 0.0;
    double t_final = 0.0;
    int converged = 0;
    int failures = 0;  // per-sample integration failures (counted, not fatal)
    double converged_fraction = 0.0;
    double max_final_distance = 0.0;  // over samples that integrated
    CVec jacobian_eigenvalues;        // closed-loop Jacobian at z0 (central differences)
    double max_jacobian_real = 0.0;
};

// Deterministic draw of `count` points uniformly from the ball of the given
// radius around z0. Draw k of a given seed is the same regardless of count.
std::vector<Vec> sample_ball(const Vec& z0, double radius, int count,
                             std::uint64_t seed);

// Integrates n_samples seeded pseudo-random initial conditions drawn
// uniformly from the ball of the given radius around z0 and reports the
// fraction that ends within conv_tol (inf-norm) of z0 at t_final. The seed
// is recorded in the report; results are deterministic given the seed.
StabilityReport verify_stability(const ClosedLoopSystem& cl, double radius,
                                 int n_samples, const IntegratorConfig& cfg,
                                 double conv_tol = 1e-6, std::uint64_t seed = 1);

}  // namespace hamstab
