// Feedback construction: linear feedback covectors from the normal-form
// transform, the modified Hamiltonian H + c/2 F_1^2, the dissipative closed
// loop, stabilizability checks, and the inverse problem of destabilizing an
// all-center equilibrium into a saddle-center one.

#pragma once

#include "hamstab/normal_form.hpp"

namespace hamstab {

// Linear feedback functions F_i(z) = s_i . (z - z0), where s_i is row i of
// S. In normal-form coordinates F_i = q_i, so the F_i are in involution and
// vanish at z0 by construction.
struct FeedbackLaw {
    Mat rows;   // n x 2n covectors s_1..s_n
    Vec z0;     // 2n
    double c = 0.0;        // proportional gain on the F_1 channel
    Vec d;                 // dissipative gains d_1..d_n
    double rate = 0.0;     // threshold the gain was validated against

    int n() const { return static_cast<int>(rows.rows()); }
    double F(int i, const Vec& z) const { return rows.row(i).dot(z - z0); }
    Vec F_all(const Vec& z) const { return rows * (z - z0); }
};

// Stabilizing law; requires kind SaddleCenter, c > lambda strictly and
// d_i > 0 (GainError otherwise). Empty d means d_i = 1.
FeedbackLaw stabilizing_law(const NormalFormTransform& t, double c, Vec d = Vec());

// Closed loop z' = X_{H_mod} + sum_i d_i {F_i, H_mod} X_{F_i} with
// H_mod = H + quad_gain/2 F_1^2. quad_gain is +c for stabilization and -c
// for destabilization (where all d_i = 0 and the loop stays conservative).
// Along closed-loop trajectories d/dt H_mod = -sum_i d_i ({F_i, H_mod})^2.
struct ClosedLoopSystem {
    HamiltonianSystem base;
    FeedbackLaw law;
    double quad_gain = 0.0;

    double hmod(const Vec& z) const;
    Vec hmod_gradient(const Vec& z) const;
    Mat hmod_hessian(const Vec& z) const;
    ScalarField hmod_field() const;

    // H_mod as a conservative Hamiltonian system (no dissipative terms).
    HamiltonianSystem conservative_system() const;
};

ClosedLoopSystem make_closed_loop(const HamiltonianSystem& sys,
                                  const NormalFormTransform& t, double c,
                                  Vec d = Vec());

Vec closed_loop_field(const ClosedLoopSystem& cl, const Vec& z);

// Hypotheses behind asymptotic stability of the closed loop:
//  - D^2 H_mod(z0) positive definite,
//  - the F_i in involution ({F_i, F_j} = 0),
//  - the covector family {s_i A^k : k < 2n} has full rank 2n
//    (A = J D^2H_mod(z0)); this is the observability-type condition that
//    lets LaSalle's principle conclude convergence.
struct StabilizabilityReport {
    bool positive_definite = false;
    bool involution = false;
    int rank_codistribution = 0;
    int full_rank = 0;
    double min_hmod_eigenvalue = 0.0;
    double max_bracket_residual = 0.0;
    bool ok() const {
        return positive_definite && involution && rank_codistribution == full_rank;
    }
};

StabilizabilityReport stabilizability_checks(const ClosedLoopSystem& cl);

// Conservative control u = c F_1 applied to an all-center equilibrium,
// turning it into a saddle-center one: returns the system with
// H_destab = H - c/2 F_1^2 where F_1 = q_1 is the normal-form coordinate of
// the slowest center. Requires c > omega_1 (GainError) and an all-center
// spectrum (ClassificationError). The resulting linearization has one real
// pair +-sqrt(omega_1 (c - omega_1)).
ClosedLoopSystem destabilize(const HamiltonianSystem& sys, const Vec& z0, double c);

}  // namespace hamstab
