// Differential calculus on phase space: gradients, Hessians, the canonical
// structure matrix, Hamiltonian vector fields, Poisson brackets, and Newton
// search for equilibria.

#pragma once

#include "hamstab/hamiltonian.hpp"
#include "hamstab/types.hpp"

namespace hamstab {

// Canonical structure matrix [[0, I], [-I, 0]] of size 2n x 2n.
Mat symplectic_matrix(int n);

// J*g without forming J: (g_x, g_P) -> (g_P, -g_x).
Vec apply_symplectic(const Vec& g);

// <u, J v> canonical pairing of two phase-space vectors.
double symplectic_pairing(const Vec& u, const Vec& v);

// Gradient of H at z: analytic when the system provides one, otherwise
// 4th-order central differences with per-coordinate step
// max(1,|z_i|) * eps_mach^(1/5).
Vec gradient(const HamiltonianSystem& sys, const Vec& z);

// Hessian of H at z, symmetric to round-off. Finite-difference fallbacks
// use step scaling eps_mach^(1/4) and return (A + A^T)/2.
Mat hessian(const HamiltonianSystem& sys, const Vec& z);

// Hamiltonian vector field X_H(z) = J grad H(z).
Vec vector_field(const HamiltonianSystem& sys, const Vec& z);

// Gradient of a scalar field, analytic or finite-difference.
Vec field_gradient(const ScalarField& f, const Vec& z);

// {F, G}(z) = grad F . J grad G.
double poisson_bracket(const ScalarField& f, const ScalarField& g, const Vec& z);

// Newton iteration z <- z - (D^2 H)^{-1} grad H until |grad H|_inf <= tol.
// Throws ConvergenceError when max_iter is exhausted and RankError when the
// Hessian is numerically singular along the way.
Vec find_equilibrium(const HamiltonianSystem& sys, const Vec& guess,
                     double tol = 1e-12, int max_iter = 60);

// Jacobian of a vector map by 4th-order central differences with step
// step_scale * max(1, |z|_inf).
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& z,
                double step_scale = 1e-5);

// 4th-order finite-difference gradient of a raw functional (test and
// fallback path; exposed for cross-checking analytic derivatives).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z);

}  // namespace hamstab
