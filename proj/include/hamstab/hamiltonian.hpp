// Hamiltonian system descriptions: built-in example systems, user-supplied
// polynomial Hamiltonians, and the coordinate-shift helper.
//
// States are canonical phase-space points ordered (x_1..x_n, P_1..P_n),
// stored as plain vectors of length 2n in dimensionless model units.

#pragma once

#include "hamstab/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace hamstab {

struct HamiltonianSystem {
    int n = 0;  // degrees of freedom
    std::string name;
    std::map<std::string, double> params;

    std::function<double(const Vec&)> energy;
    std::function<Vec(const Vec&)> grad;           // empty -> finite differences
    std::function<Mat(const Vec&)> hess;           // empty -> finite differences
    std::function<void(const Vec&)> domain_check;  // empty -> whole space; throws SingularityError

    int dim() const { return 2 * n; }
    bool analytic_gradient() const { return static_cast<bool>(grad); }

    // Validates dimension, finiteness and domain membership of a state.
    void check_state(const Vec& z) const;

    ScalarField as_field() const;
};

// Sum of monomials c * prod z_i^{e_i}; evaluation is exact term-by-term,
// which makes it the ingestion format for user-defined systems.
struct PolynomialTerm {
    double coeff = 0.0;
    std::vector<int> exps;  // length 2n, non-negative
};

struct PolynomialHamiltonian {
    int n = 0;
    std::vector<PolynomialTerm> terms;

    void validate() const;  // throws ConfigError
    double eval(const Vec& z) const;
    Vec gradient(const Vec& z) const;
    Mat hessian(const Vec& z) const;
};

// Quadratic system with one hyperbolic degree of freedom (rate lambda > 0)
// and centers at the given frequencies:
//   H = lambda/2 (P_1^2 - x_1^2) + sum_k omega_k/2 (P_k^2 + x_k^2).
HamiltonianSystem make_quadratic(double lambda, const std::vector<double>& omegas);

// Quadratic system with centers only: H = sum_i omega_i/2 (P_i^2 + x_i^2).
HamiltonianSystem make_quadratic_center(const std::vector<double>& omegas);

// Double-well potential coupled to a transverse oscillator,
//   V(x1,x2) = x1^2 (x1-1)^2 / a^2 + x2^2 / b^2,  a > b,
// with unit masses. Stored in original coordinates; the saddle sits at
// (1/2, 0, 0, 0).
HamiltonianSystem make_model(double a, double b);

// Hydrogen atom in crossed electric (strength eps) and magnetic fields,
// in the standard regularized momentum form. Original coordinates; the
// outer (Stark) saddle is on the positive x1 axis. Evaluations with
// R < 1e-8 raise SingularityError.
HamiltonianSystem make_hydrogen(double eps);

HamiltonianSystem make_system(const PolynomialHamiltonian& poly);

// System expressed in displacement coordinates about z0:
//   H'(z) = H(z + z0) - H(z0),
// so the equilibrium moves to the origin with energy zero.
HamiltonianSystem shift_to_equilibrium(const HamiltonianSystem& sys, const Vec& z0);

}  // namespace hamstab
