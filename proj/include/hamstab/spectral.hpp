// Linearization of the Hamiltonian vector field at an equilibrium and
// classification of its spectrum into the saddle-center / all-center
// patterns the feedback construction consumes.

#pragma once

#include "hamstab/calculus.hpp"
#include "hamstab/hamiltonian.hpp"
#include "hamstab/types.hpp"

#include <string>
#include <vector>

namespace hamstab {

enum class EquilibriumKind { SaddleCenter, AllCenter, Other };

std::string to_string(EquilibriumKind kind);

// A = J D^2H(z0). The product J*A is symmetric for any Hamiltonian field.
struct Linearization {
    Mat A;
    Vec z0;
    int n = 0;
};

// Requires |grad H(z0)|_inf <= 1e-8 (z0 must be an equilibrium).
Linearization linearize(const HamiltonianSystem& sys, const Vec& z0);

// Eigenvalues of a Hamiltonian matrix come in (+e, -e) pairs. Kind
// SaddleCenter means exactly one real pair +-lambda plus n-1 imaginary
// pairs +-i omega_k; AllCenter means n imaginary pairs. Frequencies are
// stored ascending. Eigenvectors are kept as the raw solver output; all
// scale/phase conventions are applied later by the normal-form builder.
struct SpectrumClassification {
    EquilibriumKind kind = EquilibriumKind::Other;
    int n = 0;
    double lambda = 0.0;           // > 0 for SaddleCenter
    std::vector<double> omegas;    // ascending, > 0
    Vec saddle_pos, saddle_neg;    // real eigenvectors for +lambda, -lambda
    std::vector<CVec> center_vecs; // eigenvectors for +i omega_k, same order as omegas
    bool resonant = false;         // some omegas coincide within tolerance
    std::string detail;            // diagnostic text for Other / resonant
    CVec eigenvalues;              // all 2n eigenvalues, raw solver order
};

// tol is relative to the spectral radius. Throws ClassificationError when
// the eigenvector basis is too ill-conditioned to be trusted (non-semisimple
// center block). Mixed quartets and zero modes yield kind = Other with a
// diagnostic instead of throwing.
SpectrumClassification classify(const Linearization& lin, double tol = 1e-8);

}  // namespace hamstab
