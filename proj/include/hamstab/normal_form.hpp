// Symplectic eigen-normalization: scaling constants, the eigenvector matrix
// M, the hyperbolic-plane rotation N, and the transform S = N * M^{-1} that
// carries a system to linear normal-form coordinates.
//
// Coordinate conventions. Normal-form states are ordered (q_1..q_n, p_1..p_n).
// M maps normal-form coordinates to original displacements, z - z0 = M (q;p)bar;
// S maps the other way, (q;p) = S (z - z0). For a saddle-center system the
// quadratic part of H becomes
//     lambda/2 (p_1^2 - q_1^2) + sum_k omega_k/2 (p_k^2 + q_k^2),
// for an all-center system sum_i omega_i/2 (p_i^2 + q_i^2), with frequencies
// ascending.
//
// Determinism. Eigen-solvers return eigenvectors up to arbitrary scale and
// phase, so the builder pins a calibration before computing anything:
//  - each eigenvector is rescaled so its leading (first significant)
//    component equals its eigenvalue; vectors whose first component vanishes
//    are rescaled to unit trailing component instead;
//  - the pairing <v_+, J v_-> is made positive by negating v_- if needed,
//    and center vectors are conjugated if <Re v, J Im v> < 0;
//  - after S is formed, each canonical plane (q_k, p_k) is sign-flipped so
//    the largest-magnitude entry of the q_k row of S is positive.
// The calibration is what makes reports reproducible run to run.

#pragma once

#include "hamstab/spectral.hpp"

#include <vector>

namespace hamstab {

struct NormalFormTransform {
    int n = 0;
    EquilibriumKind kind = EquilibriumKind::Other;
    double lambda = 0.0;          // 0 for all-center transforms
    std::vector<double> omegas;   // ascending
    Vec c;                        // normalization constants, length n
    Mat M, N, S, S_inv;           // 2n x 2n; S = N M^{-1}, S_inv = M N^T
    Vec z0;
    double conjugation_residual = 0.0;

    Vec to_normal_form(const Vec& z) const { return S * (z - z0); }
    Vec from_normal_form(const Vec& qp) const { return z0 + S_inv * qp; }

    // Feedback covectors: rows 1..n of S.
    Mat feedback_rows() const { return S.topRows(n); }

    // Diagonal of the quadratic form in normal-form coordinates,
    // (-lambda, omega_2.., lambda, omega_2..) or (omega.., omega..).
    Vec normal_form_diagonal() const;
};

// Eigenvectors after calibration (see file comment), plus the constants
//   c_1 = <v_+, J v_->^{-1/2},  c_k = <Re v_k, J Im v_k>^{-1/2}.
struct GaugedEigenvectors {
    Vec saddle_pos, saddle_neg;
    std::vector<CVec> centers;
    Vec c;
};

GaugedEigenvectors calibrate_eigenvectors(const SpectrumClassification& cls);

// Convenience: constants alone, via calibration.
Vec normalization_constants(const SpectrumClassification& cls);

// Columns are the scaled eigenvectors:
//   saddle-center: (c1 v_+, c2 Re v_2, .., cn Re v_n, c1 v_-, c2 Im v_2, ..)
//   all-center:    (c1 Re v_1, .., cn Re v_n, c1 Im v_1, .., cn Im v_n)
Mat eigenvector_matrix(const GaugedEigenvectors& g, EquilibriumKind kind, int n);
Mat eigenvector_matrix(const SpectrumClassification& cls);

// Orthogonal symplectic rotation acting on the (1, n+1) plane only:
//   q_1 = (qbar_1 - pbar_1)/sqrt(2),  p_1 = (qbar_1 + pbar_1)/sqrt(2).
Mat saddle_rotation(int n);

// Full construction. Validates the conjugated Hessian
//   (S^{-1})^T D^2H(z0) S^{-1} against the normal-form diagonal to 1e-6
// and throws ConstructionError on failure.
NormalFormTransform build_transform(const SpectrumClassification& cls,
                                    const HamiltonianSystem& sys, const Vec& z0);

}  // namespace hamstab
