// Shared value types and error hierarchy.
//
// All library operations are pure functions of their arguments; every struct
// in the library is a plain value that is safe to copy and to share across
// threads once constructed.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace hamstab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation outside the declared domain (e.g. Coulomb singularity).
struct SingularityError : Error {
    using Error::Error;
};

// Iteration budget exhausted without meeting the tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// A matrix required to be invertible / full-rank is not.
struct RankError : Error {
    using Error::Error;
};

// Spectrum is not of a kind the construction can consume.
struct ClassificationError : Error {
    using Error::Error;
};

// The symplectic normalization could not be completed or validated.
struct ConstructionError : Error {
    using Error::Error;
};

// Feedback gain outside its admissible range.
struct GainError : Error {
    using Error::Error;
};

// Caller violated a documented precondition.
struct PreconditionError : Error {
    using Error::Error;
};

// Bad user input (CLI flags, config files, system parameters).
struct ConfigError : Error {
    using Error::Error;
};

// Time integration aborted; carries the last accepted point.
struct IntegrationError : Error {
    double t_last;
    Vec z_last;
    IntegrationError(const std::string& what, double t, Vec z)
        : Error(what), t_last(t), z_last(std::move(z)) {}
};

// Scalar function on phase space with an optional analytic gradient.
// When `grad` is empty the caller falls back to finite differences.
struct ScalarField {
    int n = 0;  // degrees of freedom; states have length 2n
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
};

inline bool all_finite(const Vec& v) {
    return v.allFinite();
}

inline bool all_finite(const Mat& m) {
    return m.allFinite();
}

}  // namespace hamstab
