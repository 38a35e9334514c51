// File formats: trajectory CSV, JSON report fragments, polynomial system
// ingestion. All numeric output is locale-independent ('.' decimal) and
// deterministic, so repeated runs with the same seed produce byte-identical
// files.

#pragma once

#include "hamstab/hamiltonian.hpp"
#include "hamstab/integrate.hpp"
#include "hamstab/normal_form.hpp"

#include <json.hpp>  // vendored nlohmann/json single header

#include <string>

namespace hamstab {

using Json = nlohmann::ordered_json;

// Shortest round-trip representation, '%.17g' fallback; never locale-dependent.
std::string format_double(double x);

Json json_vector(const Vec& v);
Json json_matrix(const Mat& m);
Json json_complex_list(const CVec& v);  // [[re, im], ...]

// Columns: t, z1..z2n, H, H_mod, F1..Fn, I1..In. The transform supplies the
// feedback values (normal-form q coordinates) and the quadratic invariants;
// without one the F and I columns are omitted.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const NormalFormTransform* transform);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);

// Quadratic invariants appropriate for the transform kind: hyperbolic
// p1^2 - q1^2 first for saddle-center, center actions otherwise.
Vec quadratic_invariants(const NormalFormTransform& t, const Vec& qp);

// { "n": int, "terms": [ { "coeff": real, "exps": [2n ints] }, ... ] }
PolynomialHamiltonian load_polynomial(const std::string& path);

// Quadratic form 1/2 z^T Q z (about the origin) as an ingestible polynomial.
PolynomialHamiltonian quadratic_form_polynomial(const Mat& q);

}  // namespace hamstab
