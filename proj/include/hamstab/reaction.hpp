// Linear-order transition diagnostics in normal-form coordinates: the
// quadratic constants of motion, dividing-surface (q_1 = 0) crossings, and
// reactive/nonreactive classification of trajectories.

#pragma once

#include "hamstab/types.hpp"

#include <vector>

namespace hamstab {

// Constants of motion of the linear flow in normal-form coordinates:
//   I_1 = p_1^2 - q_1^2,  I_k = p_k^2 + q_k^2  (k >= 2).
// A trajectory at linear order is reactive exactly when I_1 > 0.
Vec linear_invariants(const Vec& qp);

struct DsCrossing {
    double time = 0.0;
    int direction = 0;  // +1 forward (p_1 > 0), -1 backward
};

// Diagnostics of one trajectory given in normal-form coordinates.
// `invariants` is evaluated at the first sample; `nhim_distance` is the
// closest recorded approach sqrt(q_1^2 + p_1^2) to the q_1 = p_1 = 0 set.
// Reactivity is horizon-relative: it reports whether q_1 changed sign over
// the supplied samples.
struct ReactionDiagnostics {
    Vec invariants;
    std::vector<DsCrossing> crossings;
    bool reactive = false;
    double nhim_distance = 0.0;
};

// Crossing times are linearly interpolated between samples; the direction is
// the sign of the interpolated p_1 there. Requires at least two samples.
ReactionDiagnostics classify_reactive(const std::vector<double>& times,
                                      const std::vector<Vec>& qp_states);

}  // namespace hamstab
