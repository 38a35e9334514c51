#include "hamstab/reaction.hpp"

#include <cmath>

namespace hamstab {

Vec linear_invariants(const Vec& qp) {
    if (qp.size() < 2 || qp.size() % 2 != 0) {
        throw PreconditionError("linear_invariants: state length must be even and >= 2");
    }
    const int n = static_cast<int>(qp.size()) / 2;
    Vec inv(n);
    inv(0) = qp(n) * qp(n) - qp(0) * qp(0);
    for (int k = 1; k < n; ++k) {
        inv(k) = qp(n + k) * qp(n + k) + qp(k) * qp(k);
    }
    return inv;
}

ReactionDiagnostics classify_reactive(const std::vector<double>& times,
                                      const std::vector<Vec>& qp_states) {
    if (times.size() != qp_states.size()) {
        throw PreconditionError("classify_reactive: times and states differ in length");
    }
    if (times.size() < 2) {
        throw PreconditionError("classify_reactive: need at least two samples");
    }
    const int n = static_cast<int>(qp_states.front().size()) / 2;

    ReactionDiagnostics diag;
    diag.invariants = linear_invariants(qp_states.front());
    diag.nhim_distance = std::hypot(qp_states.front()(0), qp_states.front()(n));

    for (size_t i = 1; i < qp_states.size(); ++i) {
        const double q_prev = qp_states[i - 1](0);
        const double q_next = qp_states[i](0);
        diag.nhim_distance = std::min(diag.nhim_distance,
                                      std::hypot(q_next, qp_states[i](n)));
        if (!(q_prev * q_next < 0)) continue;
        const double frac = q_prev / (q_prev - q_next);
        const double t = times[i - 1] + frac * (times[i] - times[i - 1]);
        const double p_prev = qp_states[i - 1](n);
        const double p_next = qp_states[i](n);
        const double p = p_prev + frac * (p_next - p_prev);
        diag.crossings.push_back({t, p > 0 ? +1 : -1});
    }
    diag.reactive = !diag.crossings.empty();
    return diag;
}

}  // namespace hamstab
