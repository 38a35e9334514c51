#include "hamstab/control.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <utility>

namespace hamstab {

FeedbackLaw stabilizing_law(const NormalFormTransform& t, double c, Vec d) {
    if (t.kind != EquilibriumKind::SaddleCenter) {
        throw ClassificationError("stabilizing_law: requires a saddle-center transform");
    }
    if (!(c > t.lambda)) {
        std::ostringstream os;
        os << "stabilizing_law: gain c = " << c << " must exceed lambda = " << t.lambda;
        throw GainError(os.str());
    }
    if (d.size() == 0) d = Vec::Ones(t.n);
    if (d.size() != t.n) throw GainError("stabilizing_law: need one dissipative gain per degree of freedom");
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0)) throw GainError("stabilizing_law: dissipative gains must be > 0");
    }
    FeedbackLaw law;
    law.rows = t.feedback_rows();
    law.z0 = t.z0;
    law.c = c;
    law.d = std::move(d);
    law.rate = t.lambda;
    return law;
}

double ClosedLoopSystem::hmod(const Vec& z) const {
    const double f1 = law.F(0, z);
    return base.energy(z) + 0.5 * quad_gain * f1 * f1;
}

Vec ClosedLoopSystem::hmod_gradient(const Vec& z) const {
    Vec g = base.grad ? base.grad(z) : fd_gradient(base.energy, z);
    if (quad_gain != 0.0) g += quad_gain * law.F(0, z) * law.rows.row(0).transpose();
    return g;
}

Mat ClosedLoopSystem::hmod_hessian(const Vec& z) const {
    Mat h = hessian(base, z);
    if (quad_gain != 0.0) {
        h += quad_gain * (law.rows.row(0).transpose() * law.rows.row(0));
    }
    return h;
}

ScalarField ClosedLoopSystem::hmod_field() const {
    const ClosedLoopSystem self = *this;
    ScalarField f;
    f.n = base.n;
    f.value = [self](const Vec& z) { return self.hmod(z); };
    f.grad = [self](const Vec& z) { return self.hmod_gradient(z); };
    return f;
}

HamiltonianSystem ClosedLoopSystem::conservative_system() const {
    const ClosedLoopSystem self = *this;
    HamiltonianSystem sys;
    sys.n = base.n;
    sys.name = base.name + "+quadratic-feedback";
    sys.params = base.params;
    sys.domain_check = base.domain_check;
    sys.energy = [self](const Vec& z) { return self.hmod(z); };
    sys.grad = [self](const Vec& z) { return self.hmod_gradient(z); };
    sys.hess = [self](const Vec& z) { return self.hmod_hessian(z); };
    return sys;
}

ClosedLoopSystem make_closed_loop(const HamiltonianSystem& sys,
                                  const NormalFormTransform& t, double c, Vec d) {
    return ClosedLoopSystem{sys, stabilizing_law(t, c, std::move(d)), c};
}

Vec closed_loop_field(const ClosedLoopSystem& cl, const Vec& z) {
    cl.base.check_state(z);
    const Vec base = apply_symplectic(cl.hmod_gradient(z));
    Vec f = base;
    for (int i = 0; i < cl.law.n(); ++i) {
        const double di = cl.law.d.size() ? cl.law.d(i) : 0.0;
        if (di == 0.0) continue;
        // {F_i, H_mod} = s_i . J grad H_mod; equals dF_i/dt along the loop
        // because the F_i are in involution.
        const double bracket = cl.law.rows.row(i).dot(base);
        f += di * bracket * apply_symplectic(cl.law.rows.row(i).transpose());
    }
    return f;
}

StabilizabilityReport stabilizability_checks(const ClosedLoopSystem& cl) {
    const int n = cl.base.n;
    const int m = 2 * n;
    StabilizabilityReport rep;
    rep.full_rank = m;

    const Mat h0 = cl.hmod_hessian(cl.law.z0);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h0 + h0.transpose()));
    rep.min_hmod_eigenvalue = es.eigenvalues().minCoeff();
    rep.positive_definite = rep.min_hmod_eigenvalue > 0;

    rep.max_bracket_residual = 0.0;
    for (int i = 0; i < cl.law.n(); ++i) {
        for (int j = 0; j < cl.law.n(); ++j) {
            const double b =
                cl.law.rows.row(i).dot(apply_symplectic(cl.law.rows.row(j).transpose()));
            rep.max_bracket_residual = std::max(rep.max_bracket_residual, std::abs(b));
        }
    }
    rep.involution = rep.max_bracket_residual <= 1e-10;

    // Krylov co-distribution at z0: rows s_i A^k, A = J D^2H_mod(z0).
    Mat a(m, m);
    a.topRows(n) = h0.bottomRows(n);
    a.bottomRows(n) = -h0.topRows(n);
    Mat stack(cl.law.n() * m, m);
    int r = 0;
    for (int i = 0; i < cl.law.n(); ++i) {
        Eigen::RowVectorXd row = cl.law.rows.row(i);
        for (int k = 0; k < m; ++k) {
            stack.row(r++) = row;
            row = row * a;
        }
    }
    Eigen::JacobiSVD<Mat> svd(stack);
    const double smax = svd.singularValues()(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > 1e-8 * smax) ++rank;
    }
    rep.rank_codistribution = rank;
    return rep;
}

ClosedLoopSystem destabilize(const HamiltonianSystem& sys, const Vec& z0, double c) {
    const Linearization lin = linearize(sys, z0);
    const SpectrumClassification cls = classify(lin);
    if (cls.kind != EquilibriumKind::AllCenter) {
        throw ClassificationError("destabilize: requires an all-center equilibrium, got " +
                                  to_string(cls.kind) +
                                  (cls.detail.empty() ? "" : " (" + cls.detail + ")"));
    }
    const NormalFormTransform t = build_transform(cls, sys, z0);
    const double omega1 = t.omegas.front();
    if (!(c > omega1)) {
        std::ostringstream os;
        os << "destabilize: gain c = " << c << " must exceed omega_1 = " << omega1;
        throw GainError(os.str());
    }
    FeedbackLaw law;
    law.rows = t.feedback_rows();
    law.z0 = t.z0;
    law.c = c;
    law.d = Vec::Zero(t.n);
    law.rate = omega1;
    return ClosedLoopSystem{sys, std::move(law), -c};
}

}  // namespace hamstab
