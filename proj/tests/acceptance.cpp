// Acceptance suite: one line per criterion, PASS or FAIL, nonzero exit when
// anything fails. Every tolerance is pinned here, in code.

#include "hamstab/control.hpp"
#include "hamstab/integrate.hpp"
#include "hamstab/normal_form.hpp"
#include "hamstab/reaction.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hamstab;

namespace {

int g_failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s  criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

struct PreparedSaddle {
    HamiltonianSystem sys;   // shifted to the equilibrium
    Vec z0_original;
    Linearization lin;
    SpectrumClassification cls;
    NormalFormTransform t;
};

PreparedSaddle prepare(const HamiltonianSystem& raw, const Vec& guess) {
    PreparedSaddle p;
    p.z0_original = find_equilibrium(raw, guess);
    p.sys = shift_to_equilibrium(raw, p.z0_original);
    const Vec origin = Vec::Zero(p.sys.dim());
    p.lin = linearize(p.sys, origin);
    p.cls = classify(p.lin);
    p.t = build_transform(p.cls, p.sys, origin);
    return p;
}

PreparedSaddle prepare_hydrogen() {
    Vec guess = Vec::Zero(6);
    guess(0) = 1.3;
    guess(4) = -0.65;
    return prepare(make_hydrogen(0.58), guess);
}

PreparedSaddle prepare_model(double a, double b) {
    Vec guess = Vec::Zero(4);
    guess(0) = 0.5;
    return prepare(make_model(a, b), guess);
}

// ascending-frequency plane ordering maps our plane k to reference plane
// perm[k] of the printed hydrogen matrices
const int kHydPerm[6] = {0, 2, 1, 3, 5, 4};

Mat hydrogen_reference_linearization() {
    Mat m = Mat::Zero(6, 6);
    m(0, 1) = -0.5;  m(0, 3) = 1.0;
    m(1, 0) = 0.5;   m(1, 4) = 1.0;
    m(2, 5) = 1.0;
    m(3, 0) = 0.63343;   m(3, 4) = -0.5;
    m(4, 1) = -0.691715; m(4, 3) = 0.5;
    m(5, 2) = -0.441715;
    return m;
}

Mat hydrogen_reference_S() {
    Mat s(6, 6);
    s <<  0.998122, 0,         0,        0,         -0.741116, 0,
          0,        0.839317,  0,        -0.623201,  0,        0,
          0,        0,         0,         0,         0,        1.22663,
          0,        0.0213366, 0,         0.986039,  0,        0,
          0.0253736, 0,        0,         0,         1.1726,   0,
          0,        0,        -0.81524,   0,         0,        0;
    return s;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

void criterion_1(const PreparedSaddle& hyd) {
    const double err =
        (hyd.lin.A - hydrogen_reference_linearization()).cwiseAbs().maxCoeff();
    report(1, "hydrogen linearization matches the printed matrix", err <= 1e-4,
           "max entry error " + fmt(err));
}

void criterion_2(const PreparedSaddle& hyd) {
    const double e_lambda = std::abs(hyd.cls.lambda - 0.63645);
    const double e_w1 = std::abs(hyd.cls.omegas[0] - 0.664616);
    const double e_w2 = std::abs(hyd.cls.omegas[1] - 0.981506);
    const bool ok = e_lambda <= 1e-5 && e_w1 <= 1e-5 && e_w2 <= 1e-5;
    report(2, "hydrogen spectrum lambda/omega", ok,
           "errors " + fmt(e_lambda) + ", " + fmt(e_w1) + ", " + fmt(e_w2));
}

void criterion_3(const PreparedSaddle& hyd) {
    Vec expect(3);
    expect << 1.09551, 0.81524, 0.634944;  // ascending-frequency order
    const double err = (hyd.t.c - expect).cwiseAbs().maxCoeff();
    report(3, "hydrogen normalization constants", err <= 1e-4, "max error " + fmt(err));
}

void criterion_4(const PreparedSaddle& hyd) {
    const Mat ref = hydrogen_reference_S();
    double err = 0.0;
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
            err = std::max(err, std::abs(hyd.t.S(r, c) - ref(kHydPerm[r], c)));
        }
    }
    const Mat rows = hyd.t.feedback_rows();
    double ferr = std::max({std::abs(rows(0, 0) - 0.998122),
                            std::abs(rows(0, 4) + 0.741116),
                            std::abs(rows(1, 5) - 1.22663),
                            std::abs(rows(2, 1) - 0.839317),
                            std::abs(rows(2, 3) + 0.623201)});
    report(4, "hydrogen transform S and feedback coefficients",
           err <= 1e-4 && ferr <= 1e-4,
           "S error " + fmt(err) + ", F error " + fmt(ferr));
}

void criterion_5() {
    bool ok = true;
    std::ostringstream detail;
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    for (auto [a, b] : std::vector<std::pair<double, double>>{{2, 1}, {3, 1}, {4, 2}}) {
        const PreparedSaddle m = prepare_model(a, b);
        double err = std::abs(m.cls.lambda - 1.0 / a);
        err = std::max(err, std::abs(m.cls.omegas[0] - std::sqrt(2.0) / b));
        const Mat rows = m.t.feedback_rows();
        err = std::max(err, std::abs(rows(0, 0) - 1.0 / std::sqrt(a)));
        err = std::max(err, std::abs(rows(1, 3) - std::sqrt(b) / std::pow(2.0, 0.25)));
        // remaining coefficients vanish
        err = std::max({err, std::abs(rows(0, 1)), std::abs(rows(0, 2)),
                        std::abs(rows(0, 3)), std::abs(rows(1, 0)),
                        std::abs(rows(1, 1)), std::abs(rows(1, 2))});
        // modified potential: c F_1^2/2 with c = 1/a equals x1^2/(2 a^2)
        for (int k = 0; k < 10; ++k) {
            Vec z(4);
            for (int i = 0; i < 4; ++i) z(i) = unif(rng);
            const double f1 = rows.row(0).dot(z);
            err = std::max(err, std::abs(0.5 * (1.0 / a) * f1 * f1 -
                                         z(0) * z(0) / (2.0 * a * a)));
        }
        if (err > 1e-10) ok = false;
        detail << "(a=" << a << ",b=" << b << ") err " << fmt(err) << "  ";
    }
    report(5, "model example: rates, feedback, modified potential", ok, detail.str());
}

void criterion_6(const PreparedSaddle& hyd, const PreparedSaddle& model) {
    bool ok = true;
    std::ostringstream detail;
    for (const PreparedSaddle* p : {&hyd, &model}) {
        const ClosedLoopSystem cl = make_closed_loop(p->sys, p->t, 2.0 * p->t.lambda);
        const StabilizabilityReport rep = stabilizability_checks(cl);
        if (!rep.positive_definite || rep.max_bracket_residual > 1e-10 ||
            rep.rank_codistribution != p->sys.dim()) {
            ok = false;
        }
        detail << p->sys.name << ": min eig " << fmt(rep.min_hmod_eigenvalue)
               << ", bracket " << fmt(rep.max_bracket_residual) << ", rank "
               << rep.rank_codistribution << "/" << p->sys.dim() << "  ";
    }
    report(6, "stabilizability hypotheses at c = 2 lambda", ok, detail.str());
}

void criterion_7(const PreparedSaddle& hyd, const PreparedSaddle& model) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::ostringstream detail;
    struct Case {
        const PreparedSaddle* p;
        double radius;
    };
    for (const Case& c : {Case{&hyd, 0.05}, Case{&model, 0.1}}) {
        const ClosedLoopSystem cl = make_closed_loop(c.p->sys, c.p->t,
                                                     2.0 * c.p->t.lambda);
        IntegratorConfig cfg;
        cfg.t_final = 300.0;
        const StabilityReport rep = verify_stability(cl, c.radius, 100, cfg, 1e-6, 1);
        if (rep.converged_fraction != 1.0 || rep.max_jacobian_real >= -1e-6) ok = false;
        detail << c.p->sys.name << ": fraction " << rep.converged_fraction
               << ", max Re " << fmt(rep.max_jacobian_real) << "  ";
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > 60.0) ok = false;
    detail << "(" << fmt(seconds) << " s)";
    report(7, "asymptotic stability of 100 seeded samples per system", ok, detail.str());
}

void criterion_8(const PreparedSaddle& hyd, const PreparedSaddle& model) {
    bool ok = true;
    double worst_rel = 0.0, worst_slack = 0.0;
    for (const PreparedSaddle* p : {&hyd, &model}) {
        const ClosedLoopSystem cl = make_closed_loop(p->sys, p->t, 2.0 * p->t.lambda);
        const double radius = p->sys.n == 3 ? 0.05 : 0.1;
        const std::vector<Vec> ics = sample_ball(Vec::Zero(p->sys.dim()), radius, 5, 8);
        for (const Vec& ic : ics) {
            IntegratorConfig cfg;
            cfg.method = StepMethod::RK4;
            cfg.dt = 1e-3;
            cfg.t_final = 15.0;
            const Trajectory traj = integrate(cl, ic, cfg);

            double scale = 0.0;
            std::vector<double> rate(traj.size());
            for (size_t i = 0; i < traj.size(); ++i) {
                const Vec base = apply_symplectic(cl.hmod_gradient(traj.states[i]));
                double sum = 0.0;
                for (int k = 0; k < p->sys.n; ++k) {
                    const double br = cl.law.rows.row(k).dot(base);
                    sum += cl.law.d(k) * br * br;
                }
                rate[i] = -sum;
                scale = std::max(scale, std::abs(rate[i]));
            }
            for (size_t i = 1; i + 1 < traj.size(); ++i) {
                const double num = (traj.energy_mod[i + 1] - traj.energy_mod[i - 1]) /
                                   (traj.times[i + 1] - traj.times[i - 1]);
                worst_rel = std::max(worst_rel, std::abs(num - rate[i]) / scale);
            }
            for (size_t i = 1; i < traj.size(); ++i) {
                worst_slack = std::max(
                    worst_slack, traj.energy_mod[i] - traj.energy_mod[i - 1]);
            }
        }
    }
    if (worst_rel > 1e-4 || worst_slack > 1e-10) ok = false;
    report(8, "dissipation identity and monotone H_mod on 10 trajectories", ok,
           "max relative error " + fmt(worst_rel) + ", max increase " + fmt(worst_slack));
}

void criterion_9() {
    bool ok = true;
    std::string detail;
    const HamiltonianSystem sys = make_quadratic_center({1.0, 2.0});
    const Vec origin = Vec::Zero(4);
    const ClosedLoopSystem cl = destabilize(sys, origin, 2.0);
    const SpectrumClassification after =
        classify(linearize(cl.conservative_system(), origin));
    const double e_lambda = std::abs(after.lambda - 1.0);
    const double e_omega = after.omegas.size() == 1
                               ? std::abs(after.omegas[0] - 2.0)
                               : 1.0;
    if (after.kind != EquilibriumKind::SaddleCenter || e_lambda > 1e-8 ||
        e_omega > 1e-8) {
        ok = false;
    }
    detail = "lambda error " + fmt(e_lambda) + ", omega error " + fmt(e_omega);
    bool rejected = false;
    try {
        destabilize(sys, origin, 1.0);  // c = omega_1 is inadmissible
    } catch (const GainError&) {
        rejected = true;
    }
    try {
        destabilize(sys, origin, 0.5);
    } catch (const GainError&) {
        rejected = rejected && true;
    }
    if (!rejected) ok = false;
    report(9, "destabilization of the all-center quadratic", ok,
           detail + (rejected ? ", low gains rejected" : ", low gain NOT rejected"));
}

void criterion_10(const PreparedSaddle& hyd) {
    // exact linear saddle flow: sign(I1) is reactivity, zero mismatches
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int mismatches = 0, tested = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Vec z0(4);
        for (int i = 0; i < 4; ++i) z0(i) = unif(rng);
        const double i1 = z0(2) * z0(2) - z0(0) * z0(0);
        if (std::abs(i1) < 1e-10) continue;
        std::vector<double> times;
        std::vector<Vec> states;
        for (int i = 0; i <= 3000; ++i) {
            const double t = -12.0 + 24.0 * i / 3000.0;
            times.push_back(t);
            states.push_back(oracles::saddle_center_flow(1.0, {1.0}, z0, t));
        }
        const ReactionDiagnostics diag = classify_reactive(times, states);
        if (diag.reactive != (i1 > 0)) ++mismatches;
        ++tested;
    }

    // center actions on the uncontrolled hydrogen flow, whose Coulomb term
    // couples the modes nonlinearly; center-subspace data stays near the
    // invariant set, so the cubic-order bound applies over the horizon
    Vec qp0 = Vec::Zero(6);
    qp0(1) = 0.5e-3;
    qp0(4) = 0.5e-3;
    qp0(2) = 0.5e-3;
    qp0(5) = 0.5e-3;
    const Vec z0 = hyd.t.from_normal_form(qp0);
    IntegratorConfig cfg;
    cfg.t_final = 10.0;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-15;
    const Trajectory traj = integrate(hyd.sys, z0, cfg);
    const Vec inv0 = linear_invariants(qp0);
    double drift = 0.0;
    for (const Vec& z : traj.states) {
        const Vec inv = linear_invariants(hyd.t.to_normal_form(z));
        drift = std::max(drift, (inv.tail(2) - inv0.tail(2)).cwiseAbs().maxCoeff());
    }

    const bool ok = mismatches == 0 && tested >= 990 && drift <= 1e-6;
    report(10, "reaction geometry: I1 predicts reactivity; actions conserved", ok,
           std::to_string(mismatches) + " mismatches of " + std::to_string(tested) +
               ", action drift " + fmt(drift));
}

void criterion_11(const PreparedSaddle& hyd, const PreparedSaddle& model) {
    bool ok = true;
    std::ostringstream detail;

    // symplecticity of M and S
    double worst_sympl = 0.0;
    for (const PreparedSaddle* p : {&hyd, &model}) {
        const Mat j = symplectic_matrix(p->sys.n);
        worst_sympl = std::max(worst_sympl,
                               (p->t.M.transpose() * j * p->t.M - j).cwiseAbs().maxCoeff());
        worst_sympl = std::max(worst_sympl,
                               (p->t.S.transpose() * j * p->t.S - j).cwiseAbs().maxCoeff());
    }
    if (worst_sympl > 1e-8) ok = false;
    detail << "symplectic residual " << fmt(worst_sympl);

    // RK4 order against the closed-form flow
    const HamiltonianSystem h2 = make_quadratic(1.0, {1.0});
    Vec z0(4);
    z0 << 0.2, 0.3, -0.1, 0.15;
    const Vec exact = oracles::saddle_center_flow(1.0, {1.0}, z0, 2.0);
    auto err_at = [&](double dt) {
        IntegratorConfig cfg;
        cfg.method = StepMethod::RK4;
        cfg.dt = dt;
        cfg.t_final = 2.0;
        cfg.record_stride = 1 << 30;
        return (integrate(h2, z0, cfg).states.back() - exact).lpNorm<Eigen::Infinity>();
    };
    const double e1 = err_at(1e-2), e2 = err_at(5e-3), e3 = err_at(2.5e-3);
    const bool order_ok = e1 / e2 >= 4 && e1 / e2 <= 64 && e2 / e3 >= 4 && e2 / e3 <= 64;
    if (!order_ok) ok = false;
    detail << ", RK4 ratios " << fmt(e1 / e2) << "/" << fmt(e2 / e3);

    // analytic vs finite-difference gradients
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    double worst_grad = 0.0;
    for (const PreparedSaddle* p : {&hyd, &model}) {
        HamiltonianSystem fd_only = p->sys;
        fd_only.grad = {};
        fd_only.hess = {};
        for (int k = 0; k < 100; ++k) {
            Vec z(p->sys.dim());
            for (int i = 0; i < p->sys.dim(); ++i) z(i) = 0.4 * unif(rng);
            const Vec ga = gradient(p->sys, z);
            const Vec gf = gradient(fd_only, z);
            for (int i = 0; i < p->sys.dim(); ++i) {
                worst_grad = std::max(worst_grad, std::abs(ga(i) - gf(i)) /
                                                      std::max(1.0, std::abs(ga(i))));
            }
        }
    }
    if (worst_grad > 1e-6) ok = false;
    detail << ", gradient agreement " << fmt(worst_grad);

    report(11, "numerical hygiene: symplecticity, RK4 order, gradients", ok,
           detail.str());
}

}  // namespace

int main() {
    try {
        const PreparedSaddle hyd = prepare_hydrogen();
        const PreparedSaddle model = prepare_model(2.0, 1.0);

        criterion_1(hyd);
        criterion_2(hyd);
        criterion_3(hyd);
        criterion_4(hyd);
        criterion_5();
        criterion_6(hyd, model);
        criterion_7(hyd, model);
        criterion_8(hyd, model);
        criterion_9();
        criterion_10(hyd);
        criterion_11(hyd, model);
    } catch (const std::exception& e) {
        std::printf("FAIL  acceptance suite aborted: %s\n", e.what());
        return 99;
    }

    std::printf("%d of 11 criteria passed\n", 11 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
