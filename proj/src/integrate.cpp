#include "hamstab/integrate.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace hamstab {

void IntegratorConfig::validate() const {
    if (!(t_final > 0)) throw ConfigError("integrator: t_final must be > 0");
    if (!(dt > 0)) throw ConfigError("integrator: dt must be > 0");
    if (dt > t_final) throw ConfigError("integrator: dt must not exceed t_final");
    if (!(rel_tol > 0) || !(abs_tol > 0)) {
        throw ConfigError("integrator: tolerances must be > 0");
    }
    if (record_stride < 1) throw ConfigError("integrator: record_stride must be >= 1");
}

namespace {

void record(Trajectory& traj, double t, const Vec& z) {
    traj.times.push_back(t);
    traj.states.push_back(z);
}

Vec rk4_step(const VectorField& f, const Vec& z, double h) {
    const Vec k1 = f(z);
    const Vec k2 = f(z + 0.5 * h * k1);
    const Vec k3 = f(z + 0.5 * h * k2);
    const Vec k4 = f(z + h * k3);
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_rk4(const VectorField& f, const Vec& z_init,
                         const IntegratorConfig& cfg) {
    Trajectory traj;
    Vec z = z_init;
    double t = 0.0;
    record(traj, t, z);
    long step = 0;
    while (t < cfg.t_final - 1e-15 * cfg.t_final) {
        const double h = std::min(cfg.dt, cfg.t_final - t);
        Vec znew;
        try {
            znew = rk4_step(f, z, h);
        } catch (const SingularityError& e) {
            throw IntegrationError(std::string("integration hit a domain boundary: ") +
                                       e.what(), t, z);
        }
        if (!all_finite(znew)) {
            throw IntegrationError("integration produced a non-finite state", t, z);
        }
        z = std::move(znew);
        t += h;
        ++step;
        if (step % cfg.record_stride == 0 || t >= cfg.t_final - 1e-15 * cfg.t_final) {
            record(traj, t, z);
        }
    }
    if (traj.times.back() < t) record(traj, t, z);
    return traj;
}

Trajectory integrate_rkf45(const VectorField& f, const Vec& z_init,
                           const IntegratorConfig& cfg) {
    // Fehlberg 4(5) pair, local extrapolation with the 5th-order solution.
    static const double a21 = 1.0 / 4.0;
    static const double a31 = 3.0 / 32.0, a32 = 9.0 / 32.0;
    static const double a41 = 1932.0 / 2197.0, a42 = -7200.0 / 2197.0,
                        a43 = 7296.0 / 2197.0;
    static const double a51 = 439.0 / 216.0, a52 = -8.0, a53 = 3680.0 / 513.0,
                        a54 = -845.0 / 4104.0;
    static const double a61 = -8.0 / 27.0, a62 = 2.0, a63 = -3544.0 / 2565.0,
                        a64 = 1859.0 / 4104.0, a65 = -11.0 / 40.0;
    static const double b51 = 16.0 / 135.0, b53 = 6656.0 / 12825.0,
                        b54 = 28561.0 / 56430.0, b55 = -9.0 / 50.0, b56 = 2.0 / 55.0;
    static const double b41 = 25.0 / 216.0, b43 = 1408.0 / 2565.0,
                        b44 = 2197.0 / 4104.0, b45 = -1.0 / 5.0;

    Trajectory traj;
    Vec z = z_init;
    double t = 0.0;
    record(traj, t, z);
    double h = std::min(cfg.dt, cfg.t_final);
    long accepted = 0;
    while (t < cfg.t_final - 1e-15 * cfg.t_final) {
        h = std::min(h, cfg.t_final - t);
        Vec z5, z4;
        try {
            const Vec k1 = f(z);
            const Vec k2 = f(z + h * (a21 * k1));
            const Vec k3 = f(z + h * (a31 * k1 + a32 * k2));
            const Vec k4 = f(z + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 = f(z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = f(z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            z5 = z + h * (b51 * k1 + b53 * k3 + b54 * k4 + b55 * k5 + b56 * k6);
            z4 = z + h * (b41 * k1 + b43 * k3 + b44 * k4 + b45 * k5);
        } catch (const SingularityError& e) {
            throw IntegrationError(std::string("integration hit a domain boundary: ") +
                                       e.what(), t, z);
        }
        if (!all_finite(z5) || !all_finite(z4)) {
            throw IntegrationError("integration produced a non-finite state", t, z);
        }
        double ratio = 0.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
            const double tol = cfg.abs_tol +
                               cfg.rel_tol * std::max(std::abs(z(i)), std::abs(z5(i)));
            ratio = std::max(ratio, std::abs(z5(i) - z4(i)) / tol);
        }
        if (ratio <= 1.0) {
            z = std::move(z5);
            t += h;
            ++accepted;
            if (accepted % cfg.record_stride == 0 ||
                t >= cfg.t_final - 1e-15 * cfg.t_final) {
                record(traj, t, z);
            }
        }
        const double grow = ratio > 0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegrationError("integration step size underflow (stiff or singular field)",
                                   t, z);
        }
    }
    if (traj.times.back() < t) record(traj, t, z);
    return traj;
}

}  // namespace

Trajectory integrate(const VectorField& field, const Vec& z_init,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    if (!all_finite(z_init)) {
        throw PreconditionError("integrate: initial state has non-finite entries");
    }
    return cfg.method == StepMethod::RK4 ? integrate_rk4(field, z_init, cfg)
                                         : integrate_rkf45(field, z_init, cfg);
}

Trajectory integrate(const HamiltonianSystem& sys, const Vec& z_init,
                     const IntegratorConfig& cfg) {
    Trajectory traj = integrate([&sys](const Vec& z) { return vector_field(sys, z); },
                                z_init, cfg);
    traj.energy.reserve(traj.size());
    for (const Vec& z : traj.states) traj.energy.push_back(sys.energy(z));
    traj.energy_mod = traj.energy;
    return traj;
}

Trajectory integrate(const ClosedLoopSystem& cl, const Vec& z_init,
                     const IntegratorConfig& cfg) {
    Trajectory traj = integrate([&cl](const Vec& z) { return closed_loop_field(cl, z); },
                                z_init, cfg);
    traj.energy.reserve(traj.size());
    traj.energy_mod.reserve(traj.size());
    traj.feedback.reserve(traj.size());
    for (const Vec& z : traj.states) {
        traj.energy.push_back(cl.base.energy(z));
        traj.energy_mod.push_back(cl.hmod(z));
        traj.feedback.push_back(cl.law.F_all(z));
    }
    return traj;
}

std::vector<Vec> sample_ball(const Vec& z0, double radius, int count,
                             std::uint64_t seed) {
    const int m = static_cast<int>(z0.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Vec> ics;
    ics.reserve(count);
    for (int s = 0; s < count; ++s) {
        Vec g(m);
        for (int i = 0; i < m; ++i) g(i) = gauss(rng);
        const double r = radius * std::pow(unif(rng), 1.0 / m);
        ics.push_back(z0 + r * g.normalized());
    }
    return ics;
}

StabilityReport verify_stability(const ClosedLoopSystem& cl, double radius,
                                 int n_samples, const IntegratorConfig& cfg,
                                 double conv_tol, std::uint64_t seed) {
    cfg.validate();
    if (!(radius > 0)) throw ConfigError("verify_stability: radius must be > 0");
    if (n_samples < 1) throw ConfigError("verify_stability: n_samples must be >= 1");

    const Vec& z0 = cl.law.z0;

    StabilityReport rep;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.radius = radius;
    rep.conv_tol = conv_tol;
    rep.t_final = cfg.t_final;

    // Seeded ICs drawn up front so the sample set is independent of
    // evaluation order.
    const std::vector<Vec> ics = sample_ball(z0, radius, n_samples, seed);

    IntegratorConfig run = cfg;
    run.record_stride = std::numeric_limits<int>::max();  // endpoints only

    for (const Vec& ic : ics) {
        try {
            const Trajectory traj = integrate(
                [&cl](const Vec& z) { return closed_loop_field(cl, z); }, ic, run);
            const double dist = (traj.states.back() - z0).lpNorm<Eigen::Infinity>();
            rep.max_final_distance = std::max(rep.max_final_distance, dist);
            if (dist <= conv_tol) ++rep.converged;
        } catch (const IntegrationError&) {
            ++rep.failures;
        }
    }
    rep.converged_fraction = static_cast<double>(rep.converged) / n_samples;

    const Mat jac = fd_jacobian(
        [&cl](const Vec& z) { return closed_loop_field(cl, z); }, z0);
    Eigen::EigenSolver<Mat> es(jac);
    rep.jacobian_eigenvalues = es.eigenvalues();
    rep.max_jacobian_real = rep.jacobian_eigenvalues.real().maxCoeff();
    return rep;
}

}  // namespace hamstab
