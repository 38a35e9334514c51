#include "hamstab/calculus.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace hamstab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
const double kGradStep = std::pow(kEps, 0.2);   // ~7.4e-4
const double kHessStep = std::pow(kEps, 0.25);  // ~1.2e-4

double coord_step(double zi, double scale) {
    return std::max(1.0, std::abs(zi)) * scale;
}

}  // namespace

Mat symplectic_matrix(int n) {
    if (n < 1) throw PreconditionError("symplectic_matrix: n must be >= 1");
    Mat j = Mat::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = Mat::Identity(n, n);
    j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return j;
}

Vec apply_symplectic(const Vec& g) {
    const auto half = g.size() / 2;
    Vec out(g.size());
    out.head(half) = g.tail(half);
    out.tail(half) = -g.head(half);
    return out;
}

double symplectic_pairing(const Vec& u, const Vec& v) {
    return u.dot(apply_symplectic(v));
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z) {
    const auto m = z.size();
    Vec g(m);
    Vec zp = z;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double h = coord_step(z(i), kGradStep);
        const double zi = z(i);
        zp(i) = zi + 2 * h;
        const double f2p = f(zp);
        zp(i) = zi + h;
        const double f1p = f(zp);
        zp(i) = zi - h;
        const double f1m = f(zp);
        zp(i) = zi - 2 * h;
        const double f2m = f(zp);
        zp(i) = zi;
        g(i) = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
    }
    return g;
}

namespace {

// 4th-order Hessian from energy values only: 5-point second-difference on the
// diagonal, composed 4-point first-difference stencils off the diagonal.
Mat fd_hessian_energy(const std::function<double(const Vec&)>& f, const Vec& z) {
    const auto m = z.size();
    Mat h = Mat::Zero(m, m);
    const double f0 = f(z);
    Vec zp = z;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double hi = coord_step(z(i), kHessStep);
        const double zi = z(i);
        zp(i) = zi + 2 * hi;
        const double f2p = f(zp);
        zp(i) = zi + hi;
        const double f1p = f(zp);
        zp(i) = zi - hi;
        const double f1m = f(zp);
        zp(i) = zi - 2 * hi;
        const double f2m = f(zp);
        zp(i) = zi;
        h(i, i) = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * hi * hi);
    }
    // stencil weights for the 4-point first derivative at offsets -2,-1,1,2
    static const int off[4] = {-2, -1, 1, 2};
    static const double wgt[4] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
    for (Eigen::Index i = 0; i < m; ++i) {
        const double hi = coord_step(z(i), kHessStep);
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double hj = coord_step(z(j), kHessStep);
            double acc = 0.0;
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    zp(i) = z(i) + off[a] * hi;
                    zp(j) = z(j) + off[b] * hj;
                    acc += wgt[a] * wgt[b] * f(zp);
                }
            }
            zp(i) = z(i);
            zp(j) = z(j);
            h(i, j) = acc / (hi * hj);
            h(j, i) = h(i, j);
        }
    }
    return h;
}

Mat fd_jacobian_impl(const std::function<Vec(const Vec&)>& f, const Vec& z,
                     const Vec& steps) {
    const auto m = z.size();
    Mat jac(f(z).size(), m);
    Vec zp = z;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double h = steps(i);
        const double zi = z(i);
        zp(i) = zi + 2 * h;
        const Vec f2p = f(zp);
        zp(i) = zi + h;
        const Vec f1p = f(zp);
        zp(i) = zi - h;
        const Vec f1m = f(zp);
        zp(i) = zi - 2 * h;
        const Vec f2m = f(zp);
        zp(i) = zi;
        jac.col(i) = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
    }
    return jac;
}

}  // namespace

Vec gradient(const HamiltonianSystem& sys, const Vec& z) {
    sys.check_state(z);
    if (sys.grad) return sys.grad(z);
    return fd_gradient(sys.energy, z);
}

Mat hessian(const HamiltonianSystem& sys, const Vec& z) {
    sys.check_state(z);
    if (sys.hess) return sys.hess(z);
    Mat h;
    if (sys.grad) {
        Vec steps(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) steps(i) = coord_step(z(i), kHessStep);
        h = fd_jacobian_impl(sys.grad, z, steps);
    } else {
        h = fd_hessian_energy(sys.energy, z);
    }
    return 0.5 * (h + h.transpose());
}

Vec vector_field(const HamiltonianSystem& sys, const Vec& z) {
    return apply_symplectic(gradient(sys, z));
}

Vec field_gradient(const ScalarField& f, const Vec& z) {
    if (f.grad) return f.grad(z);
    return fd_gradient(f.value, z);
}

double poisson_bracket(const ScalarField& f, const ScalarField& g, const Vec& z) {
    return field_gradient(f, z).dot(apply_symplectic(field_gradient(g, z)));
}

Vec find_equilibrium(const HamiltonianSystem& sys, const Vec& guess,
                     double tol, int max_iter) {
    Vec z = guess;
    for (int it = 0; it <= max_iter; ++it) {
        const Vec g = gradient(sys, z);
        if (g.lpNorm<Eigen::Infinity>() <= tol) return z;
        if (it == max_iter) break;
        const Mat h = hessian(sys, z);
        Eigen::FullPivLU<Mat> lu(h);
        if (!lu.isInvertible()) {
            throw RankError(sys.name + ": singular Hessian in Newton iteration " +
                            std::to_string(it));
        }
        z -= lu.solve(g);
        if (!all_finite(z)) {
            throw ConvergenceError(sys.name + ": Newton iteration diverged to non-finite state");
        }
    }
    std::ostringstream os;
    os << sys.name << ": Newton did not reach |grad H| <= " << tol << " in "
       << max_iter << " iterations";
    throw ConvergenceError(os.str());
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& z,
                double step_scale) {
    const double h = step_scale * std::max(1.0, z.lpNorm<Eigen::Infinity>());
    Vec steps = Vec::Constant(z.size(), h);
    return fd_jacobian_impl(f, z, steps);
}

}  // namespace hamstab
