#include "hamstab/hamiltonian.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace hamstab {

void HamiltonianSystem::check_state(const Vec& z) const {
    if (z.size() != dim()) {
        std::ostringstream os;
        os << name << ": state has length " << z.size() << ", expected " << dim();
        throw PreconditionError(os.str());
    }
    if (!all_finite(z)) {
        throw PreconditionError(name + ": state contains non-finite entries");
    }
    if (domain_check) domain_check(z);
}

ScalarField HamiltonianSystem::as_field() const {
    return ScalarField{n, energy, grad};
}

// ---------------------------------------------------------------------------
// Polynomial Hamiltonians

void PolynomialHamiltonian::validate() const {
    if (n < 1) throw ConfigError("polynomial system: n must be >= 1");
    for (const auto& t : terms) {
        if (static_cast<int>(t.exps.size()) != 2 * n) {
            throw ConfigError("polynomial system: exponent list must have length 2n");
        }
        for (int e : t.exps) {
            if (e < 0) throw ConfigError("polynomial system: exponents must be non-negative");
        }
        if (!std::isfinite(t.coeff)) {
            throw ConfigError("polynomial system: non-finite coefficient");
        }
    }
}

namespace {

double int_pow(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

}  // namespace

double PolynomialHamiltonian::eval(const Vec& z) const {
    double sum = 0.0;
    for (const auto& t : terms) {
        double m = t.coeff;
        for (int i = 0; i < 2 * n; ++i) m *= int_pow(z(i), t.exps[i]);
        sum += m;
    }
    return sum;
}

Vec PolynomialHamiltonian::gradient(const Vec& z) const {
    Vec g = Vec::Zero(2 * n);
    for (const auto& t : terms) {
        for (int i = 0; i < 2 * n; ++i) {
            const int ei = t.exps[i];
            if (ei == 0) continue;
            double m = t.coeff * ei * int_pow(z(i), ei - 1);
            for (int j = 0; j < 2 * n; ++j) {
                if (j != i) m *= int_pow(z(j), t.exps[j]);
            }
            g(i) += m;
        }
    }
    return g;
}

Mat PolynomialHamiltonian::hessian(const Vec& z) const {
    Mat h = Mat::Zero(2 * n, 2 * n);
    for (const auto& t : terms) {
        for (int i = 0; i < 2 * n; ++i) {
            const int ei = t.exps[i];
            if (ei == 0) continue;
            // diagonal
            if (ei >= 2) {
                double m = t.coeff * ei * (ei - 1) * int_pow(z(i), ei - 2);
                for (int j = 0; j < 2 * n; ++j) {
                    if (j != i) m *= int_pow(z(j), t.exps[j]);
                }
                h(i, i) += m;
            }
            // mixed, upper triangle
            for (int j = i + 1; j < 2 * n; ++j) {
                const int ej = t.exps[j];
                if (ej == 0) continue;
                double m = t.coeff * ei * ej * int_pow(z(i), ei - 1) * int_pow(z(j), ej - 1);
                for (int k = 0; k < 2 * n; ++k) {
                    if (k != i && k != j) m *= int_pow(z(k), t.exps[k]);
                }
                h(i, j) += m;
                h(j, i) += m;
            }
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Built-in systems

namespace {

HamiltonianSystem make_diag_quadratic(Vec w, std::string name,
                                      std::map<std::string, double> params, int n) {
    HamiltonianSystem sys;
    sys.n = n;
    sys.name = std::move(name);
    sys.params = std::move(params);
    sys.energy = [w](const Vec& z) { return 0.5 * z.dot(w.cwiseProduct(z)); };
    sys.grad = [w](const Vec& z) { return Vec(w.cwiseProduct(z)); };
    sys.hess = [w](const Vec&) { return Mat(w.asDiagonal()); };
    return sys;
}

}  // namespace

HamiltonianSystem make_quadratic(double lambda, const std::vector<double>& omegas) {
    if (!(lambda > 0)) throw ConfigError("quadratic system: lambda must be > 0");
    for (double w : omegas) {
        if (!(w > 0)) throw ConfigError("quadratic system: omegas must be > 0");
    }
    const int n = 1 + static_cast<int>(omegas.size());
    Vec w(2 * n);
    w(0) = -lambda;
    w(n) = lambda;
    for (int k = 1; k < n; ++k) {
        w(k) = omegas[k - 1];
        w(n + k) = omegas[k - 1];
    }
    std::map<std::string, double> params{{"lambda", lambda}};
    for (size_t k = 0; k < omegas.size(); ++k) {
        params["omega" + std::to_string(k + 2)] = omegas[k];
    }
    return make_diag_quadratic(std::move(w), "quadratic", std::move(params), n);
}

HamiltonianSystem make_quadratic_center(const std::vector<double>& omegas) {
    if (omegas.empty()) throw ConfigError("quadratic system: need at least one omega");
    for (double w : omegas) {
        if (!(w > 0)) throw ConfigError("quadratic system: omegas must be > 0");
    }
    const int n = static_cast<int>(omegas.size());
    Vec w(2 * n);
    for (int k = 0; k < n; ++k) {
        w(k) = omegas[k];
        w(n + k) = omegas[k];
    }
    std::map<std::string, double> params;
    for (size_t k = 0; k < omegas.size(); ++k) {
        params["omega" + std::to_string(k + 1)] = omegas[k];
    }
    return make_diag_quadratic(std::move(w), "quadratic", std::move(params), n);
}

HamiltonianSystem make_model(double a, double b) {
    if (!(a > 0) || !(b > 0)) throw ConfigError("model system: a and b must be > 0");
    if (!(a > b)) throw ConfigError("model system: requires a > b");
    HamiltonianSystem sys;
    sys.n = 2;
    sys.name = "model";
    sys.params = {{"a", a}, {"b", b}};
    const double ia2 = 1.0 / (a * a);
    const double ib2 = 1.0 / (b * b);
    sys.energy = [ia2, ib2](const Vec& z) {
        const double x1 = z(0), x2 = z(1), p1 = z(2), p2 = z(3);
        const double d = x1 - 1.0;
        return 0.5 * (p1 * p1 + p2 * p2) + ia2 * x1 * x1 * d * d + ib2 * x2 * x2;
    };
    sys.grad = [ia2, ib2](const Vec& z) {
        const double x1 = z(0), x2 = z(1);
        Vec g(4);
        g(0) = 2.0 * ia2 * x1 * (x1 - 1.0) * (2.0 * x1 - 1.0);
        g(1) = 2.0 * ib2 * x2;
        g(2) = z(2);
        g(3) = z(3);
        return g;
    };
    sys.hess = [ia2, ib2](const Vec& z) {
        const double x1 = z(0);
        Mat h = Mat::Zero(4, 4);
        h(0, 0) = 2.0 * ia2 * (6.0 * x1 * x1 - 6.0 * x1 + 1.0);
        h(1, 1) = 2.0 * ib2;
        h(2, 2) = 1.0;
        h(3, 3) = 1.0;
        return h;
    };
    return sys;
}

HamiltonianSystem make_hydrogen(double eps) {
    if (!(eps > 0)) throw ConfigError("hydrogen system: eps must be > 0");
    constexpr double r_cutoff = 1e-8;
    HamiltonianSystem sys;
    sys.n = 3;
    sys.name = "hydrogen";
    sys.params = {{"eps", eps}};
    sys.domain_check = [](const Vec& z) {
        const double r = z.head(3).norm();
        if (r < r_cutoff) {
            throw SingularityError("hydrogen system: evaluation inside Coulomb cutoff (R < 1e-8)");
        }
    };
    sys.energy = [eps](const Vec& z) {
        const double x1 = z(0), x2 = z(1), p1 = z(3), p2 = z(4);
        const double r = z.head(3).norm();
        return 0.5 * z.tail(3).squaredNorm() - 1.0 / r + 0.5 * (x1 * p2 - x2 * p1) +
               0.125 * (x1 * x1 + x2 * x2) - eps * x1;
    };
    sys.grad = [eps](const Vec& z) {
        const double x1 = z(0), x2 = z(1), x3 = z(2);
        const double p1 = z(3), p2 = z(4), p3 = z(5);
        const double r = z.head(3).norm();
        const double ir3 = 1.0 / (r * r * r);
        Vec g(6);
        g(0) = x1 * ir3 + 0.5 * p2 + 0.25 * x1 - eps;
        g(1) = x2 * ir3 - 0.5 * p1 + 0.25 * x2;
        g(2) = x3 * ir3;
        g(3) = p1 - 0.5 * x2;
        g(4) = p2 + 0.5 * x1;
        g(5) = p3;
        return g;
    };
    sys.hess = [](const Vec& z) {
        const Vec x = z.head(3);
        const double r = x.norm();
        const double ir3 = 1.0 / (r * r * r);
        const double ir5 = ir3 / (r * r);
        Mat h = Mat::Zero(6, 6);
        // Coulomb block: d^2(-1/R) = (R^2 I - 3 x x^T) / R^5
        h.topLeftCorner(3, 3) = ir3 * Mat::Identity(3, 3) - 3.0 * ir5 * (x * x.transpose());
        h(0, 0) += 0.25;
        h(1, 1) += 0.25;
        // paramagnetic cross terms
        h(0, 4) = 0.5;
        h(4, 0) = 0.5;
        h(1, 3) = -0.5;
        h(3, 1) = -0.5;
        h.bottomRightCorner(3, 3) += Mat::Identity(3, 3);
        return h;
    };
    return sys;
}

HamiltonianSystem make_system(const PolynomialHamiltonian& poly) {
    poly.validate();
    HamiltonianSystem sys;
    sys.n = poly.n;
    sys.name = "polynomial";
    sys.energy = [poly](const Vec& z) { return poly.eval(z); };
    sys.grad = [poly](const Vec& z) { return poly.gradient(z); };
    sys.hess = [poly](const Vec& z) { return poly.hessian(z); };
    return sys;
}

HamiltonianSystem shift_to_equilibrium(const HamiltonianSystem& sys, const Vec& z0) {
    if (z0.size() != sys.dim()) {
        throw PreconditionError("shift_to_equilibrium: shift vector has wrong dimension");
    }
    HamiltonianSystem out;
    out.n = sys.n;
    out.name = sys.name;
    out.params = sys.params;
    const double e0 = sys.energy(z0);
    auto energy = sys.energy;
    out.energy = [energy, z0, e0](const Vec& z) { return energy(Vec(z + z0)) - e0; };
    if (sys.grad) {
        auto grad = sys.grad;
        out.grad = [grad, z0](const Vec& z) { return grad(Vec(z + z0)); };
    }
    if (sys.hess) {
        auto hess = sys.hess;
        out.hess = [hess, z0](const Vec& z) { return hess(Vec(z + z0)); };
    }
    if (sys.domain_check) {
        auto check = sys.domain_check;
        out.domain_check = [check, z0](const Vec& z) { check(Vec(z + z0)); };
    }
    return out;
}

}  // namespace hamstab
