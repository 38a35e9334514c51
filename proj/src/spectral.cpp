#include "hamstab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace hamstab {

std::string to_string(EquilibriumKind kind) {
    switch (kind) {
        case EquilibriumKind::SaddleCenter: return "saddle-center";
        case EquilibriumKind::AllCenter: return "all-center";
        default: return "other";
    }
}

Linearization linearize(const HamiltonianSystem& sys, const Vec& z0) {
    const Vec g = gradient(sys, z0);
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm > 1e-8) {
        std::ostringstream os;
        os << sys.name << ": linearize requires an equilibrium, |grad H|_inf = " << gnorm;
        throw PreconditionError(os.str());
    }
    const Mat h = hessian(sys, z0);
    const int n = sys.n;
    Mat a(2 * n, 2 * n);
    a.topRows(n) = h.bottomRows(n);
    a.bottomRows(n) = -h.topRows(n);
    return Linearization{std::move(a), z0, n};
}

namespace {

struct EigenPair {
    std::complex<double> rep;  // representative (e_i - e_j)/2 of the +-pair
    int idx_pos = -1;          // index whose eigenvalue matches +rep
    int idx_neg = -1;
};

}  // namespace

SpectrumClassification classify(const Linearization& lin, double tol) {
    const int n = lin.n;
    const int m = 2 * n;

    Eigen::EigenSolver<Mat> solver(lin.A);
    if (solver.info() != Eigen::Success) {
        throw ClassificationError("classify: eigenvalue iteration failed");
    }
    const CVec ev = solver.eigenvalues();
    const CMat vecs = solver.eigenvectors();

    const double scale = ev.cwiseAbs().maxCoeff();
    const double thresh = tol * std::max(scale, 1e-300);

    SpectrumClassification out;
    out.n = n;
    out.eigenvalues = ev;

    // Eigenvector basis conditioning; a non-semisimple block shows up as a
    // nearly rank-deficient eigenvector matrix.
    {
        Eigen::JacobiSVD<CMat> svd(vecs);
        const double smin = svd.singularValues()(m - 1);
        const double smax = svd.singularValues()(0);
        if (!(smin > 0) || smax / smin > 1e8) {
            throw ClassificationError(
                "classify: eigenvector basis ill-conditioned (defective or nearly "
                "non-semisimple linearization)");
        }
    }

    if (std::abs(ev.sum()) > 1e-8 * std::max(1.0, scale)) {
        out.kind = EquilibriumKind::Other;
        out.detail = "eigenvalue sum is not zero; matrix is not Hamiltonian";
        return out;
    }

    // Greedy nearest-negation pairing over a deterministic candidate order.
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (ev(a).real() != ev(b).real()) return ev(a).real() > ev(b).real();
        if (ev(a).imag() != ev(b).imag()) return ev(a).imag() > ev(b).imag();
        return a < b;
    });

    std::vector<bool> used(m, false);
    std::vector<EigenPair> pairs;
    for (int oi = 0; oi < m; ++oi) {
        const int i = order[oi];
        if (used[i]) continue;
        int best = -1;
        double best_res = 0, best_tie = 0;
        for (int oj = oi + 1; oj < m; ++oj) {
            const int j = order[oj];
            if (used[j]) continue;
            const double res = std::abs(ev(i) + ev(j));
            const double tie = std::abs(std::abs(ev(i).imag()) - std::abs(ev(j).imag()));
            if (best < 0 || res < best_res || (res == best_res && tie < best_tie)) {
                best = j;
                best_res = res;
                best_tie = tie;
            }
        }
        if (best < 0 || best_res > thresh * 10) {
            out.kind = EquilibriumKind::Other;
            out.detail = "eigenvalues do not pair under negation";
            return out;
        }
        used[i] = used[best] = true;
        EigenPair p;
        p.rep = 0.5 * (ev(i) - ev(best));
        if (p.rep.real() > thresh || (std::abs(p.rep.real()) <= thresh && p.rep.imag() > 0)) {
            p.idx_pos = i;
            p.idx_neg = best;
        } else {
            p.rep = -p.rep;
            p.idx_pos = best;
            p.idx_neg = i;
        }
        pairs.push_back(p);
    }

    // Sort pairs into (real pair first, then centers by ascending frequency).
    int real_pairs = 0;
    struct CenterMode {
        double omega;
        CVec vec;
    };
    std::vector<CenterMode> centers;
    for (const auto& p : pairs) {
        const double re = std::abs(p.rep.real());
        const double im = std::abs(p.rep.imag());
        if (re > thresh && im <= thresh) {
            ++real_pairs;
            out.lambda = re;
            const CVec vp = vecs.col(p.idx_pos);
            const CVec vn = vecs.col(p.idx_neg);
            const double imag_norm = std::max(vp.imag().cwiseAbs().maxCoeff(),
                                              vn.imag().cwiseAbs().maxCoeff());
            if (imag_norm > 1e-8 * std::max(vp.cwiseAbs().maxCoeff(),
                                            vn.cwiseAbs().maxCoeff())) {
                out.kind = EquilibriumKind::Other;
                out.detail = "real eigenvalue with genuinely complex eigenvector";
                return out;
            }
            out.saddle_pos = vp.real();
            out.saddle_neg = vn.real();
        } else if (re <= thresh && im > thresh) {
            centers.push_back({im, vecs.col(p.idx_pos)});
        } else if (re <= thresh && im <= thresh) {
            out.kind = EquilibriumKind::Other;
            out.detail = "zero eigenvalue pair (degenerate equilibrium)";
            return out;
        } else {
            out.kind = EquilibriumKind::Other;
            std::ostringstream os;
            os << "mixed complex quartet eigenvalue " << p.rep.real() << (p.rep.imag() < 0 ? " - " : " + ")
               << std::abs(p.rep.imag()) << "i";
            out.detail = os.str();
            return out;
        }
    }

    std::sort(centers.begin(), centers.end(),
              [](const CenterMode& a, const CenterMode& b) { return a.omega < b.omega; });
    for (auto& c : centers) {
        out.omegas.push_back(c.omega);
        out.center_vecs.push_back(std::move(c.vec));
    }

    for (size_t k = 0; k + 1 < out.omegas.size(); ++k) {
        if (out.omegas[k + 1] - out.omegas[k] <= thresh) {
            out.resonant = true;
            std::ostringstream os;
            os << "resonant center frequencies near " << out.omegas[k];
            out.detail = os.str();
        }
    }

    if (real_pairs == 1 && static_cast<int>(centers.size()) == n - 1) {
        out.kind = EquilibriumKind::SaddleCenter;
    } else if (real_pairs == 0 && static_cast<int>(centers.size()) == n) {
        out.kind = EquilibriumKind::AllCenter;
    } else {
        out.kind = EquilibriumKind::Other;
        std::ostringstream os;
        os << "unsupported spectrum pattern: " << real_pairs << " real pair(s), "
           << centers.size() << " center pair(s)";
        out.detail = os.str();
    }
    return out;
}

}  // namespace hamstab
