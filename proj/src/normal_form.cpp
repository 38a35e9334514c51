#include "hamstab/normal_form.hpp"

#include <cmath>
#include <complex>
#include <sstream>

namespace hamstab {

Vec NormalFormTransform::normal_form_diagonal() const {
    Vec d(2 * n);
    if (kind == EquilibriumKind::SaddleCenter) {
        d(0) = -lambda;
        d(n) = lambda;
        for (int k = 1; k < n; ++k) {
            d(k) = omegas[k - 1];
            d(n + k) = omegas[k - 1];
        }
    } else {
        for (int k = 0; k < n; ++k) {
            d(k) = omegas[k];
            d(n + k) = omegas[k];
        }
    }
    return d;
}

namespace {

constexpr double kSignificant = 1e-8;

// Rescale so the first significant component equals `e`; if the first
// component is negligible, rescale so the trailing significant component is
// one. Either rule consumes the full scalar (scale and phase) freedom.
CVec calibrate(const CVec& v, std::complex<double> e) {
    const double big = v.cwiseAbs().maxCoeff();
    if (!(big > 0)) throw ConstructionError("calibrate: zero eigenvector");
    if (std::abs(v(0)) > kSignificant * big) {
        return v * (e / v(0));
    }
    Eigen::Index last = v.size() - 1;
    while (last > 0 && std::abs(v(last)) <= kSignificant * big) --last;
    return v * (1.0 / v(last));
}

Vec calibrate_real(const Vec& v, double e) {
    CVec cv = calibrate(v.cast<std::complex<double>>(), {e, 0.0});
    return cv.real();
}

double center_pairing(const CVec& v) {
    return symplectic_pairing(v.real(), v.imag());
}

}  // namespace

GaugedEigenvectors calibrate_eigenvectors(const SpectrumClassification& cls) {
    if (cls.kind == EquilibriumKind::Other) {
        throw ClassificationError("calibrate_eigenvectors: spectrum kind 'other' (" +
                                  cls.detail + ")");
    }
    const int n = cls.n;
    GaugedEigenvectors g;
    g.c = Vec::Zero(n);
    int ci = 0;

    if (cls.kind == EquilibriumKind::SaddleCenter) {
        g.saddle_pos = calibrate_real(cls.saddle_pos, cls.lambda);
        g.saddle_neg = calibrate_real(cls.saddle_neg, -cls.lambda);
        double pairing = symplectic_pairing(g.saddle_pos, g.saddle_neg);
        if (pairing < 0) {
            g.saddle_neg = -g.saddle_neg;
            pairing = -pairing;
        }
        const double scale = g.saddle_pos.norm() * g.saddle_neg.norm();
        if (!(pairing > 1e-12 * scale)) {
            throw ConstructionError("normalization: degenerate symplectic pairing of the "
                                    "hyperbolic eigenvector pair");
        }
        g.c(ci++) = 1.0 / std::sqrt(pairing);
    }

    for (size_t k = 0; k < cls.omegas.size(); ++k) {
        CVec v = calibrate(cls.center_vecs[k], {0.0, cls.omegas[k]});
        double pairing = center_pairing(v);
        const double scale = v.real().squaredNorm() + v.imag().squaredNorm();
        if (std::abs(pairing) <= 1e-12 * scale) {
            throw ConstructionError("normalization: degenerate symplectic pairing of a "
                                    "center eigenvector");
        }
        if (pairing < 0) {
            // Negative symplectic signature; conjugating restores a positive
            // pairing, and systems whose quadratic form genuinely cannot be
            // brought to the target shape fail the conjugation check later.
            v = v.conjugate();
            pairing = -pairing;
        }
        g.centers.push_back(std::move(v));
        g.c(ci++) = 1.0 / std::sqrt(pairing);
    }
    return g;
}

Vec normalization_constants(const SpectrumClassification& cls) {
    return calibrate_eigenvectors(cls).c;
}

Mat eigenvector_matrix(const GaugedEigenvectors& g, EquilibriumKind kind, int n) {
    const int m = 2 * n;
    Mat M(m, m);
    if (kind == EquilibriumKind::SaddleCenter) {
        M.col(0) = g.c(0) * g.saddle_pos;
        M.col(n) = g.c(0) * g.saddle_neg;
        for (int k = 1; k < n; ++k) {
            M.col(k) = g.c(k) * g.centers[k - 1].real();
            M.col(n + k) = g.c(k) * g.centers[k - 1].imag();
        }
    } else if (kind == EquilibriumKind::AllCenter) {
        for (int k = 0; k < n; ++k) {
            M.col(k) = g.c(k) * g.centers[k].real();
            M.col(n + k) = g.c(k) * g.centers[k].imag();
        }
    } else {
        throw ClassificationError("eigenvector_matrix: spectrum kind 'other'");
    }
    return M;
}

Mat eigenvector_matrix(const SpectrumClassification& cls) {
    return eigenvector_matrix(calibrate_eigenvectors(cls), cls.kind, cls.n);
}

Mat saddle_rotation(int n) {
    if (n < 1) throw PreconditionError("saddle_rotation: n must be >= 1");
    Mat N = Mat::Identity(2 * n, 2 * n);
    const double s = 1.0 / std::sqrt(2.0);
    N(0, 0) = s;
    N(0, n) = -s;
    N(n, 0) = s;
    N(n, n) = s;
    return N;
}

NormalFormTransform build_transform(const SpectrumClassification& cls,
                                    const HamiltonianSystem& sys, const Vec& z0) {
    const int n = cls.n;
    if (n != sys.n) throw PreconditionError("build_transform: dimension mismatch");

    GaugedEigenvectors gauged = calibrate_eigenvectors(cls);

    NormalFormTransform t;
    t.n = n;
    t.kind = cls.kind;
    t.lambda = cls.kind == EquilibriumKind::SaddleCenter ? cls.lambda : 0.0;
    t.omegas = cls.omegas;
    t.c = gauged.c;
    t.z0 = z0;
    t.M = eigenvector_matrix(gauged, cls.kind, n);
    t.N = cls.kind == EquilibriumKind::SaddleCenter ? saddle_rotation(n)
                                                    : Mat::Identity(2 * n, 2 * n);
    t.S = t.N * t.M.partialPivLu().solve(Mat::Identity(2 * n, 2 * n));

    // Per-plane sign normalization: flipping both rows of a (q_k, p_k) plane
    // is the symplectic rotation by pi, mirrored into M by negating the
    // corresponding eigenvector columns.
    for (int k = 0; k < n; ++k) {
        Eigen::Index imax;
        t.S.row(k).cwiseAbs().maxCoeff(&imax);
        if (t.S(k, imax) < 0) {
            t.S.row(k) *= -1.0;
            t.S.row(n + k) *= -1.0;
            t.M.col(k) *= -1.0;
            t.M.col(n + k) *= -1.0;
        }
    }
    t.S_inv = t.M * t.N.transpose();

    const Mat d2h = hessian(sys, z0);
    const Mat conj = t.S_inv.transpose() * d2h * t.S_inv;
    const Vec target = t.normal_form_diagonal();
    Mat residual = conj;
    residual.diagonal() -= target;
    t.conjugation_residual = residual.cwiseAbs().maxCoeff();
    const double tol = 1e-6 * std::max(1.0, target.cwiseAbs().maxCoeff());
    if (!(t.conjugation_residual <= tol)) {
        std::ostringstream os;
        os << "build_transform: conjugated Hessian deviates from the normal-form "
              "diagonal by "
           << t.conjugation_residual << " (tolerance " << tol << ")";
        throw ConstructionError(os.str());
    }
    return t;
}

}  // namespace hamstab
