#include "hamstab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hamstab {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

Json json_vector(const Vec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json json_matrix(const Mat& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Json json_complex_list(const CVec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(Json::array({v(i).real(), v(i).imag()}));
    }
    return out;
}

Vec quadratic_invariants(const NormalFormTransform& t, const Vec& qp) {
    const int n = t.n;
    Vec inv(n);
    int k0 = 0;
    if (t.kind == EquilibriumKind::SaddleCenter) {
        inv(0) = qp(n) * qp(n) - qp(0) * qp(0);
        k0 = 1;
    }
    for (int k = k0; k < n; ++k) {
        inv(k) = qp(n + k) * qp(n + k) + qp(k) * qp(k);
    }
    return inv;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const NormalFormTransform* transform) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    const int dim = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
    const int n = dim / 2;

    out << "t";
    for (int i = 1; i <= dim; ++i) out << ",z" << i;
    out << ",H,H_mod";
    if (transform) {
        for (int i = 1; i <= n; ++i) out << ",F" << i;
        for (int i = 1; i <= n; ++i) out << ",I" << i;
    }
    out << "\n";

    for (size_t s = 0; s < traj.size(); ++s) {
        out << format_double(traj.times[s]);
        const Vec& z = traj.states[s];
        for (int i = 0; i < dim; ++i) out << ',' << format_double(z(i));
        const double h = s < traj.energy.size() ? traj.energy[s] : 0.0;
        const double hm = s < traj.energy_mod.size() ? traj.energy_mod[s] : h;
        out << ',' << format_double(h) << ',' << format_double(hm);
        if (transform) {
            const Vec qp = transform->to_normal_form(z);
            for (int i = 0; i < n; ++i) out << ',' << format_double(qp(i));
            const Vec inv = quadratic_invariants(*transform, qp);
            for (int i = 0; i < n; ++i) out << ',' << format_double(inv(i));
        }
        out << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

PolynomialHamiltonian load_polynomial(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open polynomial system file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("polynomial system file " + path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("terms")) {
        throw ConfigError("polynomial system file " + path +
                          ": expected an object with keys 'n' and 'terms'");
    }
    PolynomialHamiltonian poly;
    try {
        poly.n = j.at("n").get<int>();
        for (const auto& jt : j.at("terms")) {
            PolynomialTerm term;
            term.coeff = jt.at("coeff").get<double>();
            term.exps = jt.at("exps").get<std::vector<int>>();
            poly.terms.push_back(std::move(term));
        }
    } catch (const std::exception& e) {
        throw ConfigError("polynomial system file " + path + ": " + e.what());
    }
    poly.validate();
    return poly;
}

PolynomialHamiltonian quadratic_form_polynomial(const Mat& q) {
    const int dim = static_cast<int>(q.rows());
    if (q.cols() != dim || dim % 2 != 0) {
        throw PreconditionError("quadratic_form_polynomial: need a square even-dimension matrix");
    }
    PolynomialHamiltonian poly;
    poly.n = dim / 2;
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const double coeff = i == j ? 0.5 * q(i, i) : 0.5 * (q(i, j) + q(j, i));
            if (coeff == 0.0) continue;
            PolynomialTerm term;
            term.coeff = coeff;
            term.exps.assign(dim, 0);
            term.exps[i] += 1;
            term.exps[j] += 1;
            poly.terms.push_back(std::move(term));
        }
    }
    return poly;
}

}  // namespace hamstab
