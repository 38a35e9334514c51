#include "hamstab/cli.hpp"

#include "hamstab/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace hamstab {

namespace {

namespace fs = std::filesystem;

double param_or(const RunConfig& cfg, const std::string& key, double fallback) {
    auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
}

// omega-list parameters: bare "omega" first, then "omega<k>" by index.
std::vector<double> omega_params(const RunConfig& cfg) {
    std::vector<std::pair<long, double>> found;
    for (const auto& [key, value] : cfg.params) {
        if (key.rfind("omega", 0) != 0) continue;
        const std::string suffix = key.substr(5);
        long index = 0;
        if (!suffix.empty()) {
            try {
                index = std::stol(suffix);
            } catch (const std::exception&) {
                throw ConfigError("unrecognized parameter: " + key);
            }
        }
        found.emplace_back(index, value);
    }
    std::sort(found.begin(), found.end());
    std::vector<double> omegas;
    omegas.reserve(found.size());
    for (const auto& [index, value] : found) omegas.push_back(value);
    return omegas;
}

std::string format_matrix(const Mat& m) {
    std::ostringstream os;
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << "  ";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%13.6g", m(i, j));
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string format_vector(const Vec& v) {
    std::ostringstream os;
    char buf[40];
    os << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", v(i));
        os << (i ? ", " : "") << buf;
    }
    os << ")";
    return os.str();
}

std::string coordinate_name(int idx, int n) {
    return (idx < n ? "x" : "P") + std::to_string(idx < n ? idx + 1 : idx - n + 1);
}

// F_i as a readable linear combination of phase-space displacements.
std::string format_feedback(const Mat& rows, int i) {
    std::ostringstream os;
    char buf[64];
    const int dim = static_cast<int>(rows.cols());
    const int n = dim / 2;
    bool first = true;
    for (int j = 0; j < dim; ++j) {
        const double c = rows(i, j);
        if (std::abs(c) < 1e-12) continue;
        std::snprintf(buf, sizeof(buf), "%.6g", std::abs(c));
        os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ")) << buf << "*"
           << coordinate_name(j, n);
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

Json spectrum_json(const SpectrumClassification& cls) {
    Json j;
    j["kind"] = to_string(cls.kind);
    j["lambda"] = cls.lambda;
    j["omegas"] = cls.omegas;
    j["resonant"] = cls.resonant;
    if (!cls.detail.empty()) j["detail"] = cls.detail;
    j["eigenvalues"] = json_complex_list(cls.eigenvalues);
    return j;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir);
}

std::string out_path(const RunConfig& cfg, const std::string& file) {
    return (fs::path(cfg.out_dir) / file).string();
}

Json trajectory_diagnostics(const Trajectory& traj, const NormalFormTransform& t) {
    std::vector<Vec> qp;
    qp.reserve(traj.size());
    for (const Vec& z : traj.states) qp.push_back(t.to_normal_form(z));
    Json j;
    if (t.kind == EquilibriumKind::SaddleCenter) {
        const ReactionDiagnostics diag = classify_reactive(traj.times, qp);
        j["invariants_initial"] = json_vector(diag.invariants);
        j["reactive"] = diag.reactive;
        j["nhim_distance"] = diag.nhim_distance;
        Json crossings = Json::array();
        for (const auto& c : diag.crossings) {
            crossings.push_back(Json{{"t", c.time}, {"direction", c.direction}});
        }
        j["ds_crossings"] = std::move(crossings);
    } else {
        j["invariants_initial"] = json_vector(quadratic_invariants(t, qp.front()));
    }
    return j;
}

void write_potential_grid(const RunConfig& cfg, const PreparedSystem& ps,
                          const ClosedLoopSystem* cl) {
    // V(x1, x2) sampled at zero momentum around the equilibrium, plus the
    // modified potential when a closed loop is supplied.
    const int pts = cfg.grid_points;
    const double span = cfg.grid_span;
    std::ostringstream os;
    os << "x1,x2,V" << (cl ? ",V_mod" : "") << "\n";
    Vec z = Vec::Zero(ps.shifted.dim());
    for (int i = 0; i < pts; ++i) {
        for (int j = 0; j < pts; ++j) {
            z(0) = -span + 2.0 * span * i / (pts - 1);
            z(1) = -span + 2.0 * span * j / (pts - 1);
            double v;
            try {
                v = ps.shifted.energy(z);
            } catch (const SingularityError&) {
                continue;
            }
            os << format_double(z(0)) << ',' << format_double(z(1)) << ','
               << format_double(v);
            if (cl) os << ',' << format_double(cl->hmod(z));
            os << "\n";
        }
    }
    write_text_file(out_path(cfg, "potential_grid.csv"), os.str());
}

}  // namespace

PreparedSystem prepare_system(const RunConfig& cfg) {
    HamiltonianSystem sys;
    Vec guess;
    if (cfg.system_name == "quadratic") {
        const std::vector<double> omegas = omega_params(cfg);
        if (cfg.params.count("lambda")) {
            sys = make_quadratic(cfg.params.at("lambda"), omegas);
        } else if (!omegas.empty()) {
            sys = make_quadratic_center(omegas);
        } else {
            sys = make_quadratic(1.0, {1.0});
        }
        guess = Vec::Zero(sys.dim());
    } else if (cfg.system_name == "model") {
        sys = make_model(param_or(cfg, "a", 2.0), param_or(cfg, "b", 1.0));
        guess = Vec::Zero(4);
        guess(0) = 0.5;
    } else if (cfg.system_name == "hydrogen") {
        sys = make_hydrogen(param_or(cfg, "eps", 0.58));
        guess = Vec::Zero(6);
        guess(0) = 1.3;
        guess(4) = -0.65;
    } else if (cfg.system_name == "polynomial") {
        if (cfg.poly_file.empty()) {
            throw ConfigError("system 'polynomial' requires --poly-file");
        }
        sys = make_system(load_polynomial(cfg.poly_file));
        guess = Vec::Zero(sys.dim());
    } else {
        throw ConfigError("unknown system '" + cfg.system_name +
                          "' (see `hamstab list-systems`)");
    }

    if (!cfg.guess.empty()) {
        if (static_cast<int>(cfg.guess.size()) != sys.dim()) {
            throw ConfigError("--guess must supply 2n values");
        }
        guess = Eigen::Map<const Vec>(cfg.guess.data(), sys.dim());
    }

    PreparedSystem ps;
    ps.original = sys;
    ps.z0 = find_equilibrium(sys, guess);
    ps.shifted = shift_to_equilibrium(sys, ps.z0);
    return ps;
}

IntegratorConfig integrator_config(const RunConfig& cfg, double default_t_final) {
    IntegratorConfig icfg;
    if (cfg.method == "rk4") {
        icfg.method = StepMethod::RK4;
    } else if (cfg.method == "rkf45") {
        icfg.method = StepMethod::RKF45;
    } else {
        throw ConfigError("unknown integrator '" + cfg.method + "' (rk4 | rkf45)");
    }
    icfg.dt = cfg.dt;
    icfg.rel_tol = cfg.rel_tol;
    icfg.abs_tol = cfg.abs_tol;
    icfg.t_final = std::isnan(cfg.t_final) ? default_t_final : cfg.t_final;
    icfg.record_stride = cfg.record_stride;
    icfg.validate();
    return icfg;
}

int run_analyze(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const PreparedSystem ps = prepare_system(cfg);
    const Linearization lin = linearize(ps.shifted, Vec::Zero(ps.shifted.dim()));
    const SpectrumClassification cls = classify(lin);

    std::ostringstream txt;
    Json j;
    txt << "system: " << ps.original.name << "\n";
    j["system"] = ps.original.name;
    j["params"] = cfg.params.empty() ? Json(ps.original.params) : Json(cfg.params);
    j["n"] = ps.original.n;
    txt << "equilibrium (original coordinates): " << format_vector(ps.z0) << "\n";
    txt << "energy at equilibrium: " << format_double(ps.original.energy(ps.z0)) << "\n";
    j["equilibrium"] = json_vector(ps.z0);
    j["energy_at_equilibrium"] = ps.original.energy(ps.z0);
    txt << "\nlinearization J*D2H(z0):\n" << format_matrix(lin.A);
    j["linearization"] = json_matrix(lin.A);
    txt << "\nclassification: " << to_string(cls.kind);
    if (cls.resonant) txt << " (resonant)";
    if (!cls.detail.empty()) txt << "  [" << cls.detail << "]";
    txt << "\n";
    j["spectrum"] = spectrum_json(cls);

    const bool usable = (cls.kind == EquilibriumKind::SaddleCenter ||
                         cls.kind == EquilibriumKind::AllCenter) &&
                        !cls.resonant;
    if (!usable) {
        txt << "\nno normal-form construction for this spectrum\n";
        write_text_file(out_path(cfg, "analysis.txt"), txt.str());
        write_json_file(out_path(cfg, "analysis.json"), j);
        std::cout << txt.str();
        std::cerr << "analyze: classification failure: "
                  << (cls.detail.empty() ? to_string(cls.kind) : cls.detail) << "\n";
        return 2;
    }

    const NormalFormTransform t =
        build_transform(cls, ps.shifted, Vec::Zero(ps.shifted.dim()));
    if (cls.kind == EquilibriumKind::SaddleCenter) {
        txt << "lambda: " << format_double(cls.lambda) << "\n";
    }
    txt << "omegas:";
    for (double w : cls.omegas) txt << " " << format_double(w);
    txt << "\nnormalization constants c: " << format_vector(t.c) << "\n";
    txt << "\nM (normal form -> displacement):\n" << format_matrix(t.M);
    txt << "\nN (hyperbolic-plane rotation):\n" << format_matrix(t.N);
    txt << "\nS = N*M^-1 (displacement -> normal form):\n" << format_matrix(t.S);
    txt << "\nfeedback functions (displacements from the equilibrium):\n";
    for (int i = 0; i < t.n; ++i) {
        txt << "  F" << (i + 1) << " = " << format_feedback(t.feedback_rows(), i) << "\n";
    }
    txt << "\nconjugation residual: " << format_double(t.conjugation_residual) << "\n";
    j["lambda"] = t.lambda;
    j["omegas"] = t.omegas;
    j["constants"] = json_vector(t.c);
    j["M"] = json_matrix(t.M);
    j["N"] = json_matrix(t.N);
    j["S"] = json_matrix(t.S);
    j["feedback_rows"] = json_matrix(t.feedback_rows());
    j["conjugation_residual"] = t.conjugation_residual;
    j["conjugation_check"] = "pass";

    if (cfg.grid && ps.shifted.n == 2) {
        write_potential_grid(cfg, ps, nullptr);
        txt << "potential grid written to potential_grid.csv\n";
    }

    write_text_file(out_path(cfg, "analysis.txt"), txt.str());
    write_json_file(out_path(cfg, "analysis.json"), j);
    std::cout << txt.str();
    return 0;
}

namespace {

// Shared by `stabilize --no-control` and `simulate`: open-loop trajectories
// with transition diagnostics.
int run_open_loop(const RunConfig& cfg, const PreparedSystem& ps,
                  const SpectrumClassification& cls) {
    const NormalFormTransform* tp = nullptr;
    NormalFormTransform t;
    if ((cls.kind == EquilibriumKind::SaddleCenter ||
         cls.kind == EquilibriumKind::AllCenter) &&
        !cls.resonant) {
        t = build_transform(cls, ps.shifted, Vec::Zero(ps.shifted.dim()));
        tp = &t;
    }
    const IntegratorConfig icfg = integrator_config(cfg, 10.0);
    const int count = std::min(cfg.csv_count, cfg.samples);
    const std::vector<Vec> ics =
        sample_ball(Vec::Zero(ps.shifted.dim()), cfg.radius, count, cfg.seed);

    Json j;
    j["system"] = ps.original.name;
    j["control"] = "none";
    j["seed"] = cfg.seed;
    j["radius"] = cfg.radius;
    j["t_final"] = icfg.t_final;
    j["spectrum"] = spectrum_json(cls);
    Json trajs = Json::array();
    for (size_t i = 0; i < ics.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "traj_%03zu.csv", i);
        Json tj;
        tj["file"] = name;
        try {
            const Trajectory traj = integrate(ps.shifted, ics[i], icfg);
            write_trajectory_csv(out_path(cfg, name), traj, tp);
            tj["status"] = "ok";
            tj["energy_drift"] =
                std::abs(traj.energy.back() - traj.energy.front());
            if (tp) tj.update(trajectory_diagnostics(traj, *tp));
        } catch (const IntegrationError& e) {
            tj["status"] = "failed";
            tj["error"] = e.what();
            tj["t_reached"] = e.t_last;
        }
        trajs.push_back(std::move(tj));
    }
    j["trajectories"] = std::move(trajs);
    write_json_file(out_path(cfg, "simulation.json"), j);
    std::cout << "simulate: wrote " << ics.size() << " open-loop trajectories to "
              << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int run_simulate(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const PreparedSystem ps = prepare_system(cfg);
    const Linearization lin = linearize(ps.shifted, Vec::Zero(ps.shifted.dim()));
    const SpectrumClassification cls = classify(lin);
    return run_open_loop(cfg, ps, cls);
}

int run_stabilize(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const PreparedSystem ps = prepare_system(cfg);
    const Linearization lin = linearize(ps.shifted, Vec::Zero(ps.shifted.dim()));
    const SpectrumClassification cls = classify(lin);

    if (cfg.no_control) return run_open_loop(cfg, ps, cls);

    if (cls.kind != EquilibriumKind::SaddleCenter || cls.resonant) {
        throw ClassificationError(
            "stabilize: requires a clean saddle-center spectrum, got " +
            to_string(cls.kind) + (cls.detail.empty() ? "" : " (" + cls.detail + ")"));
    }
    const NormalFormTransform t =
        build_transform(cls, ps.shifted, Vec::Zero(ps.shifted.dim()));

    const double c = std::isnan(cfg.gain_c) ? 2.0 * t.lambda : cfg.gain_c;
    Vec d;
    if (!cfg.gain_d.empty()) {
        d = Eigen::Map<const Vec>(cfg.gain_d.data(), cfg.gain_d.size());
    }
    const ClosedLoopSystem cl = make_closed_loop(ps.shifted, t, c, d);
    const StabilizabilityReport checks = stabilizability_checks(cl);

    Json j;
    j["system"] = ps.original.name;
    j["equilibrium"] = json_vector(ps.z0);
    j["lambda"] = t.lambda;
    j["omegas"] = t.omegas;
    j["gain_c"] = c;
    j["gain_d"] = json_vector(cl.law.d);
    j["checks"] = Json{{"positive_definite", checks.positive_definite},
                       {"involution", checks.involution},
                       {"rank_codistribution", checks.rank_codistribution},
                       {"full_rank", checks.full_rank},
                       {"min_hmod_eigenvalue", checks.min_hmod_eigenvalue},
                       {"max_bracket_residual", checks.max_bracket_residual}};

    if (!checks.ok()) {
        write_json_file(out_path(cfg, "verification.json"), j);
        std::cerr << "stabilize: stabilizability checks failed\n";
        return 3;
    }

    const IntegratorConfig icfg = integrator_config(cfg, 300.0);
    const StabilityReport rep =
        verify_stability(cl, cfg.radius, cfg.samples, icfg, cfg.conv_tol, cfg.seed);

    j["seed"] = rep.seed;
    j["radius"] = rep.radius;
    j["samples"] = rep.n_samples;
    j["t_final"] = rep.t_final;
    j["conv_tol"] = rep.conv_tol;
    j["converged"] = rep.converged;
    j["failures"] = rep.failures;
    j["converged_fraction"] = rep.converged_fraction;
    j["max_final_distance"] = rep.max_final_distance;
    j["jacobian_spectrum"] = json_complex_list(rep.jacobian_eigenvalues);
    j["max_jacobian_real"] = rep.max_jacobian_real;

    // Dense recordings of the first few verification samples.
    const int count = std::min(cfg.csv_count, cfg.samples);
    const std::vector<Vec> ics =
        sample_ball(Vec::Zero(ps.shifted.dim()), cfg.radius, count, cfg.seed);
    Json trajs = Json::array();
    for (size_t i = 0; i < ics.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "traj_%03zu.csv", i);
        Json tj;
        tj["file"] = name;
        try {
            const Trajectory traj = integrate(cl, ics[i], icfg);
            write_trajectory_csv(out_path(cfg, name), traj, &t);
            tj["status"] = "ok";
            tj["final_distance"] =
                traj.states.back().lpNorm<Eigen::Infinity>();
            tj.update(trajectory_diagnostics(traj, t));
        } catch (const IntegrationError& e) {
            tj["status"] = "failed";
            tj["error"] = e.what();
            tj["t_reached"] = e.t_last;
        }
        trajs.push_back(std::move(tj));
    }
    j["trajectories"] = std::move(trajs);

    if (cfg.grid && ps.shifted.n == 2) write_potential_grid(cfg, ps, &cl);

    write_json_file(out_path(cfg, "verification.json"), j);
    std::cout << "stabilize: converged_fraction = " << rep.converged_fraction
              << " (" << rep.converged << "/" << rep.n_samples << "), max Re(eig) = "
              << rep.max_jacobian_real << "\n";

    if (rep.converged_fraction < cfg.converged_threshold) {
        std::cerr << "stabilize: converged fraction below threshold "
                  << cfg.converged_threshold << "\n";
        return 4;
    }
    return 0;
}

int run_destabilize(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    const PreparedSystem ps = prepare_system(cfg);
    const Vec origin = Vec::Zero(ps.shifted.dim());

    // Gain defaults to twice the slowest frequency.
    double c = cfg.gain_c;
    if (std::isnan(c)) {
        const SpectrumClassification cls = classify(linearize(ps.shifted, origin));
        if (cls.kind != EquilibriumKind::AllCenter) {
            throw ClassificationError("destabilize: requires an all-center equilibrium, got " +
                                      to_string(cls.kind));
        }
        c = 2.0 * cls.omegas.front();
    }
    const ClosedLoopSystem cl = destabilize(ps.shifted, origin, c);
    const HamiltonianSystem destab = cl.conservative_system();
    const SpectrumClassification after = classify(linearize(destab, origin));

    Json j;
    j["system"] = ps.original.name;
    j["gain_c"] = c;
    j["feedback_row"] = json_vector(cl.law.rows.row(0).transpose());
    j["spectrum_before"] = spectrum_json(classify(linearize(ps.shifted, origin)));
    j["spectrum_after"] = spectrum_json(after);
    j["saddle_center_confirmed"] = after.kind == EquilibriumKind::SaddleCenter;

    if (ps.original.name == "quadratic") {
        // The destabilized quadratic system is itself quadratic; emit it in
        // the polynomial ingestion format for round-tripping.
        const PolynomialHamiltonian poly =
            quadratic_form_polynomial(cl.hmod_hessian(origin));
        Json pj;
        pj["n"] = poly.n;
        Json terms = Json::array();
        for (const auto& term : poly.terms) {
            terms.push_back(Json{{"coeff", term.coeff}, {"exps", term.exps}});
        }
        pj["terms"] = std::move(terms);
        write_json_file(out_path(cfg, "destabilized_system.json"), pj);
        j["system_file"] = "destabilized_system.json";
    }

    write_json_file(out_path(cfg, "destabilize.json"), j);
    std::cout << "destabilize: new spectrum kind = " << to_string(after.kind)
              << ", lambda = " << after.lambda << "\n";
    return after.kind == EquilibriumKind::SaddleCenter ? 0 : 2;
}

int run_list_systems() {
    std::cout << "built-in systems:\n"
              << "  quadratic   decoupled quadratic form; params: lambda (optional, > 0),\n"
              << "              omega / omega1, omega2, ... (> 0). With lambda: one\n"
              << "              hyperbolic degree of freedom plus centers; without: centers\n"
              << "              only. No params: lambda=1, omega=1.\n"
              << "  model       double well + transverse oscillator; params: a (2), b (1), a > b.\n"
              << "  hydrogen    hydrogen atom in crossed electric/magnetic fields; param: eps (0.58).\n"
              << "  polynomial  user system from --poly-file JSON {\"n\": .., \"terms\": [{\"coeff\", \"exps\"}]}.\n";
    return 0;
}

int dispatch(const std::string& command, const RunConfig& cfg) {
    try {
        if (command == "analyze") return run_analyze(cfg);
        if (command == "stabilize") return run_stabilize(cfg);
        if (command == "simulate") return run_simulate(cfg);
        if (command == "destabilize") return run_destabilize(cfg);
        if (command == "list-systems") return run_list_systems();
        std::cerr << "unknown command: " << command << "\n";
        return 2;
    } catch (const ClassificationError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const ConstructionError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 2;
    } catch (const GainError& e) {
        std::cerr << command << ": " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        // precondition, convergence, rank, singularity, integration
        std::cerr << command << ": " << e.what() << "\n";
        return 3;
    }
}

}  // namespace hamstab
