#include "affine/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace affine {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const std::vector<std::pair<std::string, ScenarioKind>> kKinds = {
    {"classical-trajectory", ScenarioKind::ClassicalTrajectory},
    {"geodesic-compare", ScenarioKind::GeodesicCompare},
    {"conservation-audit", ScenarioKind::ConservationAudit},
    {"boundedness-2d", ScenarioKind::Boundedness2D},
    {"spectrum-2d", ScenarioKind::Spectrum2D},
    {"spectrum-qpm", ScenarioKind::SpectrumQpm},
    {"spectrum-polar", ScenarioKind::SpectrumPolar},
    {"operator-3d-check", ScenarioKind::Operator3DCheck},
};

std::string kind_name(ScenarioKind k) {
    for (const auto& [name, kind] : kKinds) {
        if (kind == k) return name;
    }
    return "?";
}

ScenarioKind parse_kind(const std::string& name) {
    for (const auto& [n, kind] : kKinds) {
        if (n == name) return kind;
    }
    throw ValidationError("kind: unknown scenario kind '" + name + "'");
}

Mat to_matrix(const std::vector<double>& flat, int n, const std::string& field) {
    if (static_cast<int>(flat.size()) != n * n) {
        throw ValidationError(field + ": expected " + std::to_string(n * n) + " entries");
    }
    Mat m(n, n);
    for (int i = 0; i < n * n; ++i) m(i / n, i % n) = flat[i];
    return m;
}

InertiaModel make_model(const ScenarioConfig& c) {
    try {
        if (c.model == "dalembert") {
            return InertiaModel::dalembert(c.mass, c.I * Mat::Identity(c.n, c.n));
        }
        if (c.model == "affine-affine") {
            return InertiaModel::affine_affine(c.n, c.mass, c.A, c.B);
        }
        if (c.model == "affine-metric") {
            return InertiaModel::affine_metric(c.n, c.mass, c.I, c.A, c.B);
        }
        if (c.model == "metric-affine") {
            return InertiaModel::metric_affine(c.n, c.mass, c.I, c.A, c.B);
        }
    } catch (const InvalidModel& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
    throw ValidationError("model: unknown model '" + c.model + "'");
}

Potential make_potential(const ScenarioConfig& c) {
    if (c.potential == "none") return Potential::none();
    if (c.potential == "dilatation-harmonic") return Potential::dilatation_harmonic(c.kappa);
    if (c.potential == "two-dim-preset") return Potential::two_dim_preset(c.kappa);
    if (c.potential == "qpm-family") return Potential::qpm_family(c.pot_a, c.pot_b, c.pot_c);
    if (c.potential == "binary-shear") {
        try {
            return Potential::binary_shear(to_matrix(c.shear_k, c.n, "shear_k"));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("shear_k: ") + e.what());
        }
    }
    throw ValidationError("potential: unknown potential '" + c.potential + "'");
}

PhasePoint initial_point(const ScenarioConfig& c, std::mt19937_64& rng) {
    const int n = c.n;
    PhasePoint pt;
    if (c.random_init) {
        std::normal_distribution<double> nd(0.0, 0.3);
        pt.x = Vec::Zero(n);
        pt.p = Vec::Zero(n);
        for (int i = 0; i < n; ++i) pt.p(i) = nd(rng);
        do {
            pt.phi = Mat::Identity(n, n);
            for (int i = 0; i < n * n; ++i) pt.phi(i / n, i % n) += nd(rng);
        } while (pt.phi.determinant() <= 0.1);
        pt.P.resize(n, n);
        for (int i = 0; i < n * n; ++i) pt.P(i / n, i % n) = nd(rng);
    } else {
        if (static_cast<int>(c.x0.size()) != n || static_cast<int>(c.p0.size()) != n) {
            throw ValidationError("x0/p0: expected " + std::to_string(n) + " entries");
        }
        pt.x = Eigen::Map<const Vec>(c.x0.data(), n);
        pt.p = Eigen::Map<const Vec>(c.p0.data(), n);
        pt.phi = to_matrix(c.phi0, n, "phi0");
        pt.P = to_matrix(c.P0, n, "P0");
        if (pt.phi.determinant() <= 0.0) {
            throw ValidationError("phi0: det(phi0) must be positive");
        }
    }
    return pt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config load / emit
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void read_field(const json& doc, const char* key, T& target) {
    if (!doc.contains(key)) return;
    try {
        target = doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string(key) + ": wrong type");
    }
}

}  // namespace

ScenarioConfig load_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config must be a JSON object");

    static const std::vector<std::string> known = {
        "kind", "model", "n", "mass", "I", "A", "B", "potential", "kappa", "pot_a", "pot_b",
        "pot_c", "shear_k", "scheme", "dt", "steps", "store_every", "incompressible",
        "random_init", "x0", "p0", "phi0", "P0", "hbar", "grid_n", "box", "levels", "m_lo",
        "m_hi", "n_lo", "n_hi", "ch_m", "ch_n", "s", "j", "grid3_n", "grid3_lo", "grid3_hi",
        "p_lo", "p_hi", "p_steps", "seed", "out"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ValidationError(key + ": unknown config field");
        }
    }

    ScenarioConfig c;
    std::string kind_str = kind_name(c.kind);
    read_field(doc, "kind", kind_str);
    c.kind = parse_kind(kind_str);
    read_field(doc, "model", c.model);
    read_field(doc, "n", c.n);
    read_field(doc, "mass", c.mass);
    read_field(doc, "I", c.I);
    read_field(doc, "A", c.A);
    read_field(doc, "B", c.B);
    read_field(doc, "potential", c.potential);
    read_field(doc, "kappa", c.kappa);
    read_field(doc, "pot_a", c.pot_a);
    read_field(doc, "pot_b", c.pot_b);
    read_field(doc, "pot_c", c.pot_c);
    read_field(doc, "shear_k", c.shear_k);
    read_field(doc, "scheme", c.scheme);
    read_field(doc, "dt", c.dt);
    read_field(doc, "steps", c.steps);
    read_field(doc, "store_every", c.store_every);
    read_field(doc, "incompressible", c.incompressible);
    read_field(doc, "random_init", c.random_init);
    read_field(doc, "x0", c.x0);
    read_field(doc, "p0", c.p0);
    read_field(doc, "phi0", c.phi0);
    read_field(doc, "P0", c.P0);
    read_field(doc, "hbar", c.hbar);
    read_field(doc, "grid_n", c.grid_n);
    read_field(doc, "box", c.box);
    read_field(doc, "levels", c.levels);
    read_field(doc, "m_lo", c.m_lo);
    read_field(doc, "m_hi", c.m_hi);
    read_field(doc, "n_lo", c.n_lo);
    read_field(doc, "n_hi", c.n_hi);
    read_field(doc, "ch_m", c.ch_m);
    read_field(doc, "ch_n", c.ch_n);
    read_field(doc, "s", c.s);
    read_field(doc, "j", c.j);
    read_field(doc, "grid3_n", c.grid3_n);
    read_field(doc, "grid3_lo", c.grid3_lo);
    read_field(doc, "grid3_hi", c.grid3_hi);
    read_field(doc, "p_lo", c.p_lo);
    read_field(doc, "p_hi", c.p_hi);
    read_field(doc, "p_steps", c.p_steps);
    read_field(doc, "seed", c.seed);
    read_field(doc, "out", c.out);

    // Precondition checks at load time, reported with field paths.
    if (c.n < 1) throw ValidationError("n: body dimension must be positive");
    if (c.dt <= 0.0) throw ValidationError("dt: must be positive");
    if (c.steps <= 0) throw ValidationError("steps: must be positive");
    if (c.store_every <= 0) throw ValidationError("store_every: must be positive");
    if (c.scheme != "midpoint" && c.scheme != "rk4") {
        throw ValidationError("scheme: must be 'midpoint' or 'rk4'");
    }
    if (c.grid_n < 16) throw ValidationError("grid_n: must be >= 16");
    if (c.box <= 0.0) throw ValidationError("box: must be positive");
    if (c.hbar <= 0.0) throw ValidationError("hbar: must be positive");
    if (c.levels < 1) throw ValidationError("levels: must be >= 1");
    if (c.p_steps < 1) throw ValidationError("p_steps: must be >= 1");
    if (c.grid3_n < 2) throw ValidationError("grid3_n: must be >= 2");
    make_model(c);  // validates the model block (degenerate-metric constraints)
    make_potential(c);
    if (c.kind == ScenarioKind::Operator3DCheck) {
        if (c.n != 3) throw ValidationError("n: operator-3d-check requires n = 3");
        try {
            Channel3D chk(c.s, c.j);
        } catch (const InvalidLabel& e) {
            throw ValidationError(std::string("s/j: ") + e.what());
        }
    }
    return c;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config(ss.str());
}

std::string emit_config(const ScenarioConfig& c) {
    json doc;  // nlohmann::json orders keys lexicographically: canonical form
    doc["kind"] = kind_name(c.kind);
    doc["model"] = c.model;
    doc["n"] = c.n;
    doc["mass"] = c.mass;
    doc["I"] = c.I;
    doc["A"] = c.A;
    doc["B"] = c.B;
    doc["potential"] = c.potential;
    doc["kappa"] = c.kappa;
    doc["pot_a"] = c.pot_a;
    doc["pot_b"] = c.pot_b;
    doc["pot_c"] = c.pot_c;
    doc["shear_k"] = c.shear_k;
    doc["scheme"] = c.scheme;
    doc["dt"] = c.dt;
    doc["steps"] = c.steps;
    doc["store_every"] = c.store_every;
    doc["incompressible"] = c.incompressible;
    doc["random_init"] = c.random_init;
    doc["x0"] = c.x0;
    doc["p0"] = c.p0;
    doc["phi0"] = c.phi0;
    doc["P0"] = c.P0;
    doc["hbar"] = c.hbar;
    doc["grid_n"] = c.grid_n;
    doc["box"] = c.box;
    doc["levels"] = c.levels;
    doc["m_lo"] = c.m_lo;
    doc["m_hi"] = c.m_hi;
    doc["n_lo"] = c.n_lo;
    doc["n_hi"] = c.n_hi;
    doc["ch_m"] = c.ch_m;
    doc["ch_n"] = c.ch_n;
    doc["s"] = c.s;
    doc["j"] = c.j;
    doc["grid3_n"] = c.grid3_n;
    doc["grid3_lo"] = c.grid3_lo;
    doc["grid3_hi"] = c.grid3_hi;
    doc["p_lo"] = c.p_lo;
    doc["p_hi"] = c.p_hi;
    doc["p_steps"] = c.p_steps;
    doc["seed"] = c.seed;
    doc["out"] = c.out;
    return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const ScenarioConfig& config) { return fnv1a(emit_config(config)); }

// ---------------------------------------------------------------------------
// Scenario execution
// ---------------------------------------------------------------------------

namespace {

ResultTable run_classical(const ScenarioConfig& c) {
    const InertiaModel model = make_model(c);
    const Potential pot = make_potential(c);
    const MetricPair metrics = MetricPair::euclidean(c.n);
    std::mt19937_64 rng(c.seed);
    const PhasePoint start = initial_point(c, rng);

    IntegrateOptions opt;
    opt.store_every = c.store_every;
    opt.incompressible = c.incompressible;
    const Scheme scheme = (c.scheme == "rk4") ? Scheme::RK4 : Scheme::ImplicitMidpoint;
    const Trajectory traj = integrate(model, pot, start, scheme, c.dt, c.steps, metrics, opt);
    if (traj.diverged) throw NumericalFailure("classical run diverged");

    ResultTable t;
    t.columns = {"t", "qbar"};
    if (c.n == 2) {
        t.columns.push_back("x");
    } else {
        for (int a = 1; a <= c.n; ++a) t.columns.push_back("q" + std::to_string(a));
    }
    for (const char* name : {"energy", "spin_norm", "vorticity_norm", "energy_drift",
                             "spin_drift", "vorticity_drift", "deviator_drift"}) {
        t.columns.push_back(name);
    }

    const double H0 = total_energy(model, pot, traj.states.front(), metrics);
    const SpinVorticity sv0 = spin_vorticity(traj.states.front(), metrics);
    const Mat dev0 = trace_split(sv0.SigmaHat).sigma;
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const PhasePoint& s = traj.states[i];
        const Vec q = deformation_invariants(s.phi, metrics);
        const SpinVorticity sv = spin_vorticity(s, metrics);
        const double H = total_energy(model, pot, s, metrics);
        std::vector<double> row = {traj.times[i], q.mean()};
        if (c.n == 2) {
            row.push_back(q(1) - q(0));
        } else {
            for (int a = 0; a < c.n; ++a) row.push_back(q(a));
        }
        row.push_back(H);
        row.push_back(sv.S.norm());
        row.push_back(sv.V.norm());
        row.push_back(std::abs(H - H0) / std::max(std::abs(H0), 1e-12));
        row.push_back((sv.S - sv0.S).norm());
        row.push_back((sv.V - sv0.V).norm());
        row.push_back((trace_split(sv.SigmaHat).sigma - dev0).norm());
        t.rows.push_back(std::move(row));
    }
    return t;
}

ResultTable run_geodesic_compare(const ScenarioConfig& c) {
    ScenarioConfig cc = c;
    cc.model = "affine-affine";
    cc.potential = "none";
    const InertiaModel model = make_model(cc);
    const MetricPair metrics = MetricPair::euclidean(c.n);
    std::mt19937_64 rng(c.seed);
    PhasePoint start = initial_point(cc, rng);
    start.p.setZero();  // internal geodesics require the rest frame
    const Velocities vel = inverse_legendre(model, start, metrics);
    const Mat omega_hat = affine_velocity(start.phi, vel.phidot).OmegaHat;

    IntegrateOptions opt;
    opt.store_every = c.store_every;
    const Trajectory traj =
        integrate(model, Potential::none(), start, Scheme::ImplicitMidpoint, c.dt, c.steps,
                  metrics, opt);

    ResultTable t;
    t.columns = {"t", "exp_map_error"};
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const Mat exact = geodesic_exponential(start.phi, omega_hat, traj.times[i]);
        t.rows.push_back({traj.times[i], (exact - traj.states[i].phi).norm()});
    }
    return t;
}

ResultTable run_conservation_audit(const ScenarioConfig& c) {
    const InertiaModel model = make_model(c);
    const Potential pot = make_potential(c);
    const MetricPair metrics = MetricPair::euclidean(c.n);
    std::mt19937_64 rng(c.seed);
    const PhasePoint start = initial_point(c, rng);

    IntegrateOptions opt;
    opt.store_every = c.store_every;
    opt.incompressible = c.incompressible;
    const Scheme scheme = (c.scheme == "rk4") ? Scheme::RK4 : Scheme::ImplicitMidpoint;
    const Trajectory traj = integrate(model, pot, start, scheme, c.dt, c.steps, metrics, opt);

    ResultTable t;
    t.columns = {"energy_drift", "spin_drift", "vorticity_drift", "deviator_drift", "diverged"};
    t.rows.push_back({traj.audit.energy_drift, traj.audit.spin_drift,
                      traj.audit.vorticity_drift, traj.audit.deviator_drift,
                      traj.diverged ? 1.0 : 0.0});
    return t;
}

ResultTable run_boundedness(const ScenarioConfig& c) {
    ResultTable t;
    t.columns = {"p_alpha", "p_beta", "classification"};
    const double span = (c.p_steps > 1) ? (c.p_hi - c.p_lo) / (c.p_steps - 1) : 0.0;
    for (int i = 0; i < c.p_steps; ++i) {
        for (int j = 0; j < c.p_steps; ++j) {
            const double pa = c.p_lo + i * span;
            const double pb = c.p_lo + j * span;
            t.rows.push_back({pa, pb, static_cast<double>(classify_2d(pa, pb))});
        }
    }
    return t;
}

ResultTable run_spectrum_2d(const ScenarioConfig& c) {
    const InertiaModel model = make_model(c);
    ResultTable t;
    t.columns = {"m", "n", "count", "status"};
    BoundStateParams params;
    params.N = c.grid_n;
    params.L = c.box;
    params.hbar = c.hbar;
    for (int m = c.m_lo; m <= c.m_hi; ++m) {
        for (int n = c.n_lo; n <= c.n_hi; ++n) {
            double count = 0.0, status = 0.0;
            try {
                count = bound_state_count(model, m, n, params);
            } catch (const Error&) {
                status = 3.0;
            }
            t.rows.push_back({double(m), double(n), count, status});
        }
    }
    return t;
}

std::function<double(double)> family_channel(const ScenarioConfig& c, bool plus) {
    if (c.potential == "none") return nullptr;
    if (c.potential != "qpm-family") {
        throw ValidationError("potential: spectrum scenarios support 'none' or 'qpm-family'");
    }
    const double inv = plus ? c.pot_a : c.pot_b;
    const double quad = c.pot_c;
    return [inv, quad](double q) { return inv / (q * q) + quad * q * q; };
}

ResultTable run_spectrum_qpm(const ScenarioConfig& c) {
    DAlembertParams params;
    params.inertia = (c.model == "dalembert") ? c.I : 1.0;
    params.hbar = c.hbar;
    params.N = c.grid_n;
    params.L = c.box;
    params.levels = c.levels;

    ResultTable t;
    t.columns = {"m", "n", "branch", "k", "energy", "converged", "status"};
    double status = 0.0;
    try {
        const auto [sp, sm] =
            dalembert_qpm_solver(c.ch_m, c.ch_n, family_channel(c, true),
                                 family_channel(c, false), params);
        for (const Spectrum* s : {&sp, &sm}) {
            for (const auto& lvl : s->levels) {
                t.rows.push_back({lvl.labels[0], lvl.labels[1], lvl.labels[2], lvl.labels[3],
                                  lvl.energy, lvl.converged ? 1.0 : 0.0, 0.0});
            }
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const Error&) {
        status = 3.0;
        t.rows.push_back({double(c.ch_m), double(c.ch_n), 0.0, 0.0, 0.0, 0.0, status});
    }
    return t;
}

ResultTable run_spectrum_polar(const ScenarioConfig& c) {
    DAlembertParams params;
    params.inertia = (c.model == "dalembert") ? c.I : 1.0;
    params.hbar = c.hbar;
    params.N = c.grid_n;
    params.L = c.box;
    params.levels = c.levels;

    std::function<double(double)> vr, vphi;
    if (c.potential == "qpm-family") {
        const double a = c.pot_a, b = c.pot_b, quad = c.pot_c;
        vr = [quad](double r) { return quad * r * r; };
        vphi = [a, b](double phi) {
            const double cs = std::cos(phi), sn = std::sin(phi);
            return a / (cs * cs) + b / (sn * sn);
        };
    } else if (c.potential != "none") {
        throw ValidationError("potential: spectrum scenarios support 'none' or 'qpm-family'");
    }

    ResultTable t;
    t.columns = {"m", "n", "k", "mu", "energy", "converged", "status"};
    try {
        const Spectrum s = dalembert_polar_solver(c.ch_m, c.ch_n, vr, vphi, params);
        for (const auto& lvl : s.levels) {
            t.rows.push_back({lvl.labels[0], lvl.labels[1], lvl.labels[2], lvl.labels[3],
                              lvl.energy, lvl.converged ? 1.0 : 0.0, 0.0});
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const Error&) {
        t.rows.push_back({double(c.ch_m), double(c.ch_n), 0.0, 0.0, 0.0, 0.0, 3.0});
    }
    return t;
}

ResultTable run_operator_3d(const ScenarioConfig& c) {
    const InertiaModel model = make_model(c);
    Grid3D grid{c.grid3_n, c.grid3_lo, c.grid3_hi};
    const ReducedOperator3D op = reduced_kinetic_3d(model, c.s, c.j, grid, c.hbar);
    const double residual =
        op.hermiticity_residual(3, static_cast<unsigned>(c.seed ^ 0x9e3779b9));

    double match = -1.0;
    if (c.s == 0.0 && c.j == 0.0 && c.grid3_n <= 12) {
        const CMat hd = op.dense();
        std::vector<int> act;
        for (int u = 0; u < op.nodes(); ++u) {
            if (!op.mask[u]) act.push_back(u);
        }
        const int m = static_cast<int>(act.size());
        Mat hs(m, m);
        for (int r = 0; r < m; ++r) {
            for (int col = 0; col < m; ++col) {
                hs(r, col) = std::real(hd(act[r], act[col])) *
                             std::sqrt(op.node_weight[act[r]] / op.node_weight[act[col]]);
            }
        }
        const Mat href = scalar_channel_dense(model, grid, c.hbar);
        Eigen::SelfAdjointEigenSolver<Mat> e1(0.5 * (hs + hs.transpose())), e2(href);
        match = (e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff();
    }

    ResultTable t;
    t.columns = {"s", "j", "grid_n", "hermiticity_residual", "scalar_spectrum_error"};
    t.rows.push_back({c.s, c.j, double(c.grid3_n), residual, match});
    return t;
}

}  // namespace

ResultTable run_scenario(const ScenarioConfig& config) {
    ResultTable t;
    switch (config.kind) {
        case ScenarioKind::ClassicalTrajectory: t = run_classical(config); break;
        case ScenarioKind::GeodesicCompare: t = run_geodesic_compare(config); break;
        case ScenarioKind::ConservationAudit: t = run_conservation_audit(config); break;
        case ScenarioKind::Boundedness2D: t = run_boundedness(config); break;
        case ScenarioKind::Spectrum2D: t = run_spectrum_2d(config); break;
        case ScenarioKind::SpectrumQpm: t = run_spectrum_qpm(config); break;
        case ScenarioKind::SpectrumPolar: t = run_spectrum_polar(config); break;
        case ScenarioKind::Operator3DCheck: t = run_operator_3d(config); break;
    }
    t.cfg_hash = config_hash(config);
    t.seed = config.seed;
    return t;
}

// ---------------------------------------------------------------------------
// Export / import / audit
// ---------------------------------------------------------------------------

namespace {

std::string format_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Canonical payload text: header line plus one CSV line per row, LF endings.
std::string table_payload(const ResultTable& t) {
    std::string out;
    for (size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != t.columns.size()) {
            throw ValidationError("export_table: ragged row " + std::to_string(r));
        }
        for (size_t i = 0; i < t.rows[r].size(); ++i) {
            const double v = t.rows[r][i];
            if (!std::isfinite(v)) {
                throw ValidationError("export_table: non-finite value at row " +
                                      std::to_string(r) + ", column " + t.columns[i]);
            }
            if (i) out += ',';
            out += format_cell(v);
        }
        out += '\n';
    }
    return out;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IOFailure("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw IOFailure("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IOFailure("rename failed: " + path);
    }
}

}  // namespace

std::uint64_t table_hash(const ResultTable& table) { return fnv1a(table_payload(table)); }

void export_table(const ResultTable& table, const std::string& path, ExportFormat format) {
    const std::string payload = table_payload(table);
    const std::uint64_t thash = fnv1a(payload);
    if (format == ExportFormat::CSV) {
        std::string out;
        out += "# affine-scenario v" + table.version + "\n";
        out += "# config_hash: " + hex64(table.cfg_hash) + "\n";
        out += "# seed: " + std::to_string(table.seed) + "\n";
        out += "# table_hash: " + hex64(thash) + "\n";
        out += payload;
        atomic_write(path, out);
    } else {
        json doc;
        doc["provenance"] = {{"version", table.version},
                             {"config_hash", hex64(table.cfg_hash)},
                             {"seed", table.seed},
                             {"table_hash", hex64(thash)}};
        doc["columns"] = table.columns;
        doc["rows"] = table.rows;
        atomic_write(path, doc.dump(2) + "\n");
    }
}

ResultTable import_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot read table: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    ResultTable t;
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("table parse error: ") + e.what());
        }
        t.columns = doc.at("columns").get<std::vector<std::string>>();
        t.rows = doc.at("rows").get<std::vector<std::vector<double>>>();
        const auto& prov = doc.at("provenance");
        t.version = prov.at("version").get<std::string>();
        t.cfg_hash = std::stoull(prov.at("config_hash").get<std::string>(), nullptr, 16);
        t.seed = prov.at("seed").get<std::uint64_t>();
        return t;
    }

    std::istringstream lines(text);
    std::string line;
    bool header_read = false;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto grab = [&](const char* key) -> std::string {
                const std::string tag = std::string("# ") + key + ": ";
                return line.rfind(tag, 0) == 0 ? line.substr(tag.size()) : std::string();
            };
            if (auto v = grab("config_hash"); !v.empty()) t.cfg_hash = std::stoull(v, nullptr, 16);
            if (auto v = grab("seed"); !v.empty()) t.seed = std::stoull(v);
            if (line.rfind("# affine-scenario v", 0) == 0) {
                t.version = line.substr(std::string("# affine-scenario v").size());
            }
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!header_read) {
            t.columns = cells;
            header_read = true;
        } else {
            std::vector<double> row;
            for (const auto& c : cells) {
                try {
                    row.push_back(std::stod(c));
                } catch (const std::exception&) {
                    throw ParseError("table cell is not numeric: '" + c + "'");
                }
            }
            t.rows.push_back(std::move(row));
        }
    }
    if (!header_read) throw ParseError("table has no header row: " + path);
    return t;
}

bool audit_table(const std::string& path, std::string& message) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOFailure("cannot read table: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::uint64_t embedded = 0;
    bool found = false;
    const size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            const json doc = json::parse(text);
            embedded =
                std::stoull(doc.at("provenance").at("table_hash").get<std::string>(), nullptr, 16);
            found = true;
        } catch (const std::exception& e) {
            throw ParseError(std::string("audit: cannot parse JSON table: ") + e.what());
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.rfind("# table_hash: ", 0) == 0) {
                embedded = std::stoull(line.substr(14), nullptr, 16);
                found = true;
            }
        }
    }
    if (!found) {
        message = "no embedded table hash found";
        return false;
    }
    const ResultTable t = import_table(path);
    const std::uint64_t recomputed = table_hash(t);
    if (recomputed == embedded) {
        message = "table hash verified (" + hex64(embedded) + ")";
        return true;
    }
    message = "HASH MISMATCH: embedded " + hex64(embedded) + " recomputed " + hex64(recomputed);
    return false;
}

}  // namespace affine
