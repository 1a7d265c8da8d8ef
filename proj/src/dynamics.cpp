#include "affine/dynamics.hpp"

#include <cmath>

namespace affine {

// ---------------------------------------------------------------------------
// Inertia models
// ---------------------------------------------------------------------------

InertiaModel InertiaModel::dalembert(double mass, Mat J) {
    if (mass <= 0.0) throw InvalidModel("dalembert: mass must be positive");
    if (!is_spd(J)) throw InvalidModel("dalembert: J must be symmetric positive definite");
    InertiaModel m;
    m.kind = ModelKind::DAlembert;
    m.n = static_cast<int>(J.rows());
    m.mass = mass;
    m.J = std::move(J);
    m.positive_definite = true;
    return m;
}

InertiaModel InertiaModel::affine_affine(int n, double mass, double A, double B) {
    if (mass <= 0.0) throw InvalidModel("affine_affine: mass must be positive");
    if (A == 0.0 || A + n * B == 0.0) {
        throw InvalidModel("affine_affine: requires A != 0 and A + nB != 0 (degenerate metric)");
    }
    InertiaModel m;
    m.kind = ModelKind::AffineAffine;
    m.n = n;
    m.mass = mass;
    m.A = A;
    m.B = B;
    // Tr(OmegaHat^2) weighs the antisymmetric part with the opposite sign, so
    // the affine-affine internal metric is always pseudo-Riemannian.
    m.positive_definite = false;
    return m;
}

namespace {

InertiaModel make_mixed(ModelKind kind, int n, double mass, double I, double A, double B,
                        const char* name) {
    if (mass <= 0.0) throw InvalidModel(std::string(name) + ": mass must be positive");
    if (I + A == 0.0 || I * I == A * A || I + A + n * B == 0.0) {
        throw InvalidModel(std::string(name) +
                           ": requires I+A != 0, I^2 != A^2 and I+A+nB != 0");
    }
    InertiaModel m;
    m.kind = kind;
    m.n = n;
    m.mass = mass;
    m.I = I;
    m.A = A;
    m.B = B;
    m.positive_definite = (I + A > 0.0) && (I - A > 0.0) && ((I + A) / n + B > 0.0);
    return m;
}

}  // namespace

InertiaModel InertiaModel::affine_metric(int n, double mass, double I, double A, double B) {
    return make_mixed(ModelKind::AffineMetric, n, mass, I, A, B, "affine_metric");
}

InertiaModel InertiaModel::metric_affine(int n, double mass, double I, double A, double B) {
    return make_mixed(ModelKind::MetricAffine, n, mass, I, A, B, "metric_affine");
}

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------

Potential Potential::none() { return Potential{}; }

Potential Potential::dilatation_harmonic(double kappa) {
    Potential p;
    p.kind = Kind::DilatationHarmonic;
    p.kappa = kappa;
    return p;
}

Potential Potential::binary_shear(Mat k_table) {
    if (!is_symmetric(k_table)) {
        throw ValidationError("binary_shear: spring table must be symmetric");
    }
    Potential p;
    p.kind = Kind::BinaryShear;
    p.shear_k = std::move(k_table);
    return p;
}

Potential Potential::two_dim_preset(double kappa) {
    Potential p;
    p.kind = Kind::TwoDimPreset;
    p.kappa = kappa;
    return p;
}

Potential Potential::qpm_family(double a, double b, double c) {
    Potential p;
    p.kind = Kind::QpmFamily;
    p.qa = a;
    p.qb = b;
    p.qc = c;
    return p;
}

double Potential::value(const Vec& q) const {
    const int n = static_cast<int>(q.size());
    switch (kind) {
        case Kind::None:
            return 0.0;
        case Kind::DilatationHarmonic: {
            const double qbar = q.mean();
            return 0.5 * kappa * qbar * qbar;
        }
        case Kind::BinaryShear: {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    const double d = q(i) - q(j);
                    acc += 0.5 * shear_k(i, j) * d * d;
                }
            }
            return acc;
        }
        case Kind::TwoDimPreset:
        case Kind::PolarTrig: {
            // kappa * (1/(D1 D2) + (D1^2 + D2^2)/2) with D_a = exp(q_a).
            const double d1 = std::exp(q(0)), d2 = std::exp(q(1));
            return kappa * (1.0 / (d1 * d2) + 0.5 * (d1 * d1 + d2 * d2));
        }
        case Kind::QpmFamily: {
            const double d1 = std::exp(q(0)), d2 = std::exp(q(1));
            const double qp = (d1 + d2) / std::sqrt(2.0);
            const double qm = (d1 - d2) / std::sqrt(2.0);
            return qa / (qp * qp) + qb / (qm * qm) + qc * (qp * qp + qm * qm);
        }
    }
    return 0.0;
}

Vec Potential::grad(const Vec& q) const {
    const int n = static_cast<int>(q.size());
    Vec g = Vec::Zero(n);
    switch (kind) {
        case Kind::None:
            break;
        case Kind::DilatationHarmonic: {
            const double qbar = q.mean();
            g.setConstant(kappa * qbar / n);
            break;
        }
        case Kind::BinaryShear: {
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    if (b != a) g(a) += shear_k(a, b) * (q(a) - q(b));
                }
            }
            break;
        }
        case Kind::TwoDimPreset:
        case Kind::PolarTrig: {
            const double d1 = std::exp(q(0)), d2 = std::exp(q(1));
            g(0) = kappa * (-1.0 / (d1 * d2) + d1 * d1);
            g(1) = kappa * (-1.0 / (d1 * d2) + d2 * d2);
            break;
        }
        case Kind::QpmFamily: {
            const double d1 = std::exp(q(0)), d2 = std::exp(q(1));
            const double s = d1 + d2, m = d1 - d2;
            // V = 2a/s^2 + 2b/m^2 + c(d1^2 + d2^2); dV/dq_a = dV/dD_a * D_a
            const double dV1 = -4.0 * qa / (s * s * s) - 4.0 * qb / (m * m * m) + 2.0 * qc * d1;
            const double dV2 = -4.0 * qa / (s * s * s) + 4.0 * qb / (m * m * m) + 2.0 * qc * d2;
            g(0) = dV1 * d1;
            g(1) = dV2 * d2;
            break;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Kinetic energies (velocity form)
// ---------------------------------------------------------------------------

namespace {

void check_dim(const InertiaModel& model, const Mat& phi) {
    if (phi.rows() != model.n) throw ShapeError("model/phi dimension mismatch");
}

// eta-symmetric / eta-antisymmetric split of a mixed tensor.
void metric_split(const Mat& x, const Mat& metric, Mat& sym, Mat& asym) {
    const Mat xt = metric_transpose(x, metric);
    sym = 0.5 * (x + xt);
    asym = 0.5 * (x - xt);
}

}  // namespace

double kinetic_energy(const InertiaModel& model, const Mat& phi, const Velocities& vel,
                      const MetricPair& metrics) {
    check_dim(model, phi);
    const Mat& g = metrics.g;
    const Mat& eta = metrics.eta;
    switch (model.kind) {
        case ModelKind::DAlembert: {
            const double t_tr = 0.5 * model.mass * vel.v.dot(g * vel.v);
            const double t_int = 0.5 * (vel.phidot.transpose() * g * vel.phidot * model.J).trace();
            return t_tr + t_int;
        }
        case ModelKind::AffineAffine: {
            const Vec vhat = phi.partialPivLu().solve(vel.v);
            const Mat omhat = phi.partialPivLu().solve(vel.phidot);
            const double t = omhat.trace();
            return 0.5 * model.mass * vhat.dot(eta * vhat) +
                   0.5 * model.A * (omhat * omhat).trace() + 0.5 * model.B * t * t;
        }
        case ModelKind::AffineMetric: {
            const Vec vhat = phi.partialPivLu().solve(vel.v);
            const Mat omhat = phi.partialPivLu().solve(vel.phidot);
            const double t = omhat.trace();
            const double quad = (omhat.transpose() * eta * omhat *
                                 eta.ldlt().solve(Mat::Identity(model.n, model.n)))
                                    .trace();
            return 0.5 * model.mass * vhat.dot(eta * vhat) + 0.5 * model.I * quad +
                   0.5 * model.A * (omhat * omhat).trace() + 0.5 * model.B * t * t;
        }
        case ModelKind::MetricAffine: {
            const Mat om = vel.phidot * phi.inverse();
            const double t = om.trace();
            const double quad =
                (om.transpose() * g * om * g.ldlt().solve(Mat::Identity(model.n, model.n)))
                    .trace();
            return 0.5 * model.mass * vel.v.dot(g * vel.v) + 0.5 * model.I * quad +
                   0.5 * model.A * (om * om).trace() + 0.5 * model.B * t * t;
        }
    }
    return 0.0;
}

double kinetic_energy_alt(const InertiaModel& model, const Mat& phi, const Velocities& vel,
                          const MetricPair& metrics) {
    check_dim(model, phi);
    const DeformationTensors def = green_cauchy(phi, metrics);
    switch (model.kind) {
        case ModelKind::DAlembert: {
            // Green-tensor route: T = (m/2) G_AB vhat^A vhat^B + (1/2) G_AB OmHat^A_K OmHat^B_L J^KL
            const Vec vhat = phi.partialPivLu().solve(vel.v);
            const Mat omhat = phi.partialPivLu().solve(vel.phidot);
            return 0.5 * model.mass * vhat.dot(def.G * vhat) +
                   0.5 * (omhat.transpose() * def.G * omhat * model.J).trace();
        }
        case ModelKind::AffineAffine: {
            // Spatial route: Cauchy-form translations plus Omega traces.
            const Mat om = vel.phidot * phi.inverse();
            const double t = om.trace();
            return 0.5 * model.mass * vel.v.dot(def.C * vel.v) +
                   0.5 * model.A * (om * om).trace() + 0.5 * model.B * t * t;
        }
        case ModelKind::AffineMetric: {
            // eta-symmetric/antisymmetric split route.
            const Mat omhat = phi.partialPivLu().solve(vel.phidot);
            Mat s, a;
            metric_split(omhat, metrics.eta, s, a);
            const double t = omhat.trace();
            return 0.5 * model.mass * vel.v.dot(def.C * vel.v) +
                   0.5 * (model.I + model.A) * (s * s).trace() +
                   0.5 * (model.A - model.I) * (a * a).trace() + 0.5 * model.B * t * t;
        }
        case ModelKind::MetricAffine: {
            const Mat om = vel.phidot * phi.inverse();
            Mat s, a;
            metric_split(om, metrics.g, s, a);
            const double t = om.trace();
            const Vec vhat = phi.partialPivLu().solve(vel.v);
            return 0.5 * model.mass * vhat.dot(def.G * vhat) +
                   0.5 * (model.I + model.A) * (s * s).trace() +
                   0.5 * (model.A - model.I) * (a * a).trace() + 0.5 * model.B * t * t;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Kinetic Hamiltonians (momentum form)
// ---------------------------------------------------------------------------

namespace {

double translational_hamiltonian(const InertiaModel& model, const PhasePoint& point,
                                 const MetricPair& metrics, bool alt) {
    switch (model.kind) {
        case ModelKind::DAlembert:
        case ModelKind::MetricAffine: {
            if (!alt) {
                return 0.5 / model.mass * point.p.dot(metrics.g.ldlt().solve(point.p));
            }
            // Pullback route through the Green tensor.
            const Vec phat = point.phi.transpose() * point.p;
            const Mat G = point.phi.transpose() * metrics.g * point.phi;
            return 0.5 / model.mass * phat.dot(G.ldlt().solve(phat));
        }
        case ModelKind::AffineAffine:
        case ModelKind::AffineMetric: {
            if (!alt) {
                const Vec phat = point.phi.transpose() * point.p;
                return 0.5 / model.mass * phat.dot(metrics.eta.ldlt().solve(phat));
            }
            // Cauchy route: (1/2m) Ctilde^{ij} p_i p_j with Ctilde = phi etatilde phi^T.
            const Mat ctil = point.phi * metrics.eta.ldlt().solve(point.phi.transpose());
            return 0.5 / model.mass * point.p.dot(ctil * point.p);
        }
    }
    return 0.0;
}

}  // namespace

double kinetic_hamiltonian(const InertiaModel& model, const PhasePoint& point,
                           const MetricPair& metrics) {
    check_dim(model, point.phi);
    const double t_tr = translational_hamiltonian(model, point, metrics, /*alt=*/false);
    switch (model.kind) {
        case ModelKind::DAlembert: {
            const Mat gtil = metrics.g.ldlt().solve(Mat::Identity(model.n, model.n));
            const Mat jtil = model.J.ldlt().solve(Mat::Identity(model.n, model.n));
            return t_tr + 0.5 * (jtil * point.P * gtil * point.P.transpose()).trace();
        }
        case ModelKind::AffineAffine: {
            const Mat sigma_hat = point.P * point.phi;
            const double c2 = (sigma_hat * sigma_hat).trace();
            const double c1 = sigma_hat.trace();
            return t_tr + 0.5 / model.A * c2 -
                   model.B / (2.0 * model.A * (model.A + model.n * model.B)) * c1 * c1;
        }
        case ModelKind::AffineMetric:
        case ModelKind::MetricAffine: {
            // Casimir form: (1/2a)C(2) + (1/2b)C(1)^2 + (1/2mu)||V or S||^2.
            const SpinVorticity sv = spin_vorticity(point, metrics);
            const Mat& skew = (model.kind == ModelKind::AffineMetric) ? sv.V : sv.S;
            const Mat sigma_hat = sv.SigmaHat;
            const double c2 = (sigma_hat * sigma_hat).trace();
            const double c1 = sigma_hat.trace();
            const double alpha = model.I + model.A;
            const double skew_sq = -0.5 * (skew * skew).trace();
            return t_tr + 0.5 / alpha * c2 -
                   model.B / (2.0 * alpha * (alpha + model.n * model.B)) * c1 * c1 +
                   model.I / (2.0 * (model.I * model.I - model.A * model.A)) * skew_sq;
        }
    }
    return 0.0;
}

double kinetic_hamiltonian_alt(const InertiaModel& model, const PhasePoint& point,
                               const MetricPair& metrics) {
    check_dim(model, point.phi);
    const double t_tr = translational_hamiltonian(model, point, metrics, /*alt=*/true);
    switch (model.kind) {
        case ModelKind::DAlembert: {
            // Co-moving route through SigmaHat and the inverse Green tensor.
            const Mat sigma_hat = point.P * point.phi;
            const Mat G = point.phi.transpose() * metrics.g * point.phi;
            const Mat jtil = model.J.ldlt().solve(Mat::Identity(model.n, model.n));
            return t_tr +
                   0.5 * (jtil * sigma_hat * G.ldlt().solve(sigma_hat.transpose())).trace();
        }
        case ModelKind::AffineAffine: {
            // Split form: deviator plus dilatational momentum.
            const TraceSplit ts = trace_split(point.P * point.phi);
            const double c2_dev = (ts.sigma * ts.sigma).trace();
            return t_tr + 0.5 / model.A * c2_dev +
                   ts.p * ts.p / (2.0 * model.n * (model.A + model.n * model.B));
        }
        case ModelKind::AffineMetric: {
            // Index form with reciprocal constants Itilde, Atilde, Btilde.
            const Mat sigma_hat = point.P * point.phi;
            const double c2 = (sigma_hat * sigma_hat).trace();
            const double c1 = sigma_hat.trace();
            const double quad =
                (sigma_hat.transpose() * metrics.eta * sigma_hat *
                 metrics.eta.ldlt().solve(Mat::Identity(model.n, model.n)))
                    .trace();
            const double I = model.I, A = model.A;
            const double alpha = I + A;
            return t_tr + I / (2.0 * (I * I - A * A)) * quad + A / (2.0 * (A * A - I * I)) * c2 -
                   model.B / (2.0 * alpha * (alpha + model.n * model.B)) * c1 * c1;
        }
        case ModelKind::MetricAffine: {
            const Mat sigma = point.phi * point.P;
            const double c2 = (sigma * sigma).trace();
            const double c1 = sigma.trace();
            const double quad = (sigma.transpose() * metrics.g * sigma *
                                 metrics.g.ldlt().solve(Mat::Identity(model.n, model.n)))
                                    .trace();
            const double I = model.I, A = model.A;
            const double alpha = I + A;
            return t_tr + I / (2.0 * (I * I - A * A)) * quad + A / (2.0 * (A * A - I * I)) * c2 -
                   model.B / (2.0 * alpha * (alpha + model.n * model.B)) * c1 * c1;
        }
    }
    return 0.0;
}

double kinetic_hamiltonian_two_polar(const InertiaModel& model, const PhasePoint& point) {
    check_dim(model, point.phi);
    const int n = model.n;
    const TwoPolarForm tp = two_polar_decompose(point.phi);
    const TwoPolarMomenta mom = two_polar_momenta(point, tp);
    const Vec& q = tp.q;

    if (model.kind == ModelKind::DAlembert) {
        // Doubly isotropic requirement J = I * Id.
        const double iscal = model.J(0, 0);
        if ((model.J - iscal * Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10 * iscal) {
            throw InvalidModel("two-polar d'Alembert form requires doubly isotropic J");
        }
        double t = 0.5 / model.mass * point.p.squaredNorm();
        for (int a = 0; a < n; ++a) {
            const double P_a = mom.p_a(a) * std::exp(-q(a));
            t += P_a * P_a / (2.0 * iscal);
        }
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                const double Qa = std::exp(q(a)), Qb = std::exp(q(b));
                t += mom.M(a, b) * mom.M(a, b) / (8.0 * iscal * (Qa - Qb) * (Qa - Qb));
                t += mom.N(a, b) * mom.N(a, b) / (8.0 * iscal * (Qa + Qb) * (Qa + Qb));
            }
        }
        return t;
    }

    const double alpha = (model.kind == ModelKind::AffineAffine) ? model.A : model.I + model.A;
    const Vec phat = point.phi.transpose() * point.p;
    double t = 0.5 / model.mass *
               ((model.kind == ModelKind::MetricAffine) ? point.p.squaredNorm()
                                                        : phat.squaredNorm());
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double d = mom.p_a(a) - mom.p_a(b);
            t += d * d / (4.0 * alpha * n);
            if (a == b) continue;
            const double half = 0.5 * (q(a) - q(b));
            const double sh = std::sinh(half), ch = std::cosh(half);
            t += mom.M(a, b) * mom.M(a, b) / (32.0 * alpha * sh * sh);
            t -= mom.N(a, b) * mom.N(a, b) / (32.0 * alpha * ch * ch);
        }
    }
    const double p_tot = mom.p_a.sum();
    t += p_tot * p_tot / (2.0 * n * (alpha + n * model.B));
    if (model.kind == ModelKind::AffineMetric || model.kind == ModelKind::MetricAffine) {
        const Mat& skew = (model.kind == ModelKind::AffineMetric) ? mom.tauHat : mom.rhoHat;
        const double skew_sq = -0.5 * (skew * skew).trace();
        t += model.I / (2.0 * (model.I * model.I - model.A * model.A)) * skew_sq;
    }
    return t;
}

double total_energy(const InertiaModel& model, const Potential& pot, const PhasePoint& point,
                    const MetricPair& metrics) {
    const double t = kinetic_hamiltonian(model, point, metrics);
    if (pot.kind == Potential::Kind::None) return t;
    return t + pot.value(deformation_invariants(point.phi, metrics));
}

// ---------------------------------------------------------------------------
// Legendre transform
// ---------------------------------------------------------------------------

Momenta legendre(const InertiaModel& model, const Mat& phi, const Velocities& vel,
                 const MetricPair& metrics) {
    check_dim(model, phi);
    Momenta out;
    const Mat& g = metrics.g;
    const Mat& eta = metrics.eta;
    switch (model.kind) {
        case ModelKind::DAlembert: {
            out.p = model.mass * g * vel.v;
            out.P = model.J * vel.phidot.transpose() * g;
            break;
        }
        case ModelKind::AffineAffine: {
            const Mat phi_inv = phi.inverse();
            const Mat C = phi_inv.transpose() * eta * phi_inv;
            out.p = model.mass * C * vel.v;
            const Mat omhat = phi_inv * vel.phidot;
            const Mat sigma_hat = model.A * omhat +
                                  model.B * omhat.trace() * Mat::Identity(model.n, model.n);
            out.P = sigma_hat * phi_inv;
            break;
        }
        case ModelKind::AffineMetric: {
            const Mat phi_inv = phi.inverse();
            const Mat C = phi_inv.transpose() * eta * phi_inv;
            out.p = model.mass * C * vel.v;
            const Mat omhat = phi_inv * vel.phidot;
            const Mat sigma_hat = model.I * metric_transpose(omhat, eta) + model.A * omhat +
                                  model.B * omhat.trace() * Mat::Identity(model.n, model.n);
            out.P = sigma_hat * phi_inv;
            break;
        }
        case ModelKind::MetricAffine: {
            out.p = model.mass * g * vel.v;
            const Mat phi_inv = phi.inverse();
            const Mat om = vel.phidot * phi_inv;
            const Mat sigma = model.I * metric_transpose(om, g) + model.A * om +
                              model.B * om.trace() * Mat::Identity(model.n, model.n);
            out.P = phi_inv * sigma;
            break;
        }
    }
    return out;
}

Velocities inverse_legendre(const InertiaModel& model, const PhasePoint& point,
                            const MetricPair& metrics) {
    check_dim(model, point.phi);
    Velocities out;
    const Mat& g = metrics.g;
    const Mat& eta = metrics.eta;
    const Mat id = Mat::Identity(model.n, model.n);
    switch (model.kind) {
        case ModelKind::DAlembert: {
            out.v = g.ldlt().solve(point.p) / model.mass;
            out.phidot = g.ldlt().solve(point.P.transpose()) * model.J.ldlt().solve(id);
            break;
        }
        case ModelKind::AffineAffine: {
            const Mat ctil = point.phi * eta.ldlt().solve(point.phi.transpose());
            out.v = ctil * point.p / model.mass;
            const Mat sigma_hat = point.P * point.phi;
            const double t = sigma_hat.trace() / (model.A + model.n * model.B);
            const Mat omhat = (sigma_hat - model.B * t * id) / model.A;
            out.phidot = point.phi * omhat;
            break;
        }
        case ModelKind::AffineMetric: {
            const Mat ctil = point.phi * eta.ldlt().solve(point.phi.transpose());
            out.v = ctil * point.p / model.mass;
            const Mat sigma_hat = point.P * point.phi;
            Mat s, a;
            metric_split(sigma_hat, eta, s, a);
            const double t = sigma_hat.trace() / (model.I + model.A + model.n * model.B);
            const Mat om_s = (s - model.B * t * id) / (model.I + model.A);
            const Mat om_a = a / (model.A - model.I);
            out.phidot = point.phi * (om_s + om_a);
            break;
        }
        case ModelKind::MetricAffine: {
            out.v = g.ldlt().solve(point.p) / model.mass;
            const Mat sigma = point.phi * point.P;
            Mat s, a;
            metric_split(sigma, g, s, a);
            const double t = sigma.trace() / (model.I + model.A + model.n * model.B);
            const Mat om_s = (s - model.B * t * id) / (model.I + model.A);
            const Mat om_a = a / (model.A - model.I);
            out.phidot = (om_s + om_a) * point.phi;
            break;
        }
    }
    if (!out.phidot.allFinite() || !out.v.allFinite()) {
        throw DegenerateLegendre("inverse_legendre: non-finite velocities");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hamilton equations (analytic gradients)
// ---------------------------------------------------------------------------

namespace {

// Gradient of a doubly isotropic potential with respect to phi, through the
// eigenvalue derivatives of the (G, eta) pencil:
//   dV/dphi(i,A) = sum_a dV/dq_a * (1/lambda_a) * (g phi F_a)_i (F_a)_A
Mat potential_dphi(const Potential& pot, const Mat& phi, const MetricPair& metrics) {
    const int n = static_cast<int>(phi.rows());
    if (pot.kind == Potential::Kind::None) return Mat::Zero(n, n);
    const Mat G = phi.transpose() * metrics.g * phi;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(G, metrics.eta);
    const Vec lambda = es.eigenvalues();
    const Mat F = es.eigenvectors();
    Vec q(n);
    for (int a = 0; a < n; ++a) q(a) = 0.5 * std::log(lambda(a));
    const Vec dv = pot.grad(q);
    Mat out = Mat::Zero(n, n);
    const Mat gphi = metrics.g * phi;
    for (int a = 0; a < n; ++a) {
        out += (dv(a) / lambda(a)) * (gphi * F.col(a)) * F.col(a).transpose();
    }
    return out;
}

}  // namespace

PhaseDerivative hamilton_rhs(const InertiaModel& model, const Potential& pot,
                             const PhasePoint& point, const MetricPair& metrics) {
    check_dim(model, point.phi);
    const int n = model.n;
    const Mat id = Mat::Identity(n, n);
    const Mat& g = metrics.g;
    const Mat& eta = metrics.eta;

    PhaseDerivative out;
    out.pdot = Vec::Zero(n);  // potentials depend on phi only
    Mat dH_dphi = Mat::Zero(n, n);  // indexed like phi (i, A)
    Mat gradP = Mat::Zero(n, n);    // indexed like P (A, i)

    switch (model.kind) {
        case ModelKind::DAlembert: {
            out.xdot = g.ldlt().solve(point.p) / model.mass;
            gradP = model.J.ldlt().solve(point.P) * g.ldlt().solve(id);
            break;
        }
        case ModelKind::AffineAffine:
        case ModelKind::AffineMetric: {
            const Vec phat = point.phi.transpose() * point.p;
            const Vec eta_phat = eta.ldlt().solve(phat);
            out.xdot = point.phi * eta_phat / model.mass;
            dH_dphi += point.p * eta_phat.transpose() / model.mass;
            const Mat sigma_hat = point.P * point.phi;
            const double c1 = sigma_hat.trace();
            Mat what;  // dT/dSigmaHat
            if (model.kind == ModelKind::AffineAffine) {
                what = sigma_hat.transpose() / model.A -
                       (model.B * c1 / (model.A * (model.A + model.n * model.B))) * id;
            } else {
                const double alpha = model.I + model.A;
                const Mat vort = sigma_hat - metric_transpose(sigma_hat, eta);
                what = sigma_hat.transpose() / alpha -
                       (model.B * c1 / (alpha * (alpha + model.n * model.B))) * id -
                       (model.I / (model.I * model.I - model.A * model.A)) * vort.transpose();
            }
            gradP += what * point.phi.transpose();
            dH_dphi += point.P.transpose() * what;
            break;
        }
        case ModelKind::MetricAffine: {
            out.xdot = g.ldlt().solve(point.p) / model.mass;
            const Mat sigma = point.phi * point.P;
            const double c1 = sigma.trace();
            const double alpha = model.I + model.A;
            const Mat spin = sigma - metric_transpose(sigma, g);
            const Mat w = sigma.transpose() / alpha -
                          (model.B * c1 / (alpha * (alpha + model.n * model.B))) * id -
                          (model.I / (model.I * model.I - model.A * model.A)) * spin.transpose();
            gradP += point.phi.transpose() * w;
            dH_dphi += w * point.P.transpose();
            break;
        }
    }

    dH_dphi += potential_dphi(pot, point.phi, metrics);

    out.phidot = gradP.transpose();
    out.Pdot = -dH_dphi.transpose();
    if (!out.phidot.allFinite() || !out.Pdot.allFinite() || !out.xdot.allFinite()) {
        throw NumericalFailure("hamilton_rhs: non-finite gradient");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

namespace {

Vec pack(const PhasePoint& s) {
    const int n = s.dim();
    Vec y(2 * n + 2 * n * n);
    int k = 0;
    for (int i = 0; i < n; ++i) y(k++) = s.x(i);
    for (int i = 0; i < n * n; ++i) y(k++) = s.phi(i / n, i % n);
    for (int i = 0; i < n; ++i) y(k++) = s.p(i);
    for (int i = 0; i < n * n; ++i) y(k++) = s.P(i / n, i % n);
    return y;
}

PhasePoint unpack(const Vec& y, int n) {
    PhasePoint s;
    s.x.resize(n);
    s.p.resize(n);
    s.phi.resize(n, n);
    s.P.resize(n, n);
    int k = 0;
    for (int i = 0; i < n; ++i) s.x(i) = y(k++);
    for (int i = 0; i < n * n; ++i) s.phi(i / n, i % n) = y(k++);
    for (int i = 0; i < n; ++i) s.p(i) = y(k++);
    for (int i = 0; i < n * n; ++i) s.P(i / n, i % n) = y(k++);
    return s;
}

Vec pack_rhs(const InertiaModel& model, const Potential& pot, const Vec& y, int n,
             const MetricPair& metrics) {
    const PhasePoint s = unpack(y, n);
    const PhaseDerivative d = hamilton_rhs(model, pot, s, metrics);
    PhasePoint ds;
    ds.x = d.xdot;
    ds.phi = d.phidot;
    ds.p = d.pdot;
    ds.P = d.Pdot;
    return pack(ds);
}

}  // namespace

Trajectory integrate(const InertiaModel& model, const Potential& pot, const PhasePoint& initial,
                     Scheme scheme, double dt, int steps, const MetricPair& metrics,
                     const IntegrateOptions& options) {
    if (dt <= 0.0) throw ValidationError("integrate: dt must be positive");
    const int n = model.n;
    PhasePoint start = initial;
    if (options.incompressible) {
        const TraceSplit ts = trace_split(start.P * start.phi);
        start.P = ts.sigma * start.phi.inverse();
    }

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(start);

    const double H0 = total_energy(model, pot, start, metrics);
    const SpinVorticity sv0 = spin_vorticity(start, metrics);
    const Mat dev0 = trace_split(sv0.SigmaHat).sigma;
    const double href = std::max(std::abs(H0), 1e-12);

    Vec y = pack(start);
    auto rhs = [&](const Vec& state) { return pack_rhs(model, pot, state, n, metrics); };

    for (int step = 1; step <= steps; ++step) {
        if (scheme == Scheme::RK4) {
            const Vec k1 = rhs(y);
            const Vec k2 = rhs(y + 0.5 * dt * k1);
            const Vec k3 = rhs(y + 0.5 * dt * k2);
            const Vec k4 = rhs(y + dt * k3);
            y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            // Implicit midpoint by fixed-point iteration on the stage value.
            Vec ymid = y + 0.5 * dt * rhs(y);
            for (int it = 0; it < options.midpoint_max_iter; ++it) {
                const Vec ynext = y + 0.5 * dt * rhs(ymid);
                const double delta = (ynext - ymid).cwiseAbs().maxCoeff() /
                                     (1.0 + ymid.cwiseAbs().maxCoeff());
                ymid = ynext;
                if (delta < options.midpoint_tol) break;
            }
            y = 2.0 * ymid - y;
        }

        if (!y.allFinite() || y.cwiseAbs().maxCoeff() > options.divergence_norm) {
            traj.diverged = true;
            break;
        }
        if (step % options.store_every == 0 || step == steps) {
            const PhasePoint s = unpack(y, n);
            traj.times.push_back(step * dt);
            traj.states.push_back(s);
            const double H = total_energy(model, pot, s, metrics);
            traj.audit.energy_drift =
                std::max(traj.audit.energy_drift, std::abs(H - H0) / href);
            const SpinVorticity sv = spin_vorticity(s, metrics);
            traj.audit.spin_drift =
                std::max(traj.audit.spin_drift, (sv.S - sv0.S).norm());
            traj.audit.vorticity_drift =
                std::max(traj.audit.vorticity_drift, (sv.V - sv0.V).norm());
            traj.audit.deviator_drift = std::max(
                traj.audit.deviator_drift, (trace_split(sv.SigmaHat).sigma - dev0).norm());
        }
    }
    return traj;
}

Mat geodesic_exponential(const Mat& phi0, const Mat& OmegaHat0, double t) {
    return phi0 * expm(t * OmegaHat0);
}

Classification classify_2d(double p_alpha, double p_beta) {
    const double prod = p_alpha * p_beta;
    if (prod > 0.0) return Classification::Bounded;
    if (prod < 0.0) return Classification::Unbounded;
    return Classification::Marginal;
}

double shear_potential_classical(double m_const, double n_const, double A, double x) {
    const double sh = std::sinh(0.5 * x);
    const double ch = std::cosh(0.5 * x);
    return m_const * m_const / (16.0 * A * sh * sh) -
           n_const * n_const / (16.0 * A * ch * ch);
}

}  // namespace affine
