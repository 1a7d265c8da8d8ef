#include "affine/momenta.hpp"

#include <cmath>

namespace affine {

AffineVelocity affine_velocity(const Mat& phi, const Mat& phidot) {
    if (std::abs(phi.determinant()) < 1e-300) {
        throw SingularConfiguration("affine_velocity: phi is singular");
    }
    AffineVelocity out;
    Eigen::PartialPivLU<Mat> lu(phi);
    out.OmegaHat = lu.solve(phidot);
    out.Omega = phidot * lu.inverse();
    return out;
}

SpinVorticity spin_vorticity(const PhasePoint& point, const MetricPair& metrics) {
    if (std::abs(point.phi.determinant()) < 1e-300) {
        throw SingularConfiguration("spin_vorticity: phi is singular");
    }
    SpinVorticity out;
    out.Sigma = point.phi * point.P;
    out.SigmaHat = point.P * point.phi;
    out.S = out.Sigma - metric_transpose(out.Sigma, metrics.g);
    out.V = out.SigmaHat - metric_transpose(out.SigmaHat, metrics.eta);
    out.p = out.Sigma.trace();
    return out;
}

TraceSplit trace_split(const Mat& Sigma) {
    TraceSplit out;
    out.p = Sigma.trace();
    out.sigma = Sigma - (out.p / static_cast<double>(Sigma.rows())) *
                            Mat::Identity(Sigma.rows(), Sigma.cols());
    return out;
}

TwoPolarMomenta two_polar_momenta(const PhasePoint& point, const TwoPolarForm& tp) {
    const MetricPair metrics = MetricPair::euclidean(point.dim());
    const SpinVorticity sv = spin_vorticity(point, metrics);
    TwoPolarMomenta out;
    out.rhoHat = tp.L.transpose() * sv.S * tp.L;
    out.tauHat = -tp.R.transpose() * sv.V * tp.R;
    out.p_a = (tp.R.transpose() * sv.SigmaHat * tp.R).diagonal();
    out.M = -out.rhoHat - out.tauHat;
    out.N = out.rhoHat - out.tauHat;
    out.degenerate = tp.degenerate;
    return out;
}

double casimir(const Mat& SigmaHat, int k) {
    if (k < 1) throw InvalidLabel("casimir: order k must be >= 1");
    Mat acc = SigmaHat;
    for (int i = 1; i < k; ++i) acc = acc * SigmaHat;
    return acc.trace();
}

namespace {

// Shared M/N lattice sum of (a70)/(a72): ordered pairs a != b.
double lattice_sum(const TwoPolarMomenta& mom, const Vec& q) {
    const int n = static_cast<int>(q.size());
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const double d = 0.5 * (q(a) - q(b));
            const double sh = std::sinh(d);
            const double ch = std::cosh(d);
            acc += mom.M(a, b) * mom.M(a, b) / (16.0 * sh * sh);
            acc -= mom.N(a, b) * mom.N(a, b) / (16.0 * ch * ch);
        }
    }
    return acc;
}

}  // namespace

double casimir2_two_polar(const TwoPolarMomenta& mom, const Vec& q) {
    return mom.p_a.squaredNorm() + lattice_sum(mom, q);
}

double casimir2_sl_two_polar(const TwoPolarMomenta& mom, const Vec& q) {
    const int n = static_cast<int>(q.size());
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double d = mom.p_a(a) - mom.p_a(b);
            acc += d * d;
        }
    }
    return acc / (2.0 * n) + lattice_sum(mom, q);
}

namespace {

double eval_shifted(const PhaseFunction& f, PhasePoint point, int block, int index, double delta) {
    switch (block) {
        case 0: point.x(index) += delta; break;
        case 1: point.phi(index / point.dim(), index % point.dim()) += delta; break;
        case 2: point.p(index) += delta; break;
        default: point.P(index / point.dim(), index % point.dim()) += delta; break;
    }
    return f(point);
}

double coordinate(const PhasePoint& point, int block, int index) {
    switch (block) {
        case 0: return point.x(index);
        case 1: return point.phi(index / point.dim(), index % point.dim());
        case 2: return point.p(index);
        default: return point.P(index / point.dim(), index % point.dim());
    }
}

double central_diff(const PhaseFunction& f, const PhasePoint& point, int block, int index,
                    double step_scale) {
    const double h = step_scale * (1.0 + std::abs(coordinate(point, block, index)));
    const double fp = eval_shifted(f, point, block, index, h);
    const double fm = eval_shifted(f, point, block, index, -h);
    const double d = (fp - fm) / (2.0 * h);
    if (!std::isfinite(d)) throw NumericalFailure("poisson_bracket: non-finite derivative");
    return d;
}

}  // namespace

PhaseGradient phase_gradient(const PhaseFunction& f, const PhasePoint& point, double step_scale) {
    const int n = point.dim();
    PhaseGradient g;
    g.dx.resize(n);
    g.dp.resize(n);
    g.dphi.resize(n, n);
    g.dP.resize(n, n);
    for (int i = 0; i < n; ++i) {
        g.dx(i) = central_diff(f, point, 0, i, step_scale);
        g.dp(i) = central_diff(f, point, 2, i, step_scale);
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            g.dphi(r, c) = central_diff(f, point, 1, r * n + c, step_scale);
            g.dP(r, c) = central_diff(f, point, 3, r * n + c, step_scale);
        }
    }
    return g;
}

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& point,
                       double step_scale) {
    const PhaseGradient gf = phase_gradient(f, point, step_scale);
    const PhaseGradient gg = phase_gradient(g, point, step_scale);
    double acc = gf.dx.dot(gg.dp) - gf.dp.dot(gg.dx);
    // phi(i, A) is conjugate to P(A, i): sum over the matched index pairs.
    const int n = point.dim();
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n; ++a) {
            acc += gf.dphi(i, a) * gg.dP(a, i) - gf.dP(a, i) * gg.dphi(i, a);
        }
    }
    return acc;
}

}  // namespace affine
