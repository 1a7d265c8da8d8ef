#include "affine/reduced1d.hpp"

#include <algorithm>
#include <cmath>

#include "affine/parallel.hpp"

namespace affine {

Mat Tridiag::dense() const {
    const int n = static_cast<int>(diag.size());
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diag(i);
        if (i + 1 < n) {
            m(i, i + 1) = off(i);
            m(i + 1, i) = off(i);
        }
    }
    return m;
}

Tridiag discretize_1d(const ReducedOperator1D& op, int N) {
    if (N < 16) throw ValidationError("discretize_1d: N must be >= 16");
    const double h = (op.b - op.a) / N;
    if (h <= 0.0) throw DomainError("discretize_1d: empty domain");

    Vec w(N), v(N), wface(N + 1);
    for (int i = 0; i < N; ++i) {
        const double x = op.a + (i + 0.5) * h;
        w(i) = op.weight ? op.weight(x) : 1.0;
        v(i) = op.potential ? op.potential(x) : 0.0;
        if (!(w(i) > 0.0)) {
            throw DomainError("discretize_1d: weight not positive inside the domain");
        }
        if (!std::isfinite(v(i))) {
            throw DomainError("discretize_1d: potential not finite inside the domain");
        }
    }
    for (int i = 0; i <= N; ++i) {
        const double x = op.a + i * h;
        wface(i) = op.weight ? op.weight(x) : 1.0;
        if (wface(i) < 0.0) throw DomainError("discretize_1d: negative weight at a cell face");
    }

    const double c = op.kinetic_coeff;
    Tridiag T;
    T.diag.resize(N);
    T.off.resize(N - 1);
    for (int i = 0; i + 1 < N; ++i) {
        T.off(i) = -c * wface(i + 1) / (h * h * std::sqrt(w(i) * w(i + 1)));
    }
    for (int i = 0; i < N; ++i) {
        double d = v(i);
        if (i + 1 < N) d += c * wface(i + 1) / (w(i) * h * h);
        if (i > 0) d += c * wface(i) / (w(i) * h * h);
        T.diag(i) = d;
    }
    // Boundary closure: Dirichlet reflects a ghost cell through the endpoint
    // (factor 2 on the boundary-face flux); Neumann-regular zeroes the flux.
    // A vanishing endpoint weight makes both closures the natural regular one.
    if (op.left == ReducedOperator1D::Boundary::Dirichlet) {
        T.diag(0) += 2.0 * c * wface(0) / (w(0) * h * h);
    }
    if (op.right == ReducedOperator1D::Boundary::Dirichlet) {
        T.diag(N - 1) += 2.0 * c * wface(N) / (w(N - 1) * h * h);
    }
    return T;
}

int sturm_count_below(const Tridiag& T, double x) {
    const int n = static_cast<int>(T.diag.size());
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
        const double off2 = (i > 0) ? T.off(i - 1) * T.off(i - 1) : 0.0;
        d = T.diag(i) - x - ((i > 0) ? off2 / d : 0.0);
        if (d == 0.0) d = 1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

Vec lowest_eigenvalues(const Tridiag& T, int k, double tol) {
    const int n = static_cast<int>(T.diag.size());
    k = std::min(k, n);
    double lo = T.diag(0), hi = T.diag(0);
    for (int i = 0; i < n; ++i) {
        const double r = ((i > 0) ? std::abs(T.off(i - 1)) : 0.0) +
                         ((i + 1 < n) ? std::abs(T.off(i)) : 0.0);
        lo = std::min(lo, T.diag(i) - r);
        hi = std::max(hi, T.diag(i) + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi)) + 1.0;
    Vec out(k);
    for (int r = 0; r < k; ++r) {
        double a = lo, b = hi;
        while (b - a > tol * scale) {
            const double mid = 0.5 * (a + b);
            if (sturm_count_below(T, mid) >= r + 1) {
                b = mid;
            } else {
                a = mid;
            }
        }
        out(r) = 0.5 * (a + b);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2D reduced kinetic operators
// ---------------------------------------------------------------------------

namespace {

// Internal kinetic scale alpha and the mixed-model constant channel shift.
double model_alpha(const InertiaModel& model) {
    switch (model.kind) {
        case ModelKind::AffineAffine:
            return model.A;
        case ModelKind::AffineMetric:
        case ModelKind::MetricAffine:
            return model.I + model.A;
        case ModelKind::DAlembert:
            break;
    }
    throw InvalidModel("reduced 2D channels require an invariant (non-d'Alembert) model");
}

double channel_shift(const InertiaModel& model, int m, int n, double hbar) {
    if (model.kind == ModelKind::MetricAffine) {
        return model.I * hbar * hbar * m * m / (model.I * model.I - model.A * model.A);
    }
    if (model.kind == ModelKind::AffineMetric) {
        return model.I * hbar * hbar * n * n / (model.I * model.I - model.A * model.A);
    }
    return 0.0;
}

}  // namespace

Reduced2DPair reduced_kinetic_2d(const InertiaModel& model, int m, int n, double hbar,
                                 double shear_box, double dil_box) {
    if (model.n != 2) throw InvalidModel("reduced_kinetic_2d: body dimension must be 2");
    const double alpha = model_alpha(model);
    const double shift = channel_shift(model, m, n, hbar);

    Reduced2DPair out;
    out.shear.variable = ReducedOperator1D::Variable::X;
    out.shear.kinetic_coeff = hbar * hbar / alpha;
    out.shear.weight = [](double x) { return std::abs(std::sinh(x)); };
    const double cm = hbar * hbar * (n - m) * (n - m) / (16.0 * alpha);
    const double cn = hbar * hbar * (n + m) * (n + m) / (16.0 * alpha);
    out.shear.potential = [cm, cn, shift](double x) {
        const double sh = std::sinh(0.5 * x), ch = std::cosh(0.5 * x);
        return cm / (sh * sh) - cn / (ch * ch) + shift;
    };
    out.shear.a = 0.0;
    out.shear.b = shear_box;

    out.dil.variable = ReducedOperator1D::Variable::Q;
    out.dil.kinetic_coeff = hbar * hbar / (4.0 * (alpha + 2.0 * model.B));
    out.dil.weight = [](double) { return 1.0; };
    out.dil.potential = [](double) { return 0.0; };
    out.dil.a = -dil_box;
    out.dil.b = dil_box;
    return out;
}

double shear_continuum_edge(const InertiaModel& model, double hbar) {
    return hbar * hbar / (4.0 * model_alpha(model));
}

int bound_state_count(const InertiaModel& model, int m, int n, const BoundStateParams& params) {
    const double edge = shear_continuum_edge(model, params.hbar);
    const double threshold = edge * (1.0 - 1e-6);

    auto solve = [&](int N) {
        const Reduced2DPair pair =
            reduced_kinetic_2d(model, m, n, params.hbar, params.L);
        const Tridiag T = discretize_1d(pair.shear, N);
        const int count = sturm_count_below(T, threshold);
        Vec levels = (count > 0) ? lowest_eigenvalues(T, count) : Vec();
        return std::make_pair(count, levels);
    };

    const auto [count_c, levels_c] = solve(params.N);
    const auto [count_f, levels_f] = solve(2 * params.N);
    if (count_c != count_f) {
        throw Unconverged("bound_state_count: count changed under grid refinement");
    }
    for (int i = 0; i < count_f; ++i) {
        const double drift =
            std::abs(levels_c(i) - levels_f(i)) / std::max(std::abs(levels_f(i)), edge);
        if (drift > params.level_tol) {
            throw Unconverged("bound_state_count: level drifted under grid refinement");
        }
    }
    return count_f;
}

// ---------------------------------------------------------------------------
// Separable 2D d'Alembert solvers
// ---------------------------------------------------------------------------

namespace {

// Solve a radial-type channel at (N, L) and certify against a refined grid
// (2N cells, 1.5L box): free box levels collapse under enlargement and are
// flagged unconverged, genuine confined levels stay put.
Spectrum certified_levels(const ReducedOperator1D& op_template, int N, double L, int levels,
                          const std::vector<double>& label_prefix) {
    ReducedOperator1D coarse = op_template;
    coarse.b = L;
    ReducedOperator1D fine = op_template;
    fine.b = 1.5 * L;

    const Vec e_c = lowest_eigenvalues(discretize_1d(coarse, N), levels);
    const Vec e_f = lowest_eigenvalues(discretize_1d(fine, 2 * N), levels);

    Spectrum out;
    out.grid_n = N;
    out.domain_a = op_template.a;
    out.domain_b = L;
    out.tolerance = 1e-3;
    for (int k = 0; k < e_c.size(); ++k) {
        SpectrumLevel lvl;
        lvl.labels = label_prefix;
        lvl.labels.push_back(k);
        lvl.energy = e_f(k);
        lvl.converged =
            std::abs(e_c(k) - e_f(k)) <= out.tolerance * std::max(std::abs(e_f(k)), 1e-12);
        out.eigenvalues.push_back(e_f(k));
        out.levels.push_back(lvl);
    }
    return out;
}

}  // namespace

std::pair<Spectrum, Spectrum> dalembert_qpm_solver(int m, int n,
                                                   const std::function<double(double)>& Vplus,
                                                   const std::function<double(double)>& Vminus,
                                                   const DAlembertParams& params) {
    const double h2 = params.hbar * params.hbar;
    const double I = params.inertia;

    auto make = [&](bool plus) {
        ReducedOperator1D op;
        op.variable = plus ? ReducedOperator1D::Variable::Qplus
                           : ReducedOperator1D::Variable::Qminus;
        op.kinetic_coeff = 0.5 * h2 / I;
        op.weight = [](double q) { return q; };
        const double lam = plus ? (m - n) * (m - n) : (m + n) * (m + n);
        const auto& V = plus ? Vplus : Vminus;
        op.potential = [lam, h2, I, &V](double q) {
            return h2 * lam / (8.0 * I * q * q) + (V ? V(q) : 0.0);
        };
        op.a = 0.0;
        op.b = params.L;
        return op;
    };

    Spectrum sp = certified_levels(make(true), params.N, params.L, params.levels,
                                   {double(m), double(n), +1.0});
    Spectrum sm = certified_levels(make(false), params.N, params.L, params.levels,
                                   {double(m), double(n), -1.0});
    return {sp, sm};
}

Spectrum dalembert_polar_solver(int m, int n, const std::function<double(double)>& Vr,
                                const std::function<double(double)>& Vphi,
                                const DAlembertParams& params) {
    const double h2 = params.hbar * params.hbar;
    const double I = params.inertia;
    const double pi = 3.14159265358979323846;

    // Angular problem on (0, pi/2), weight sin(2 phi).
    ReducedOperator1D ang;
    ang.variable = ReducedOperator1D::Variable::PhiAngle;
    ang.kinetic_coeff = 0.5 * h2 / I;
    ang.weight = [](double phi) { return std::sin(2.0 * phi); };
    ang.potential = [m, n, h2, I, &Vphi](double phi) {
        const double s = std::sin(2.0 * phi);
        const double centrifugal =
            0.5 * h2 / I * (m * m + 2.0 * m * n * std::cos(2.0 * phi) + n * n) / (s * s);
        return centrifugal + (Vphi ? Vphi(phi) : 0.0);
    };
    ang.a = 0.0;
    ang.b = 0.5 * pi;

    const Vec ephi_c = lowest_eigenvalues(discretize_1d(ang, params.N), params.levels);
    const Vec ephi_f = lowest_eigenvalues(discretize_1d(ang, 2 * params.N), params.levels);

    Spectrum out;
    out.grid_n = params.N;
    out.domain_a = 0.0;
    out.domain_b = params.L;
    out.tolerance = 1e-3;

    for (int k = 0; k < ephi_f.size(); ++k) {
        const bool ang_ok = std::abs(ephi_c(k) - ephi_f(k)) <=
                            out.tolerance * std::max(std::abs(ephi_f(k)), 1e-12);
        const double ephi = ephi_f(k);

        ReducedOperator1D rad;
        rad.variable = ReducedOperator1D::Variable::R;
        rad.kinetic_coeff = 0.5 * h2 / I;
        rad.weight = [](double r) { return r * r * r; };
        rad.potential = [ephi, &Vr](double r) {
            return (Vr ? Vr(r) : 0.0) + ephi / (r * r);
        };
        rad.a = 0.0;
        rad.b = params.L;

        Spectrum radial = certified_levels(rad, params.N, params.L, params.levels,
                                           {double(m), double(n), double(k)});
        for (auto& lvl : radial.levels) {
            lvl.converged = lvl.converged && ang_ok;
            out.levels.push_back(lvl);
        }
    }
    std::sort(out.levels.begin(), out.levels.end(),
              [](const SpectrumLevel& a, const SpectrumLevel& b) { return a.energy < b.energy; });
    for (const auto& lvl : out.levels) out.eigenvalues.push_back(lvl.energy);
    return out;
}

}  // namespace affine
