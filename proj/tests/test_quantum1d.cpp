#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "affine/reduced1d.hpp"

using namespace affine;

namespace {

constexpr double kPi = 3.14159265358979323846;

ReducedOperator1D box_operator(double L) {
    ReducedOperator1D op;
    op.kinetic_coeff = 0.5;
    op.weight = [](double) { return 1.0; };
    op.potential = [](double) { return 0.0; };
    op.a = 0.0;
    op.b = L;
    return op;
}

}  // namespace

TEST_CASE("particle in a box oracle") {
    const double L = 1.0;
    const Tridiag T = discretize_1d(box_operator(L), 4000);
    const Vec e = lowest_eigenvalues(T, 5);
    for (int k = 1; k <= 5; ++k) {
        const double exact = 0.5 * kPi * kPi * k * k / (L * L);
        CHECK(e(k - 1) == doctest::Approx(exact).epsilon(1e-5));
    }
}

TEST_CASE("harmonic oscillator oracle") {
    ReducedOperator1D op;
    op.kinetic_coeff = 0.5;
    op.weight = [](double) { return 1.0; };
    op.potential = [](double x) { return 0.5 * x * x; };
    op.a = -12.0;
    op.b = 12.0;
    const Tridiag T = discretize_1d(op, 4000);
    const Vec e = lowest_eigenvalues(T, 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(e(k) == doctest::Approx(k + 0.5).epsilon(1e-5));
    }
}

TEST_CASE("inverse-square plus harmonic radial oracle") {
    // -(1/2)(f'' + f'/q) + (a/q^2 + q^2/2) f = E f, weight q:
    // E_k = 2k + 1 + nu with nu = sqrt(2a).
    for (double a : {0.5, 2.0}) {
        ReducedOperator1D op;
        op.variable = ReducedOperator1D::Variable::R;
        op.kinetic_coeff = 0.5;
        op.weight = [](double q) { return q; };
        op.potential = [a](double q) { return a / (q * q) + 0.5 * q * q; };
        op.a = 0.0;
        op.b = 25.0;
        const Tridiag T = discretize_1d(op, 6000);
        const Vec e = lowest_eigenvalues(T, 4);
        const double nu = std::sqrt(2.0 * a);
        for (int k = 0; k < 4; ++k) {
            CHECK(e(k) == doctest::Approx(2.0 * k + 1.0 + nu).epsilon(1e-4));
        }
    }
}

TEST_CASE("sturm count is consistent with the eigenvalues") {
    const Tridiag T = discretize_1d(box_operator(1.0), 500);
    const Vec e = lowest_eigenvalues(T, 6);
    // Probe at gap midpoints: the bisection resolves eigenvalues relative to
    // the full Gershgorin range, so fixed tiny offsets are not meaningful.
    CHECK(sturm_count_below(T, e(0) - 0.5 * (e(1) - e(0))) == 0);
    for (int k = 0; k + 1 < 6; ++k) {
        CHECK(sturm_count_below(T, 0.5 * (e(k) + e(k + 1))) == k + 1);
    }
}

TEST_CASE("discretization rejects bad input") {
    CHECK_THROWS_AS(discretize_1d(box_operator(1.0), 8), ValidationError);
    ReducedOperator1D bad = box_operator(1.0);
    bad.weight = [](double x) { return x - 0.5; };  // negative inside the domain
    CHECK_THROWS_AS(discretize_1d(bad, 64), DomainError);
}

TEST_CASE("reduced 2d channel coefficients") {
    const auto aa = InertiaModel::affine_affine(2, 1.0, 1.5, 0.25);
    const Reduced2DPair pair = reduced_kinetic_2d(aa, 1, 3);
    // Shear channel: c = hbar^2/A, weight |sinh x|, V from the (n-m, n+m) pair.
    CHECK(pair.shear.kinetic_coeff == doctest::Approx(1.0 / 1.5));
    CHECK(pair.shear.weight(2.0) == doctest::Approx(std::sinh(2.0)));
    const double x = 1.3;
    const double expected = 4.0 / (16.0 * 1.5 * std::pow(std::sinh(x / 2), 2)) -
                            16.0 / (16.0 * 1.5 * std::pow(std::cosh(x / 2), 2));
    CHECK(pair.shear.potential(x) == doctest::Approx(expected).epsilon(1e-12));
    // Dilatation channel: c = hbar^2 / (4 (A + 2B)).
    CHECK(pair.dil.kinetic_coeff == doctest::Approx(1.0 / (4.0 * (1.5 + 0.5))));

    // Mixed models shift alpha to I+A and add a constant.
    const auto ma = InertiaModel::metric_affine(2, 1.0, 2.0, 0.5, 0.25);
    const Reduced2DPair mp = reduced_kinetic_2d(ma, 1, 3);
    CHECK(mp.shear.kinetic_coeff == doctest::Approx(1.0 / 2.5));
    const double shift = 2.0 * 1.0 / (4.0 - 0.25);  // I hbar^2 m^2 / (I^2 - A^2)
    CHECK(mp.shear.potential(40.0) == doctest::Approx(shift).epsilon(1e-6));

    CHECK_THROWS_AS(
        reduced_kinetic_2d(InertiaModel::dalembert(1.0, Mat::Identity(2, 2)), 1, 1),
        InvalidModel);
}

TEST_CASE("continuum edge") {
    const auto aa = InertiaModel::affine_affine(2, 1.0, 2.0, 0.0);
    CHECK(shear_continuum_edge(aa) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("bound state counts match the exact solvable channel") {
    const auto aa = InertiaModel::affine_affine(2, 1.0, 1.0, 0.0);
    BoundStateParams params;
    params.N = 3000;  // coarse is fine away from the marginal channels
    // Exact count: levels at k with d - 2k > 0, d = (|n+m| - |n-m| - 2)/2.
    CHECK(bound_state_count(aa, 2, 2, params) == 1);   // d = 1
    CHECK(bound_state_count(aa, 3, 3, params) == 1);   // d = 2
    CHECK(bound_state_count(aa, 4, 4, params) == 2);   // d = 3
    // |n - m| = 1 needs the default (finer) grid to certify convergence.
    CHECK(bound_state_count(aa, -3, -4, BoundStateParams{}) == 1);
    // mn <= 0: no bound states.
    CHECK(bound_state_count(aa, 2, -2, params) == 0);
    CHECK(bound_state_count(aa, 0, 3, params) == 0);
    CHECK(bound_state_count(aa, 0, 0, params) == 0);
}

TEST_CASE("qpm channels: exact harmonic-family oracle") {
    // V_+- = c Q^2 with centrifugal hbar^2 (m -+ n)^2 / (8 I Q^2):
    // E_k = hbar Omega (2k + 1 + nu), Omega = sqrt(2c/I),
    // nu = sqrt((m -+ n)^2 / 4 + 2 I a / hbar^2) with a the 1/Q^2 strength.
    DAlembertParams params;
    params.N = 4000;
    params.L = 25.0;
    params.levels = 4;
    const int m = 1, n = 2;
    const double c = 0.5;
    const auto [sp, sm] = dalembert_qpm_solver(
        m, n, [c](double q) { return c * q * q; }, [c](double q) { return c * q * q; }, params);
    const double omega = std::sqrt(2.0 * c);
    for (int branch = 0; branch < 2; ++branch) {
        const Spectrum& s = branch == 0 ? sp : sm;
        const int diff = branch == 0 ? (m - n) : (m + n);
        const double nu = std::abs(diff) / 2.0;
        for (int k = 0; k < 4; ++k) {
            CHECK(s.levels[k].converged);
            CHECK(s.levels[k].energy ==
                  doctest::Approx(omega * (2.0 * k + 1.0 + nu)).epsilon(1e-3));
        }
    }
}

TEST_CASE("polar and qpm charts agree on the separable family") {
    DAlembertParams params;
    params.N = 3000;
    params.L = 20.0;
    params.levels = 4;
    const int m = 1, n = 2;
    const double a = 0.3, b = 0.7, c = 0.5;

    // The charts are related by (Q+, Q-) = (r cos phi, r sin phi); a separable
    // potential a/Q+^2 + b/Q-^2 + c r^2 maps to V_phi = a/cos^2 + b/sin^2 and
    // V_r = c r^2, and total 2D energies are pairwise sums of the 1D branches.
    const auto [sp, sm] = dalembert_qpm_solver(
        m, n, [&](double q) { return a / (q * q) + c * q * q; },
        [&](double q) { return b / (q * q) + c * q * q; }, params);
    const Spectrum pol = dalembert_polar_solver(
        m, n, [&](double r) { return c * r * r; },
        [&](double phi) {
            const double cs = std::cos(phi), sn = std::sin(phi);
            return a / (cs * cs) + b / (sn * sn);
        },
        params);

    std::vector<double> qpm;
    for (const auto& lp : sp.levels) {
        for (const auto& lm : sm.levels) {
            if (lp.converged && lm.converged) qpm.push_back(lp.energy + lm.energy);
        }
    }
    std::sort(qpm.begin(), qpm.end());
    std::vector<double> polar;
    for (const auto& lvl : pol.levels) {
        if (lvl.converged) polar.push_back(lvl.energy);
    }
    std::sort(polar.begin(), polar.end());
    REQUIRE(qpm.size() >= 5);
    REQUIRE(polar.size() >= 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(polar[k] == doctest::Approx(qpm[k]).epsilon(1e-3));
    }
}

TEST_CASE("eigenvector orthogonality") {
    // Dense route for a small operator: eigenvectors of the symmetric
    // tridiagonal are pairwise orthogonal.
    const Tridiag T = discretize_1d(box_operator(1.0), 200);
    Eigen::SelfAdjointEigenSolver<Mat> es(T.dense());
    const Mat v = es.eigenvectors().leftCols(8);
    CHECK((v.transpose() * v - Mat::Identity(8, 8)).norm() < 1e-8);
}
