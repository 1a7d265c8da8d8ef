#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "affine/momenta.hpp"

using namespace affine;

namespace {

Mat random_glp(int n, std::mt19937& rng, double spread = 0.6) {
    std::normal_distribution<double> nd(0.0, spread);
    Mat m(n, n);
    do {
        m = Mat::Identity(n, n);
        for (int i = 0; i < n * n; ++i) m(i / n, i % n) += nd(rng);
    } while (m.determinant() <= 0.05);
    return m;
}

PhasePoint random_point(int n, std::mt19937& rng) {
    std::normal_distribution<double> nd(0.0, 0.5);
    PhasePoint pt;
    pt.x = Vec::Zero(n);
    pt.p = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        pt.x(i) = nd(rng);
        pt.p(i) = nd(rng);
    }
    pt.phi = random_glp(n, rng);
    pt.P.resize(n, n);
    for (int i = 0; i < n * n; ++i) pt.P(i / n, i % n) = nd(rng);
    return pt;
}

}  // namespace

TEST_CASE("affine velocity: spatial vs co-moving") {
    std::mt19937 rng(11);
    const Mat phi = random_glp(3, rng), phidot = random_glp(3, rng) - Mat::Identity(3, 3);
    const AffineVelocity av = affine_velocity(phi, phidot);
    CHECK((av.Omega - phidot * phi.inverse()).norm() < 1e-12);
    CHECK((av.OmegaHat - phi.inverse() * phidot).norm() < 1e-12);
    CHECK((av.Omega - phi * av.OmegaHat * phi.inverse()).norm() < 1e-12);
}

TEST_CASE("spin and vorticity structure") {
    std::mt19937 rng(12);
    const MetricPair metrics = MetricPair::euclidean(3);
    for (int trial = 0; trial < 20; ++trial) {
        const PhasePoint pt = random_point(3, rng);
        const SpinVorticity sv = spin_vorticity(pt, metrics);
        CHECK((sv.Sigma - pt.phi * pt.P).norm() < 1e-13);
        CHECK((sv.SigmaHat - pt.P * pt.phi).norm() < 1e-13);
        CHECK((sv.S + sv.S.transpose()).norm() < 1e-12);
        CHECK((sv.V + sv.V.transpose()).norm() < 1e-12);
        CHECK((sv.S - (sv.Sigma - sv.Sigma.transpose())).norm() < 1e-12);
        CHECK((sv.V - (sv.SigmaHat - sv.SigmaHat.transpose())).norm() < 1e-12);
        CHECK(sv.p == doctest::Approx(sv.Sigma.trace()).epsilon(1e-12));
        CHECK(sv.Sigma.trace() == doctest::Approx(sv.SigmaHat.trace()).epsilon(1e-12));
    }
}

TEST_CASE("trace split") {
    std::mt19937 rng(13);
    const Mat Sigma = random_glp(3, rng);
    const TraceSplit ts = trace_split(Sigma);
    CHECK(std::abs(ts.sigma.trace()) < 1e-13);
    CHECK((ts.sigma + (ts.p / 3.0) * Mat::Identity(3, 3) - Sigma).norm() < 1e-13);
}

TEST_CASE("two-polar momenta and casimir identities") {
    std::mt19937 rng(14);
    const MetricPair metrics = MetricPair::euclidean(3);
    for (int trial = 0; trial < 30; ++trial) {
        const PhasePoint pt = random_point(3, rng);
        const TwoPolarForm tp = two_polar_decompose(pt.phi);
        if (tp.degenerate) continue;
        const TwoPolarMomenta mom = two_polar_momenta(pt, tp);
        const SpinVorticity sv = spin_vorticity(pt, metrics);

        CHECK((mom.rhoHat - tp.L.transpose() * sv.S * tp.L).norm() < 1e-11);
        CHECK((mom.tauHat + tp.R.transpose() * sv.V * tp.R).norm() < 1e-11);
        CHECK((mom.M + mom.rhoHat + mom.tauHat).norm() < 1e-12);
        CHECK((mom.N - mom.rhoHat + mom.tauHat).norm() < 1e-12);

        // C(2) lattice identity and its traceless variant.
        const double c2 = casimir(sv.SigmaHat, 2);
        CHECK(casimir2_two_polar(mom, tp.q) == doctest::Approx(c2).epsilon(1e-10));
        const double c2sl = casimir(trace_split(sv.SigmaHat).sigma, 2);
        CHECK(casimir2_sl_two_polar(mom, tp.q) == doctest::Approx(c2sl).epsilon(1e-10));
    }
}

TEST_CASE("poisson brackets: canonical pairs") {
    std::mt19937 rng(15);
    const PhasePoint pt = random_point(2, rng);
    const auto phi01 = [](const PhasePoint& s) { return s.phi(0, 1); };
    const auto P10 = [](const PhasePoint& s) { return s.P(1, 0); };
    const auto P01 = [](const PhasePoint& s) { return s.P(0, 1); };
    CHECK(poisson_bracket(phi01, P10, pt) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(poisson_bracket(phi01, P01, pt) == doctest::Approx(0.0).epsilon(1e-8));
    const auto x0 = [](const PhasePoint& s) { return s.x(0); };
    const auto p0 = [](const PhasePoint& s) { return s.p(0); };
    CHECK(poisson_bracket(x0, p0, pt) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("poisson brackets: affine generators") {
    std::mt19937 rng(16);
    const int n = 2;
    const auto Sig = [](int i, int j) {
        return [i, j](const PhasePoint& s) { return (s.phi * s.P)(i, j); };
    };
    const auto SigHat = [](int a, int b) {
        return [a, b](const PhasePoint& s) { return (s.P * s.phi)(a, b); };
    };
    const auto phat = [](int c) {
        return [c](const PhasePoint& s) { return s.p.dot(s.phi.col(c)); };
    };

    for (int trial = 0; trial < 5; ++trial) {
        const PhasePoint pt = random_point(n, rng);
        const Mat Sv = pt.phi * pt.P, Hv = pt.P * pt.phi;
        const Vec phv = pt.phi.transpose() * pt.p;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < n; ++k) {
                    for (int l = 0; l < n; ++l) {
                        // {Sigma^i_j, Sigma^k_l} = d^i_l Sigma^k_j - d^k_j Sigma^i_l
                        const double b1 = poisson_bracket(Sig(i, j), Sig(k, l), pt);
                        const double e1 = (l == i ? Sv(k, j) : 0.0) - (j == k ? Sv(i, l) : 0.0);
                        CHECK(b1 == doctest::Approx(e1).epsilon(1e-6));
                        // {SigmaHat^A_B, SigmaHat^C_D} = d^C_B SigmaHat^A_D - d^A_D SigmaHat^C_B
                        const double b2 = poisson_bracket(SigHat(i, j), SigHat(k, l), pt);
                        const double e2 = (k == j ? Hv(i, l) : 0.0) - (i == l ? Hv(k, j) : 0.0);
                        CHECK(b2 == doctest::Approx(e2).epsilon(1e-6));
                        // {Sigma, SigmaHat} = 0
                        CHECK(poisson_bracket(Sig(i, j), SigHat(k, l), pt) ==
                              doctest::Approx(0.0).epsilon(1e-6));
                    }
                }
                for (int c = 0; c < n; ++c) {
                    // {phat_C, SigmaHat^A_B} = d^A_C phat_B
                    const double b = poisson_bracket(phat(c), SigHat(i, j), pt);
                    const double e = (i == c) ? phv(j) : 0.0;
                    CHECK(b == doctest::Approx(e).epsilon(1e-6));
                }
            }
        }
    }
}
