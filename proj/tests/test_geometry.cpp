#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "affine/geometry.hpp"

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

Mat random_rotation(int n, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    Mat m(n, n);
    for (int i = 0; i < n * n; ++i) m(i / n, i % n) = nd(rng);
    Eigen::HouseholderQR<Mat> qr(m);
    Mat q = qr.householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return q;
}

MetricPair random_metrics(int n, std::mt19937& rng) {
    const Mat a = random_glp(n, rng), b = random_glp(n, rng);
    return MetricPair(a * a.transpose() + 0.2 * Mat::Identity(n, n),
                      b * b.transpose() + 0.2 * Mat::Identity(n, n));
}

}  // namespace

TEST_CASE("green and cauchy tensors") {
    std::mt19937 rng(1);
    for (int n : {2, 3, 4}) {
        const MetricPair metrics = random_metrics(n, rng);
        const Mat phi = random_glp(n, rng);
        const DeformationTensors t = green_cauchy(phi, metrics);
        CHECK((t.G - t.G.transpose()).norm() < 1e-12);
        CHECK((t.C - t.C.transpose()).norm() < 1e-12);
        CHECK((t.G - phi.transpose() * metrics.g * phi).norm() < 1e-12);
        CHECK((t.E_lag - 0.5 * (t.G - metrics.eta)).norm() < 1e-14);
        CHECK((t.e_eul - 0.5 * (metrics.g - t.C)).norm() < 1e-14);
        // Lagrange and Euler deformation tensors are phi-relatives of each other.
        CHECK((t.E_lag - phi.transpose() * t.e_eul * phi).norm() < 1e-10);
    }
}

TEST_CASE("polar decomposition properties") {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 3;
        const MetricPair metrics = random_metrics(n, rng);
        const Mat phi = random_glp(n, rng);
        const PolarForm pf = polar_decompose(phi, metrics);
        CHECK((pf.U * pf.A - phi).norm() < 1e-10 * (1.0 + phi.norm()));
        // U is an (eta, g)-isometry.
        CHECK((pf.U.transpose() * metrics.g * pf.U - metrics.eta).norm() < 1e-10);
        // A is eta-symmetric with positive eigenvalues.
        CHECK((metrics.eta * pf.A - (metrics.eta * pf.A).transpose()).norm() < 1e-10);
        CHECK(pf.A.eigenvalues().real().minCoeff() > 0.0);
    }
}

TEST_CASE("two-polar decomposition, euclidean chart") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 3;
        const Mat phi = random_glp(n, rng);
        const TwoPolarForm tp = two_polar_decompose(phi);
        CHECK((tp.compose() - phi).norm() < 1e-10 * (1.0 + phi.norm()));
        CHECK((tp.L * tp.L.transpose() - Mat::Identity(n, n)).norm() < 1e-10);
        CHECK((tp.R * tp.R.transpose() - Mat::Identity(n, n)).norm() < 1e-10);
        CHECK(tp.L.determinant() > 0.0);
        CHECK(tp.R.determinant() > 0.0);
        for (int a = 1; a < n; ++a) CHECK(tp.q(a) >= tp.q(a - 1));
    }
}

TEST_CASE("two-polar decomposition, general metrics") {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 2;
        const MetricPair metrics = random_metrics(n, rng);
        const Mat phi = random_glp(n, rng);
        const TwoPolarForm tp = two_polar_decompose(phi, metrics);
        // phi = L diag(e^q) R^-1 in the general chart.
        const Mat recon =
            tp.L * tp.q.array().exp().matrix().asDiagonal() * tp.R.inverse();
        CHECK((recon - phi).norm() < 1e-9 * (1.0 + phi.norm()));
        // L is g-orthonormal, R is eta-orthonormal.
        CHECK((tp.L.transpose() * metrics.g * tp.L - Mat::Identity(n, n)).norm() < 1e-9);
        CHECK((tp.R.transpose() * metrics.eta * tp.R - Mat::Identity(n, n)).norm() < 1e-9);
        // Invariants agree with the direct pencil route.
        CHECK((tp.q - deformation_invariants(phi, metrics)).norm() < 1e-9);
    }
}

TEST_CASE("deformation invariants: eigenvalue identity and isometry invariance") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 3;
        const MetricPair metrics = MetricPair::euclidean(n);
        const Mat phi = random_glp(n, rng);
        const Vec q = deformation_invariants(phi, metrics);

        const Mat ghat = phi.transpose() * phi;
        Eigen::SelfAdjointEigenSolver<Mat> es(ghat);
        for (int a = 0; a < n; ++a) {
            CHECK(std::exp(2.0 * q(a)) == doctest::Approx(es.eigenvalues()(a)).epsilon(1e-10));
        }

        // Invariant under spatial and material rotations.
        const Mat U = random_rotation(n, rng), R = random_rotation(n, rng);
        CHECK((deformation_invariants(U * phi * R, metrics) - q).norm() < 1e-10);
    }
}

TEST_CASE("measure weights") {
    Vec q(3);
    q << -0.4, 0.1, 0.9;
    double haar = 1.0, leb = 1.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            haar *= std::abs(std::sinh(q(i) - q(j)));
            const double Qi = std::exp(q(i)), Qj = std::exp(q(j));
            leb *= std::abs(Qi * Qi - Qj * Qj);
        }
    }
    CHECK(measure_weight(q, MeasureKind::Haar) == doctest::Approx(haar).epsilon(1e-14));
    const Vec Q = q.array().exp().matrix();
    CHECK(measure_weight(Q, MeasureKind::Lebesgue) == doctest::Approx(leb).epsilon(1e-14));
}

TEST_CASE("dilatation split") {
    Vec q(2);
    q << 0.2, 0.8;
    const DilatationSplit ds = dilatation_split(q);
    CHECK(ds.qbar == doctest::Approx(0.5));
    CHECK(ds.x == doctest::Approx(0.6));
    CHECK(ds.relative.sum() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("error taxonomy") {
    const MetricPair metrics = MetricPair::euclidean(2);
    Mat flipped(2, 2);
    flipped << 0, 1, 1, 0;  // det = -1
    CHECK_THROWS_AS(polar_decompose(flipped, metrics), OrientationError);
    CHECK_THROWS_AS(deformation_invariants(flipped, metrics), OrientationError);
    CHECK_THROWS_AS(green_cauchy(Mat::Zero(2, 2), metrics), SingularConfiguration);
    CHECK_THROWS_AS(MetricPair(Mat::Identity(2, 2), -Mat::Identity(2, 2)), Error);
}

TEST_CASE("degeneracy flag") {
    const Mat phi = 1.7 * Mat::Identity(3, 3);  // all invariants coincide
    CHECK(two_polar_decompose(phi).degenerate);
    std::mt19937 rng(6);
    CHECK_FALSE(two_polar_decompose(random_glp(3, rng)).degenerate);
}
