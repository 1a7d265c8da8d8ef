#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "affine/dynamics.hpp"

using namespace affine;

namespace {

Mat random_glp(int n, std::mt19937& rng, double spread = 0.5) {
    std::normal_distribution<double> nd(0.0, spread);
    Mat m(n, n);
    do {
        m = Mat::Identity(n, n);
        for (int i = 0; i < n * n; ++i) m(i / n, i % n) += nd(rng);
    } while (m.determinant() <= 0.05);
    return m;
}

PhasePoint random_point(int n, std::mt19937& rng, double spread = 0.4) {
    std::normal_distribution<double> nd(0.0, spread);
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

std::vector<InertiaModel> all_models(int n) {
    return {InertiaModel::dalembert(1.3, 1.7 * Mat::Identity(n, n)),
            InertiaModel::affine_affine(n, 1.0, 1.2, 0.5),
            InertiaModel::affine_metric(n, 1.1, 2.0, 0.6, 0.3),
            InertiaModel::metric_affine(n, 0.9, 1.8, -0.4, 0.2)};
}

}  // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(InertiaModel::affine_affine(2, 1.0, 0.0, 1.0), InvalidModel);   // A = 0
    CHECK_THROWS_AS(InertiaModel::affine_affine(2, 1.0, 1.0, -0.5), InvalidModel);  // A + nB = 0
    CHECK_THROWS_AS(InertiaModel::affine_metric(2, 1.0, 1.0, 1.0, 0.3), InvalidModel);  // I = A
    CHECK_THROWS_AS(InertiaModel::dalembert(1.0, -Mat::Identity(2, 2)), InvalidModel);

    CHECK(InertiaModel::dalembert(1.0, Mat::Identity(2, 2)).positive_definite);
    CHECK_FALSE(InertiaModel::affine_affine(2, 1.0, 1.0, 0.0).positive_definite);
    CHECK(InertiaModel::affine_metric(2, 1.0, 2.0, 0.5, 0.1).positive_definite);
    CHECK_FALSE(InertiaModel::affine_metric(2, 1.0, 1.0, 2.0, 0.1).positive_definite);
}

TEST_CASE("kinetic energy cross-formulas") {
    std::mt19937 rng(21);
    for (int n : {2, 3}) {
        const MetricPair metrics = MetricPair::euclidean(n);
        for (const auto& model : all_models(n)) {
            for (int trial = 0; trial < 20; ++trial) {
                Velocities vel;
                vel.v = Vec::Zero(n);
                std::normal_distribution<double> nd(0.0, 0.5);
                for (int i = 0; i < n; ++i) vel.v(i) = nd(rng);
                vel.phidot = random_glp(n, rng) - Mat::Identity(n, n);
                const Mat phi = random_glp(n, rng);
                const double t1 = kinetic_energy(model, phi, vel, metrics);
                const double t2 = kinetic_energy_alt(model, phi, vel, metrics);
                CHECK(t1 == doctest::Approx(t2).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("legendre transform roundtrip and energy match") {
    std::mt19937 rng(22);
    for (int n : {2, 3}) {
        const MetricPair metrics = MetricPair::euclidean(n);
        for (const auto& model : all_models(n)) {
            for (int trial = 0; trial < 10; ++trial) {
                const PhasePoint pt = random_point(n, rng);
                const Velocities vel = inverse_legendre(model, pt, metrics);
                const Momenta mom = legendre(model, pt.phi, vel, metrics);
                CHECK((mom.P - pt.P).norm() < 1e-10 * (1.0 + pt.P.norm()));
                CHECK((mom.p - pt.p).norm() < 1e-10 * (1.0 + pt.p.norm()));
                // T(v) == H_kin(p) through the transform.
                const double tv = kinetic_energy(model, pt.phi, vel, metrics);
                const double hp = kinetic_hamiltonian(model, pt, metrics);
                CHECK(tv == doctest::Approx(hp).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("kinetic hamiltonian cross-formulas incl. two-polar lattice") {
    std::mt19937 rng(23);
    for (int n : {2, 3}) {
        const MetricPair metrics = MetricPair::euclidean(n);
        for (const auto& model : all_models(n)) {
            for (int trial = 0; trial < 10; ++trial) {
                const PhasePoint pt = random_point(n, rng);
                const double h1 = kinetic_hamiltonian(model, pt, metrics);
                const double h2 = kinetic_hamiltonian_alt(model, pt, metrics);
                const double h3 = kinetic_hamiltonian_two_polar(model, pt);
                CHECK(h1 == doctest::Approx(h2).epsilon(1e-10));
                CHECK(h1 == doctest::Approx(h3).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("potential values and gradients") {
    std::mt19937 rng(24);
    Vec q(3);
    q << -0.3, 0.2, 0.7;
    Mat k(3, 3);
    k << 0, 1.5, 0.5, 1.5, 0, 2.0, 0.5, 2.0, 0;

    for (const Potential& pot :
         {Potential::dilatation_harmonic(2.0), Potential::binary_shear(k),
          Potential::qpm_family(0.3, 0.7, 0.5)}) {
        const Vec g = pot.grad(q);
        for (int a = 0; a < 3; ++a) {
            const double h = 1e-6;
            Vec qp = q, qm = q;
            qp(a) += h;
            qm(a) -= h;
            const double fd = (pot.value(qp) - pot.value(qm)) / (2.0 * h);
            CHECK(g(a) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    CHECK(Potential::none().value(q) == 0.0);
    CHECK(Potential::dilatation_harmonic(2.0).depends_only_on_qbar());
    CHECK_FALSE(Potential::binary_shear(k).depends_only_on_qbar());
}

TEST_CASE("hamilton rhs matches finite-difference gradients") {
    std::mt19937 rng(25);
    const int n = 2;
    const MetricPair metrics = MetricPair::euclidean(n);
    const Potential pot = Potential::dilatation_harmonic(1.5);
    for (const auto& model : all_models(n)) {
        const PhasePoint pt = random_point(n, rng);
        const PhaseDerivative rhs = hamilton_rhs(model, pot, pt, metrics);
        const auto H = [&](const PhasePoint& s) {
            return total_energy(model, pot, s, metrics);
        };
        const PhaseGradient g = phase_gradient(H, pt);
        CHECK((rhs.xdot - g.dp).norm() < 1e-6);
        CHECK((rhs.pdot + g.dx).norm() < 1e-6);
        CHECK((rhs.phidot - g.dP.transpose()).norm() < 2e-6);
        CHECK((rhs.Pdot + g.dphi.transpose()).norm() < 2e-6);
    }
}

TEST_CASE("implicit midpoint conserves the geodetic invariants") {
    std::mt19937 rng(26);
    const MetricPair metrics = MetricPair::euclidean(2);
    const auto model = InertiaModel::affine_affine(2, 1.0, 1.0, 0.3);
    // Rest frame: with p != 0 the invariant translational metric couples to
    // phi and the spin / dilatational momentum are genuinely not conserved.
    PhasePoint pt = random_point(2, rng);
    pt.p.setZero();
    const Trajectory traj = integrate(model, Potential::none(), pt, Scheme::ImplicitMidpoint,
                                      1e-3, 2000, metrics);
    CHECK_FALSE(traj.diverged);
    CHECK(traj.audit.energy_drift < 1e-10);
    CHECK(traj.audit.spin_drift < 1e-10);
    CHECK(traj.audit.vorticity_drift < 1e-10);
    CHECK(traj.audit.deviator_drift < 1e-10);
}

TEST_CASE("rk4 and midpoint agree at small dt") {
    std::mt19937 rng(27);
    const MetricPair metrics = MetricPair::euclidean(2);
    const auto model = InertiaModel::metric_affine(2, 1.0, 2.0, 0.5, 0.2);
    const Potential pot = Potential::dilatation_harmonic(1.0);
    const PhasePoint pt = random_point(2, rng);
    const Trajectory a = integrate(model, pot, pt, Scheme::RK4, 5e-4, 1000, metrics);
    const Trajectory b = integrate(model, pot, pt, Scheme::ImplicitMidpoint, 5e-4, 1000, metrics);
    CHECK((a.states.back().phi - b.states.back().phi).norm() < 1e-6);
    CHECK((a.states.back().P - b.states.back().P).norm() < 1e-6);
}

TEST_CASE("geodesic exponential map") {
    std::mt19937 rng(28);
    const MetricPair metrics = MetricPair::euclidean(2);
    const auto model = InertiaModel::affine_affine(2, 1.0, 1.4, 0.0);
    PhasePoint pt = random_point(2, rng);
    pt.p.setZero();  // internal geodesics live in the rest frame
    const Velocities vel = inverse_legendre(model, pt, metrics);
    const Mat omega0 = affine_velocity(pt.phi, vel.phidot).OmegaHat;
    const Trajectory traj = integrate(model, Potential::none(), pt, Scheme::ImplicitMidpoint,
                                      5e-4, 2000, metrics, {10});
    for (size_t i = 0; i < traj.states.size(); ++i) {
        const Mat exact = geodesic_exponential(pt.phi, omega0, traj.times[i]);
        CHECK((exact - traj.states[i].phi).norm() < 1e-6);
    }
}

TEST_CASE("incompressible projection") {
    std::mt19937 rng(29);
    const MetricPair metrics = MetricPair::euclidean(2);
    const auto model = InertiaModel::affine_affine(2, 1.0, 1.0, 0.2);
    PhasePoint pt = random_point(2, rng);
    pt.p.setZero();  // Tr(SigmaHat) is only conserved in the rest frame
    IntegrateOptions opt;
    opt.incompressible = true;
    const Trajectory traj =
        integrate(model, Potential::none(), pt, Scheme::ImplicitMidpoint, 1e-3, 500, metrics, opt);
    for (const auto& s : traj.states) {
        CHECK(std::abs((s.P * s.phi).trace()) < 1e-9);
    }
}

TEST_CASE("2d boundedness classifier") {
    CHECK(classify_2d(1.0, 2.0) == Classification::Bounded);
    CHECK(classify_2d(-1.5, -0.5) == Classification::Bounded);
    CHECK(classify_2d(-1.0, 2.0) == Classification::Unbounded);
    CHECK(classify_2d(1.0, -2.0) == Classification::Unbounded);
    CHECK(classify_2d(0.0, 1.0) == Classification::Marginal);
    CHECK(classify_2d(1.0, 0.0) == Classification::Marginal);
}

TEST_CASE("classical shear potential shape") {
    const double A = 1.0;
    // |n| > |m|: well with a negative minimum.
    CHECK(shear_potential_classical(0.0, 2.0, A, 1.0) < 0.0);
    // |m| > |n|: repulsive everywhere.
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        CHECK(shear_potential_classical(3.0, 1.0, A, x) > 0.0);
    }
    // x -> infinity asymptote is zero.
    CHECK(std::abs(shear_potential_classical(2.0, 3.0, A, 40.0)) < 1e-12);
}
