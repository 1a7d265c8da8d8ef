#pragma once

#include <optional>
#include <vector>

#include "affine/momenta.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Kinetic-energy / Hamiltonian models, Legendre transforms, Hamiltonian
// integration, exponential geodesics, conservation audits, and the 2D
// boundedness classifier.
// ---------------------------------------------------------------------------

enum class ModelKind { DAlembert, AffineAffine, AffineMetric, MetricAffine };

struct InertiaModel {
    ModelKind kind;
    int n = 0;          // body dimension
    double mass = 1.0;  // translational mass
    Mat J;              // d'Alembert internal inertia (n x n SPD)
    double I = 0.0, A = 0.0, B = 0.0;

    // Informational: whether the internal metric of an invariant model is
    // positive definite (I+A > 0, I-A > 0, (I+A)/n + B > 0); the d'Alembert
    // model is always positive definite. Integration proceeds regardless.
    bool positive_definite = false;

    static InertiaModel dalembert(double mass, Mat J);
    static InertiaModel affine_affine(int n, double mass, double A, double B);
    static InertiaModel affine_metric(int n, double mass, double I, double A, double B);
    static InertiaModel metric_affine(int n, double mass, double I, double A, double B);
};

// Doubly isotropic potentials: value depends on the configuration only
// through the deformation invariants q.
struct Potential {
    enum class Kind { None, DilatationHarmonic, BinaryShear, TwoDimPreset, QpmFamily, PolarTrig };

    Kind kind = Kind::None;
    double kappa = 0.0;  // DilatationHarmonic / TwoDimPreset / PolarTrig strength
    Mat shear_k;         // BinaryShear spring table k_ij (symmetric, zero diagonal)
    double qa = 0.0, qb = 0.0, qc = 0.0;  // QpmFamily coefficients (a, b, c)

    static Potential none();
    static Potential dilatation_harmonic(double kappa);
    static Potential binary_shear(Mat k_table);
    static Potential two_dim_preset(double kappa);
    static Potential qpm_family(double a, double b, double c);

    double value(const Vec& q) const;
    Vec grad(const Vec& q) const;
    bool depends_only_on_qbar() const { return kind == Kind::None || kind == Kind::DilatationHarmonic; }
};

struct Velocities {
    Vec v;       // translational velocity
    Mat phidot;  // internal velocity, indexed like phi
};

// --- Kinetic energies (velocity form). Each model has two independent paper
// formulas; `kinetic_energy` is the primary, `kinetic_energy_alt` the
// cross-check route.
double kinetic_energy(const InertiaModel& model, const Mat& phi, const Velocities& vel,
                      const MetricPair& metrics);
double kinetic_energy_alt(const InertiaModel& model, const Mat& phi, const Velocities& vel,
                          const MetricPair& metrics);

// --- Kinetic Hamiltonians (momentum form). Primary uses the Casimir form for
// the invariant models; `_alt` the index form; `_two_polar` the lattice form
// in two-polar variables (Euclidean chart).
double kinetic_hamiltonian(const InertiaModel& model, const PhasePoint& point,
                           const MetricPair& metrics);
double kinetic_hamiltonian_alt(const InertiaModel& model, const PhasePoint& point,
                               const MetricPair& metrics);
double kinetic_hamiltonian_two_polar(const InertiaModel& model, const PhasePoint& point);

double total_energy(const InertiaModel& model, const Potential& pot, const PhasePoint& point,
                    const MetricPair& metrics);

// --- Legendre transform and its inverse.
struct Momenta {
    Vec p;
    Mat P;
};
Momenta legendre(const InertiaModel& model, const Mat& phi, const Velocities& vel,
                 const MetricPair& metrics);
Velocities inverse_legendre(const InertiaModel& model, const PhasePoint& point,
                            const MetricPair& metrics);

// --- Hamilton equations with analytic gradients of H = T + V.
struct PhaseDerivative {
    Vec xdot;
    Mat phidot;
    Vec pdot;
    Mat Pdot;
};
PhaseDerivative hamilton_rhs(const InertiaModel& model, const Potential& pot,
                             const PhasePoint& point, const MetricPair& metrics);

// --- Integration.
enum class Scheme { RK4, ImplicitMidpoint };

struct ConservationReport {
    double energy_drift = 0.0;     // max relative |H - H0|
    double spin_drift = 0.0;       // max Frobenius ||S - S0||
    double vorticity_drift = 0.0;  // max Frobenius ||V - V0||
    double deviator_drift = 0.0;   // max Frobenius ||sigmaHat - sigmaHat0||
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> states;
    ConservationReport audit;
    bool diverged = false;
};

struct IntegrateOptions {
    int store_every = 1;           // keep every k-th state
    bool incompressible = false;   // project SigmaHat to its traceless part at t = 0
    double midpoint_tol = 1e-12;   // fixed-point tolerance
    int midpoint_max_iter = 50;
    double divergence_norm = 1e12;
};

Trajectory integrate(const InertiaModel& model, const Potential& pot, const PhasePoint& initial,
                     Scheme scheme, double dt, int steps, const MetricPair& metrics,
                     const IntegrateOptions& options = {});

// --- Closed-form geodesics of the geodetic affine-affine model:
// phi(t) = phi0 * exp(t * OmegaHat0); SigmaHat is constant along the curve.
Mat geodesic_exponential(const Mat& phi0, const Mat& OmegaHat0, double t);

// --- 2D boundedness classifier for the incompressible geodetic
// affine-affine sector: bounded iff p_alpha * p_beta > 0.
enum class Classification { Bounded, Unbounded, Marginal };
Classification classify_2d(double p_alpha, double p_beta);

// Reduced classical shear-channel potential for n = 2 (constants of motion
// m = p_beta - p_alpha, n = p_beta + p_alpha):
//   V(x) = m^2 / (16 A sh^2(x/2)) - n^2 / (16 A ch^2(x/2))
double shear_potential_classical(double m_const, double n_const, double A, double x);

}  // namespace affine
