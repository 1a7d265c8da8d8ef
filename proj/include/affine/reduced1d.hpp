#pragma once

#include <functional>
#include <string>
#include <vector>

#include "affine/dynamics.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Reduced 1D Schroedinger operators over deformation invariants, weighted
// flux-form discretization, Sturm-bisection eigensolver and the separable
// 2D d'Alembert solvers.
// ---------------------------------------------------------------------------

// Operator  H f = -(c / w(x)) d/dx ( w(x) d f/dx ) + V(x) f  on the open
// interval (a, b) with measure weight w > 0 inside the domain (it may vanish
// at the endpoints, which yields the natural regular closure).
struct ReducedOperator1D {
    enum class Variable { X, Q, Qplus, Qminus, R, PhiAngle };
    enum class Boundary { Dirichlet, NeumannRegular };

    Variable variable = Variable::X;
    double kinetic_coeff = 0.5;  // c above
    std::function<double(double)> weight;
    std::function<double(double)> potential;
    double a = 0.0, b = 1.0;
    Boundary left = Boundary::Dirichlet;
    Boundary right = Boundary::Dirichlet;
};

// Symmetric tridiagonal matrix (diag size N, off size N-1).
struct Tridiag {
    Vec diag;
    Vec off;

    Mat dense() const;
};

// Cell-centered flux-form discretization on N cells, similarity-transformed
// by diag(sqrt(w)) so the result is symmetric by construction. A weight that
// vanishes at an endpoint produces the natural zero-flux closure there
// regardless of the declared boundary.
Tridiag discretize_1d(const ReducedOperator1D& op, int N);

// Number of eigenvalues of T strictly below x (Sturm / LDL^T inertia count).
int sturm_count_below(const Tridiag& T, double x);

// The k lowest eigenvalues by bisection, ascending.
Vec lowest_eigenvalues(const Tridiag& T, int k, double tol = 1e-12);

// ---------------------------------------------------------------------------
// 2D reduced kinetic operators for the invariant models (n = 2 body).
// ---------------------------------------------------------------------------

// Shear channel (variable x, weight |sinh x| on (0, L)) and dilatation
// channel (variable q = qbar, unit weight) for rotational quantum numbers
// (m, n). Shear potential:
//   V(x) = hbar^2 (n-m)^2 / (16 alpha sh^2(x/2))
//        - hbar^2 (n+m)^2 / (16 alpha ch^2(x/2)) + channel shift,
// with alpha = A (affine-affine) or I+A (mixed models); the mixed models add
// the constant shift I hbar^2 m^2/(I^2-A^2) (metric-affine) or
// I hbar^2 n^2/(I^2-A^2) (affine-metric). Dilatation kinetic coefficient:
// hbar^2/(4(alpha_dil + 2B)) with alpha_dil = A or I+A.
struct Reduced2DPair {
    ReducedOperator1D shear;
    ReducedOperator1D dil;
};
Reduced2DPair reduced_kinetic_2d(const InertiaModel& model, int m, int n, double hbar = 1.0,
                                 double shear_box = 60.0, double dil_box = 12.0);

// Continuum-edge threshold of the geodetic shear channel: the similarity
// transform shifts the x -> infinity asymptote to hbar^2/(4 alpha).
double shear_continuum_edge(const InertiaModel& model, double hbar = 1.0);

struct BoundStateParams {
    // Cells at the coarse refinement (the certificate re-solves at 2N). The
    // critical |m-n| = 1 channels converge only at O(h), which sets the size.
    int N = 10000;
    double L = 60.0;     // box length
    double hbar = 1.0;
    double level_tol = 1e-3;  // relative drift allowed between refinements
};

// Number of shear-channel eigenvalues below the continuum edge for the
// geodetic incompressible channel (m, n), verified between two grid
// refinements. Throws Unconverged when the refinements disagree.
int bound_state_count(const InertiaModel& model, int m, int n,
                      const BoundStateParams& params = {});

// ---------------------------------------------------------------------------
// Separable 2D d'Alembert solvers.
// ---------------------------------------------------------------------------

struct SpectrumLevel {
    std::vector<double> labels;  // channel + quantum numbers
    double energy = 0.0;
    bool converged = true;
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    std::vector<SpectrumLevel> levels;
    int grid_n = 0;
    double domain_a = 0.0, domain_b = 0.0;
    double tolerance = 0.0;
};

struct DAlembertParams {
    double inertia = 1.0;  // scalar internal inertia I
    double hbar = 1.0;
    int N = 2000;
    double L = 30.0;  // radial box
    int levels = 6;   // levels per 1D channel
};

// Q+- separated channels: H_+- = -(hbar^2/2I)(d^2 + (1/Q) d)
//   + hbar^2 (m -+ n)^2 / (8 I Q^2) + V_+-(Q), weight Q on (0, L).
std::pair<Spectrum, Spectrum> dalembert_qpm_solver(int m, int n,
                                                   const std::function<double(double)>& Vplus,
                                                   const std::function<double(double)>& Vminus,
                                                   const DAlembertParams& params = {});

// Polar-chart solver: angular problem in phi on (0, pi/2) with weight
// sin(2 phi), then the radial problem in r with weight r^3 and the angular
// eigenvalue coupled as E_phi / r^2. Labels per level: (m, n, k, mu).
Spectrum dalembert_polar_solver(int m, int n, const std::function<double(double)>& Vr,
                                const std::function<double(double)>& Vphi,
                                const DAlembertParams& params = {});

}  // namespace affine
