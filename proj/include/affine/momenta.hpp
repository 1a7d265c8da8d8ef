#pragma once

#include "affine/geometry.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Velocities, canonical momenta, affine spin/vorticity, two-polar momenta and
// Casimir invariants.
//
// Matrix layout conventions used throughout:
//   phi(i, A)  - internal configuration, spatial row index, material column
//   P(A, i)    - canonical momenta conjugate to phi (the pairing is
//                Tr(P * phidot))
//   Sigma    = phi * P      (spatial affine spin / hypermomentum)
//   SigmaHat = P * phi      (co-moving affine spin)
// ---------------------------------------------------------------------------

// Canonical phase-space point (x, phi; p, P).
struct PhasePoint {
    Vec x;
    Mat phi;
    Vec p;
    Mat P;

    int dim() const { return static_cast<int>(phi.rows()); }
};

struct AffineVelocity {
    Mat Omega;     // phidot * phi^-1 (spatial)
    Mat OmegaHat;  // phi^-1 * phidot (co-moving)
};

struct SpinVorticity {
    Mat Sigma;
    Mat SigmaHat;
    Mat S;     // doubled g-skew part of Sigma (spin)
    Mat V;     // doubled eta-skew part of SigmaHat (vorticity)
    double p;  // Tr(Sigma) = Tr(SigmaHat), the dilatational momentum
};

struct TwoPolarMomenta {
    Mat rhoHat;  // L^-1 S L
    Mat tauHat;  // -R^-1 V R
    Vec p_a;     // conjugate to the invariants q^a
    Mat M;       // -rhoHat - tauHat
    Mat N;       //  rhoHat - tauHat
    bool degenerate = false;
};

AffineVelocity affine_velocity(const Mat& phi, const Mat& phidot);

SpinVorticity spin_vorticity(const PhasePoint& point, const MetricPair& metrics);

// Trace/deviator split Sigma = sigma + (p/n) I.
struct TraceSplit {
    Mat sigma;
    double p;
};
TraceSplit trace_split(const Mat& Sigma);

// Two-polar momenta in the Euclidean chart. p_a = diag(R^T SigmaHat R); the
// formula follows from the pairing identity
//   Tr(SigmaHat OmegaHat) = p_a qdot^a + Tr(rhoHat chiHat)/2 + Tr(tauHat thetaHat)/2
// for chart velocities Ldot = L chiHat, Rdot = R thetaHat, qdot.
TwoPolarMomenta two_polar_momenta(const PhasePoint& point, const TwoPolarForm& tp);

// k-th order Casimir C(k) = Tr(SigmaHat^k).
double casimir(const Mat& SigmaHat, int k);

// Two-polar lattice expression for C(2) (Casimir identity):
//   C(2) = sum_a p_a^2 + (1/16) sum_{a != b} M_ab^2 / sh^2((q_a-q_b)/2)
//                      - (1/16) sum_{a != b} N_ab^2 / ch^2((q_a-q_b)/2)
double casimir2_two_polar(const TwoPolarMomenta& mom, const Vec& q);

// SL(n) variant: Tr(sigmaHat^2) with the dilatational part removed; the
// p-sum becomes (1/2n) sum_{a,b} (p_a - p_b)^2.
double casimir2_sl_two_polar(const TwoPolarMomenta& mom, const Vec& q);

// ---------------------------------------------------------------------------
// Numeric Poisson-bracket engine: central finite differences over the
// canonical coordinates (x, phi; p, P).
// ---------------------------------------------------------------------------

using PhaseFunction = std::function<double(const PhasePoint&)>;

// Canonical bracket {f, g} at a point, via central differences with step
// h = step_scale * (1 + |coordinate|).
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& point,
                       double step_scale = 1e-5);

// Gradient of a phase function (same finite-difference scheme); exposed for
// the Hamilton right-hand-side cross-check.
struct PhaseGradient {
    Vec dx;
    Mat dphi;  // indexed like phi (i, A)
    Vec dp;
    Mat dP;  // indexed like P (A, i)
};
PhaseGradient phase_gradient(const PhaseFunction& f, const PhasePoint& point,
                             double step_scale = 1e-5);

}  // namespace affine
