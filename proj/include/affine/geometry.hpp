#pragma once

#include "affine/linalg.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Configuration-space geometry of the affinely rigid body: Green/Cauchy
// tensors, polar and two-polar decompositions, deformation invariants and
// invariant-measure weights.
// ---------------------------------------------------------------------------

// Translational position x plus internal configuration matrix phi in GL+(n).
struct Configuration {
    Vec x;
    Mat phi;

    Configuration(Vec x_in, Mat phi_in);
    int dim() const { return static_cast<int>(phi.rows()); }
};

// Green tensor G = phi^T g phi, Cauchy tensor C = phi^-T eta phi^-1 and the
// Lagrange/Euler deformation tensors built from them.
struct DeformationTensors {
    Mat G;
    Mat C;
    Mat E_lag;  // (G - eta)/2
    Mat e_eul;  // (g - C)/2
};

// phi = U * A with U an (eta, g)-isometry and A eta-symmetric positive
// definite; A is the principal square root of Ghat = eta^-1 G.
struct PolarForm {
    Mat U;
    Mat A;
};

// phi = L * diag(exp(q)) * R^-1 with proper-orthogonal L, R and ascending
// logarithmic deformation invariants q. `degenerate` is set when two
// invariants coincide within tolerance (decomposition valid but non-unique).
struct TwoPolarForm {
    Mat L;
    Vec q;
    Mat R;
    bool degenerate = false;

    Mat compose() const { return L * q.array().exp().matrix().asDiagonal() * R.transpose(); }
};

enum class MeasureKind { Haar, Lebesgue };

DeformationTensors green_cauchy(const Mat& phi, const MetricPair& metrics);

PolarForm polar_decompose(const Mat& phi, const MetricPair& metrics);

// Euclidean-chart two-polar decomposition (g = eta = I). General metrics are
// reduced to this chart by congruence first; see the overload below.
TwoPolarForm two_polar_decompose(const Mat& phi);

// General-metric variant: phi is mapped to the Euclidean chart by the metric
// Cholesky congruence, decomposed there, and the orthogonal factors mapped
// back (L is then g-orthogonal, R eta-orthogonal).
TwoPolarForm two_polar_decompose(const Mat& phi, const MetricPair& metrics);

// Logarithmic deformation invariants: q_a = (1/2) ln lambda_a with lambda_a
// the ascending eigenvalues of Ghat = eta^-1 G.
Vec deformation_invariants(const Mat& phi, const MetricPair& metrics);

// Invariant-measure weights over the deformation invariants:
//   Haar:     P_lambda = prod_{i<j} |sinh(q_i - q_j)|
//   Lebesgue: P_l      = prod_{i<j} |Q_i^2 - Q_j^2|   (argument is Q, not q)
double measure_weight(const Vec& invariants, MeasureKind kind);

// Mean (dilatational) invariant and the traceless remainder; for n = 2 the
// shear coordinate is x = q_2 - q_1.
struct DilatationSplit {
    double qbar;
    Vec relative;
    double x;  // meaningful for n = 2 only (q2 - q1)
};

DilatationSplit dilatation_split(const Vec& q);

// Tolerance used to flag coincident invariants (relative to max|q| + 1).
inline constexpr double kDegeneracyTol = 1e-9;

}  // namespace affine
