#pragma once

#include "affine/linalg.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// Angular-momentum (Wigner) matrices and representation channels.
// ---------------------------------------------------------------------------

// Standard angular-momentum matrices in the |j, m> basis (m descending from
// +j). Hermitian; [S_a, S_b] = i hbar eps_abc S_c and sum S_a^2 =
// hbar^2 j(j+1) Id.
struct AngularMatrices {
    double j = 0.0;
    CMat S1, S2, S3;

    int dim() const { return static_cast<int>(S3.rows()); }
};

// j must be a non-negative half-integer (2j integral).
AngularMatrices angular_momentum_matrices(double j, double hbar = 1.0);

// Representation channel for the n = 3 reduced amplitudes: half-integer pair
// (s, j) with matching "halfness" (both integer or both half-odd).
struct Channel3D {
    double s;
    double j;

    Channel3D(double s_in, double j_in);
};

}  // namespace affine
