#pragma once

#include "affine/angular.hpp"
#include "affine/dynamics.hpp"
#include "affine/geometry.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// n = 3 reduced kinetic operators on matrix-valued amplitudes f^{sj} over the
// invariant grid (q1, q2, q3) (invariant models, Haar weight) or
// (Q1, Q2, Q3) (d'Alembert model, Lebesgue weight).
// ---------------------------------------------------------------------------

struct Grid3D {
    int N = 12;       // cells per axis (cell-centered)
    double lo = 0.0;  // box start per axis
    double hi = 1.0;  // box end per axis
};

struct ReducedOperator3D {
    Channel3D channel;
    ModelKind kind;
    MeasureKind measure;  // Haar for invariant models, Lebesgue for d'Alembert
    Grid3D grid;
    double hbar = 1.0;

    double coef_d = 0.0;      // hbar^2/(2 alpha) in front of -D
    double coef_qbar = 0.0;   // hbar^2 B/(2 alpha (alpha+3B)), invariant models
    double coef_lattice = 0.0;  // 1/(16 alpha) or 1/(4 I)
    double const_shift = 0.0;   // mixed-model Casimir shift

    AngularMatrices Ss, Sj;  // spin-s (left) and spin-j (right) matrices

    int ds = 1, dj = 1;
    std::vector<double> node_weight;  // measure density at unmasked nodes
    std::vector<bool> mask;           // nodes on/near coincidence planes

    int nodes() const { return grid.N * grid.N * grid.N; }
    int amplitude_size() const { return nodes() * ds * dj; }
    double cell() const { return (grid.hi - grid.lo) / grid.N; }
    double coord(int i) const { return grid.lo + (i + 0.5) * cell(); }
    int node_index(int i, int j, int k) const { return (i * grid.N + j) * grid.N + k; }

    // Matrix-free application (OpenMP over nodes when parallel, serial
    // reference otherwise; bitwise identical results).
    CVec apply(const CVec& f, bool parallel = true) const;

    // Weighted inner product per the channel-orthogonality normalization:
    // sum_nodes P * Tr(f1^+ f2) * h^3 / ((2s+1)(2j+1)).
    std::complex<double> inner(const CVec& f1, const CVec& f2) const;

    // max |<f1|H f2> - conj(<f2|H f1>)| over `trials` random amplitude pairs,
    // normalized by |<f1|H f2>| scale.
    double hermiticity_residual(int trials, unsigned seed) const;

    // Dense matrix (small grids only); Hermitian by the residual check.
    CMat dense() const;
};

ReducedOperator3D reduced_kinetic_3d(const InertiaModel& model, double s, double j,
                                     const Grid3D& grid, double hbar = 1.0);

// Independent scalar assembly of the (0, 0) channel as a dense real symmetric
// matrix in the similarity-transformed (sqrt-weight) frame; spectrum check
// target for the matrix-free path.
Mat scalar_channel_dense(const InertiaModel& model, const Grid3D& grid, double hbar = 1.0);

// Extremal (lowest) eigenvalues by Lanczos with full reorthogonalization on
// the unmasked subspace.
Vec lowest_eigenvalues_3d(const ReducedOperator3D& op, int k, int max_iter = 300,
                          unsigned seed = 12345);

}  // namespace affine
