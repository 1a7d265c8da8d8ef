#pragma once

#include <Eigen/Dense>

#include "affine/errors.hpp"

namespace affine {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Spatial/material metric pair (g, eta). Both must be symmetric positive
// definite; validated on construction.
struct MetricPair {
    Mat g;
    Mat eta;

    MetricPair(Mat g_in, Mat eta_in);
    static MetricPair euclidean(int n);

    int dim() const { return static_cast<int>(g.rows()); }
};

// True if m is symmetric to the given absolute tolerance.
bool is_symmetric(const Mat& m, double tol = 1e-12);

// True if m is symmetric positive definite (eigenvalue check).
bool is_spd(const Mat& m, double sym_tol = 1e-12);

// Principal square root of an SPD matrix via its eigendecomposition.
Mat spd_sqrt(const Mat& m);

// Cholesky factor Lo with m = Lo * Lo^T. Throws NumericalFailure if m is not
// positive definite.
Mat cholesky_lower(const Mat& m);

// Matrix exponential (Eigen's scaling-and-squaring Pade implementation).
Mat expm(const Mat& m);

// g-transpose of a mixed tensor X^i_j: (X^{T_g})^i_j = g^{ik} g_{jl} X^l_k,
// i.e. inv(g) * X^T * g. For g = I this is the plain transpose.
Mat metric_transpose(const Mat& x, const Mat& metric);

}  // namespace affine
