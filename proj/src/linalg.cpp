#include "affine/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace affine {

MetricPair::MetricPair(Mat g_in, Mat eta_in) : g(std::move(g_in)), eta(std::move(eta_in)) {
    if (g.rows() != g.cols() || eta.rows() != eta.cols() || g.rows() != eta.rows()) {
        throw ShapeError("MetricPair: g and eta must be square matrices of equal size");
    }
    if (!is_symmetric(g) || !is_symmetric(eta)) {
        throw ValidationError("MetricPair: metrics must be symmetric to 1e-12");
    }
    if (!is_spd(g) || !is_spd(eta)) {
        throw ValidationError("MetricPair: metrics must be positive definite");
    }
}

MetricPair MetricPair::euclidean(int n) {
    return MetricPair(Mat::Identity(n, n), Mat::Identity(n, n));
}

bool is_symmetric(const Mat& m, double tol) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_spd(const Mat& m, double sym_tol) {
    if (!is_symmetric(m, sym_tol)) return false;
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

Mat spd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw NumericalFailure("spd_sqrt: matrix is not positive definite");
    }
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

Mat cholesky_lower(const Mat& m) {
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success) {
        throw NumericalFailure("cholesky_lower: matrix is not positive definite");
    }
    return llt.matrixL();
}

Mat expm(const Mat& m) { return m.exp(); }

Mat metric_transpose(const Mat& x, const Mat& metric) {
    return metric.ldlt().solve(x.transpose() * metric);
}

}  // namespace affine
