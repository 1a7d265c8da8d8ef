#include "affine/geometry.hpp"

#include <cmath>

namespace affine {

Configuration::Configuration(Vec x_in, Mat phi_in) : x(std::move(x_in)), phi(std::move(phi_in)) {
    if (phi.rows() != phi.cols() || x.size() != phi.rows()) {
        throw ShapeError("Configuration: phi must be square and match x");
    }
    if (phi.determinant() <= 0.0) {
        throw OrientationError("Configuration: det(phi) must be positive");
    }
}

DeformationTensors green_cauchy(const Mat& phi, const MetricPair& metrics) {
    if (std::abs(phi.determinant()) < 1e-300) {
        throw SingularConfiguration("green_cauchy: phi is singular");
    }
    DeformationTensors out;
    out.G = phi.transpose() * metrics.g * phi;
    const Mat phi_inv = phi.inverse();
    out.C = phi_inv.transpose() * metrics.eta * phi_inv;
    out.E_lag = 0.5 * (out.G - metrics.eta);
    out.e_eul = 0.5 * (metrics.g - out.C);
    return out;
}

namespace {

// Ascending generalized eigen-decomposition of the pencil (G, eta); columns
// of F are eta-orthonormal (F^T eta F = I).
void pencil_eigs(const Mat& G, const Mat& eta, Vec& lambda, Mat& F) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(G, eta);
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("pencil_eigs: generalized eigensolver failed");
    }
    lambda = es.eigenvalues();  // ascending by Eigen contract
    F = es.eigenvectors();
}

}  // namespace

PolarForm polar_decompose(const Mat& phi, const MetricPair& metrics) {
    if (phi.determinant() <= 0.0) {
        throw OrientationError("polar_decompose: det(phi) must be positive");
    }
    const Mat G = phi.transpose() * metrics.g * phi;
    Vec lambda;
    Mat F;
    pencil_eigs(G, metrics.eta, lambda, F);
    if (lambda.minCoeff() <= 0.0) {
        throw NumericalFailure("polar_decompose: Green tensor not positive definite");
    }
    // Ghat = eta^-1 G = F diag(lambda) F^-1 with F^-1 = F^T eta.
    const Mat Finv = F.transpose() * metrics.eta;
    PolarForm out;
    out.A = F * lambda.cwiseSqrt().asDiagonal() * Finv;
    const Mat A_inv = F * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * Finv;
    out.U = phi * A_inv;
    return out;
}

TwoPolarForm two_polar_decompose(const Mat& phi) {
    const int n = static_cast<int>(phi.rows());
    if (phi.determinant() <= 0.0) {
        throw OrientationError("two_polar_decompose: det(phi) must be positive");
    }
    Eigen::JacobiSVD<Mat> svd(phi, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // Eigen returns descending singular values; we canonicalize to ascending.
    TwoPolarForm out;
    out.L.resize(n, n);
    out.R.resize(n, n);
    out.q.resize(n);
    for (int a = 0; a < n; ++a) {
        const int src = n - 1 - a;
        out.q(a) = std::log(svd.singularValues()(src));
        out.L.col(a) = svd.matrixU().col(src);
        out.R.col(a) = svd.matrixV().col(src);
    }
    // Sign canonicalization: make the leading entry of the first n-1 columns
    // of L positive (flipping the matched column of R keeps the product), then
    // use the last column pair to enforce det L = det R = +1.
    for (int a = 0; a + 1 < n; ++a) {
        for (int i = 0; i < n; ++i) {
            const double v = out.L(i, a);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) {
                    out.L.col(a) *= -1.0;
                    out.R.col(a) *= -1.0;
                }
                break;
            }
        }
    }
    if (out.L.determinant() < 0.0) {
        out.L.col(n - 1) *= -1.0;
        out.R.col(n - 1) *= -1.0;
    }
    const double tol = kDegeneracyTol * (out.q.cwiseAbs().maxCoeff() + 1.0);
    for (int a = 0; a + 1 < n; ++a) {
        if (out.q(a + 1) - out.q(a) < tol) out.degenerate = true;
    }
    return out;
}

TwoPolarForm two_polar_decompose(const Mat& phi, const MetricPair& metrics) {
    // Congruence to the Euclidean chart: phi_e = Lg^T phi Leta^-T preserves
    // the deformation invariants; the orthogonal factors map back through the
    // Cholesky factors.
    const Mat Lg = cholesky_lower(metrics.g);
    const Mat Leta = cholesky_lower(metrics.eta);
    const Mat phi_e = Lg.transpose() * phi *
                      Leta.transpose().triangularView<Eigen::Upper>().solve(
                          Mat::Identity(phi.rows(), phi.cols()));
    TwoPolarForm e = two_polar_decompose(phi_e);
    TwoPolarForm out;
    out.q = e.q;
    out.degenerate = e.degenerate;
    out.L = Lg.transpose().triangularView<Eigen::Upper>().solve(e.L);
    out.R = Leta.transpose().triangularView<Eigen::Upper>().solve(e.R);
    return out;
}

Vec deformation_invariants(const Mat& phi, const MetricPair& metrics) {
    if (phi.determinant() <= 0.0) {
        throw OrientationError("deformation_invariants: det(phi) must be positive");
    }
    const Mat G = phi.transpose() * metrics.g * phi;
    Vec lambda;
    Mat F;
    pencil_eigs(G, metrics.eta, lambda, F);
    if (lambda.minCoeff() <= 0.0) {
        throw NumericalFailure("deformation_invariants: non-positive eigenvalue");
    }
    return 0.5 * lambda.array().log();
}

double measure_weight(const Vec& invariants, MeasureKind kind) {
    const int n = static_cast<int>(invariants.size());
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (kind == MeasureKind::Haar) {
                w *= std::abs(std::sinh(invariants(i) - invariants(j)));
            } else {
                const double a = invariants(i) * invariants(i);
                const double b = invariants(j) * invariants(j);
                w *= std::abs(a - b);
            }
        }
    }
    return w;
}

DilatationSplit dilatation_split(const Vec& q) {
    DilatationSplit out;
    out.qbar = q.mean();
    out.relative = q.array() - out.qbar;
    out.x = (q.size() == 2) ? q(1) - q(0) : 0.0;
    return out;
}

}  // namespace affine
