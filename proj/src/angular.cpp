#include "affine/angular.hpp"

#include <cmath>

namespace affine {

namespace {

bool is_half_integer(double j) {
    const double twice = 2.0 * j;
    return std::abs(twice - std::round(twice)) < 1e-12;
}

}  // namespace

AngularMatrices angular_momentum_matrices(double j, double hbar) {
    if (j < 0.0 || !is_half_integer(j)) {
        throw InvalidLabel("angular_momentum_matrices: j must be a non-negative half-integer");
    }
    const int d = static_cast<int>(std::round(2.0 * j)) + 1;
    AngularMatrices out;
    out.j = j;
    out.S1 = CMat::Zero(d, d);
    out.S2 = CMat::Zero(d, d);
    out.S3 = CMat::Zero(d, d);
    const std::complex<double> i_unit(0.0, 1.0);
    for (int k = 0; k < d; ++k) {
        const double m = j - k;  // basis ordering |j, j>, |j, j-1>, ...
        out.S3(k, k) = hbar * m;
        if (k + 1 < d) {
            // S+ |j, m-1> = hbar sqrt(j(j+1) - (m-1)m) |j, m>
            const double c = hbar * std::sqrt(j * (j + 1.0) - (m - 1.0) * m);
            out.S1(k, k + 1) += 0.5 * c;
            out.S1(k + 1, k) += 0.5 * c;
            out.S2(k, k + 1) += -0.5 * i_unit * c;
            out.S2(k + 1, k) += 0.5 * i_unit * c;
        }
    }
    return out;
}

Channel3D::Channel3D(double s_in, double j_in) : s(s_in), j(j_in) {
    if (s < 0.0 || j < 0.0 || !is_half_integer(s) || !is_half_integer(j)) {
        throw InvalidLabel("Channel3D: s and j must be non-negative half-integers");
    }
    const int twos = static_cast<int>(std::round(2.0 * s));
    const int twoj = static_cast<int>(std::round(2.0 * j));
    if ((twos % 2) != (twoj % 2)) {
        throw InvalidLabel("Channel3D: s and j must be both integer or both half-odd");
    }
}

}  // namespace affine
