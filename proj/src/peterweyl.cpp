#include "affine/peterweyl.hpp"

#include <cmath>

namespace affine {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int dft_frequency(int index, int size) { return (index < (size + 1) / 2) ? index : index - size; }

}  // namespace

ChannelMap2D peter_weyl_reduce_2d(const std::vector<CMat>& samples) {
    ChannelMap2D out;
    out.grid_size = static_cast<int>(samples.size());
    if (samples.empty()) return out;
    const int na = static_cast<int>(samples.front().rows());
    const int nb = static_cast<int>(samples.front().cols());
    for (const auto& s : samples) {
        if (s.rows() != na || s.cols() != nb) {
            throw ShapeError("peter_weyl_reduce_2d: inconsistent angular sampling");
        }
    }
    const std::complex<double> i_unit(0.0, 1.0);
    for (int ia = 0; ia < na; ++ia) {
        for (int ib = 0; ib < nb; ++ib) {
            const int m = dft_frequency(ia, na);
            const int n = dft_frequency(ib, nb);
            CVec f(out.grid_size);
            for (int iq = 0; iq < out.grid_size; ++iq) {
                std::complex<double> acc = 0.0;
                for (int ja = 0; ja < na; ++ja) {
                    for (int jb = 0; jb < nb; ++jb) {
                        const double phase =
                            kTwoPi * (double(m * ja) / na + double(n * jb) / nb);
                        acc += samples[iq](ja, jb) * std::exp(-i_unit * phase);
                    }
                }
                f(iq) = acc / double(na * nb);
            }
            out.channels[{m, n}] = std::move(f);
        }
    }
    return out;
}

std::vector<CMat> peter_weyl_synthesize_2d(const ChannelMap2D& map, int Na, int Nb) {
    std::vector<CMat> out(map.grid_size, CMat::Zero(Na, Nb));
    const std::complex<double> i_unit(0.0, 1.0);
    for (const auto& [mn, f] : map.channels) {
        const auto [m, n] = mn;
        for (int iq = 0; iq < map.grid_size; ++iq) {
            for (int ja = 0; ja < Na; ++ja) {
                for (int jb = 0; jb < Nb; ++jb) {
                    const double phase = kTwoPi * (double(m * ja) / Na + double(n * jb) / Nb);
                    out[iq](ja, jb) += f(iq) * std::exp(i_unit * phase);
                }
            }
        }
    }
    return out;
}

std::complex<double> weighted_inner_product(const ChannelMap2D& f1, const ChannelMap2D& f2,
                                            const Vec& node_weights, double cell_volume) {
    if (f1.grid_size != f2.grid_size || f1.grid_size != node_weights.size()) {
        throw ShapeError("weighted_inner_product: grid size mismatch");
    }
    if (f1.channels.size() != f2.channels.size()) {
        throw ShapeError("weighted_inner_product: channel sets differ");
    }
    std::complex<double> acc = 0.0;
    for (const auto& [mn, a] : f1.channels) {
        const auto it = f2.channels.find(mn);
        if (it == f2.channels.end()) {
            throw ShapeError("weighted_inner_product: channel sets differ");
        }
        const CVec& b = it->second;
        if (a.size() != f1.grid_size || b.size() != f1.grid_size) {
            throw ShapeError("weighted_inner_product: channel length does not match grid size");
        }
        for (int iq = 0; iq < f1.grid_size; ++iq) {
            acc += std::conj(a(iq)) * b(iq) * node_weights(iq);
        }
    }
    return acc * cell_volume;
}

std::complex<double> weighted_inner_product(const ChannelMap2D& f1, const ChannelMap2D& f2,
                                            const std::vector<Vec>& nodes, MeasureKind kind,
                                            double cell_volume) {
    Vec w(static_cast<Eigen::Index>(nodes.size()));
    for (size_t i = 0; i < nodes.size(); ++i) w(static_cast<Eigen::Index>(i)) = measure_weight(nodes[i], kind);
    return weighted_inner_product(f1, f2, w, cell_volume);
}

}  // namespace affine
