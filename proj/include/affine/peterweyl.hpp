#pragma once

#include <map>
#include <utility>
#include <vector>

#include "affine/geometry.hpp"

namespace affine {

// ---------------------------------------------------------------------------
// 2D Peter-Weyl reduction: Psi(alpha; qbar, x; beta) expanded over rotation
// channels e^{i m alpha} e^{i n beta} with matrix... here scalar amplitudes
// f^{mn}(qbar, x).
// ---------------------------------------------------------------------------

struct ChannelMap2D {
    // Channel (m, n) -> amplitude values on the flattened invariant grid.
    std::map<std::pair<int, int>, CVec> channels;
    int grid_size = 0;
};

// samples[iq](ia, ib) = Psi(alpha_ia; q node iq; beta_ib) with uniform angles
// alpha_ia = 2 pi ia / Na (same for beta). Returns DFT coefficients per
// channel with frequencies m in [-Na/2, Na/2), n in [-Nb/2, Nb/2).
ChannelMap2D peter_weyl_reduce_2d(const std::vector<CMat>& samples);

// Inverse of the reduction on the same uniform angle grids.
std::vector<CMat> peter_weyl_synthesize_2d(const ChannelMap2D& map, int Na, int Nb);

// Weighted inner product per (a-la Peter-Weyl orthogonality):
//   <f1|f2> = sum_{mn} sum_nodes conj(f1) f2 * weight(node) * cell_volume
// with the measure weight evaluated from the invariant coordinates at the
// grid nodes. Throws ShapeError on mismatched grids or channel sets.
std::complex<double> weighted_inner_product(const ChannelMap2D& f1, const ChannelMap2D& f2,
                                            const std::vector<Vec>& nodes, MeasureKind kind,
                                            double cell_volume);

// Same with precomputed node weights.
std::complex<double> weighted_inner_product(const ChannelMap2D& f1, const ChannelMap2D& f2,
                                            const Vec& node_weights, double cell_volume);

}  // namespace affine
