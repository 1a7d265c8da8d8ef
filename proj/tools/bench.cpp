// Benchmark: OpenMP-parallel vs serial matrix-free application of the n = 3
// reduced kinetic operator. The two paths are bitwise identical; this target
// measures the speedup and double-checks that identity at benchmark sizes.

#include <chrono>
#include <cstdio>
#include <random>

#include "affine/parallel.hpp"
#include "affine/reduced3d.hpp"

using namespace affine;

namespace {

double time_apply(const ReducedOperator3D& op, const CVec& f, bool parallel, int reps) {
    using clock = std::chrono::steady_clock;
    CVec out;
    const auto t0 = clock::now();
    for (int r = 0; r < reps; ++r) out = op.apply(f, parallel);
    const auto t1 = clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::printf("hardware threads (OpenMP): %d\n\n", max_threads());
    std::printf("%-28s %8s %12s %12s %9s\n", "operator", "dof", "serial[ms]", "parallel[ms]",
                "speedup");

    const auto model = InertiaModel::affine_affine(3, 1.0, 1.3, 0.4);
    std::mt19937 rng(42);
    std::normal_distribution<double> nd;

    for (const double spin : {0.0, 1.0, 2.0}) {
        for (const int N : {16, 24, 32}) {
            const Grid3D grid{N, -1.5, 1.5};
            const ReducedOperator3D op = reduced_kinetic_3d(model, spin, spin, grid);
            CVec f(op.amplitude_size());
            for (int i = 0; i < f.size(); ++i) f(i) = std::complex<double>(nd(rng), nd(rng));

            const int reps = (op.amplitude_size() > 200000) ? 3 : 10;
            const double ts = time_apply(op, f, false, reps);
            const double tp = time_apply(op, f, true, reps);
            const bool identical = (op.apply(f, true) == op.apply(f, false));

            char name[64];
            std::snprintf(name, sizeof name, "T^(s=%g,j=%g) N=%d", spin, spin, N);
            std::printf("%-28s %8d %12.3f %12.3f %8.2fx%s\n", name,
                        static_cast<int>(op.amplitude_size()), ts, tp, ts / tp,
                        identical ? "" : "  MISMATCH");
        }
    }
    return 0;
}
