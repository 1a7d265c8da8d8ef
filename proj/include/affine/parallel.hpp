#pragma once

#include <cstddef>
#include <functional>

namespace affine {

// Index-space parallel loop. The OpenMP path and the serial reference path
// produce identical results for any body that writes only to its own index
// slot; the serial path is kept for testing and as the benchmark baseline.

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int threads = 0);

void serial_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Number of hardware threads OpenMP would use (1 when built without OpenMP).
int max_threads();

}  // namespace affine
