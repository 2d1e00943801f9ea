#pragma once

// Straightforward single-threaded versions of the kernels in kernels.hpp.
// They favour obviousness over speed and exist so the tests and the benchmark
// have something independent to compare the OpenMP kernels against.

#include <span>

#include "despeckle/image.hpp"

namespace despeckle::reference {

Image box_mean(const Image& in, int window);

Image frost(const Image& in, int window, double damping);

/// Direct 2-D convolution with the outer product of `kernel` with itself.
Image convolve_periodic(const Image& in, std::span<const double> kernel);

}  // namespace despeckle::reference
