#pragma once

// Data-parallel inner loops shared by the transform, the shrinkage and the
// baselines. Each kernel takes an Exec policy; the OpenMP path splits work by
// output rows (or columns) only, so both policies produce bit-identical
// results. Naive serial versions used as test oracles live in reference.hpp.

#include <functional>
#include <span>
#include <vector>

#include "despeckle/image.hpp"

namespace despeckle {

enum class Exec { serial, parallel };

namespace kernels {

/// Half-sample symmetric reflection of `i` into [0, n): -1 -> 0, n -> n-1.
/// Works for arbitrarily distant indices (the extension is 2n-periodic).
inline int reflect(int i, int n) noexcept {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

inline int wrap(int i, int n) noexcept {
  int m = i % n;
  return m < 0 ? m + n : m;
}

/// Mean over a (window x window) neighbourhood with symmetric borders.
/// Separable running sums; window must be odd.
Image box_mean(const Image& in, int window, Exec exec = Exec::parallel);

/// Frost filter: local mean/variance over the window, weights
/// exp(-damping * (var/mean^2) * chebyshev_distance).
Image frost(const Image& in, int window, double damping, Exec exec = Exec::parallel);

/// Separable convolution with a symmetric odd-length kernel, periodic borders.
Image convolve_periodic_separable(const Image& in, std::span<const double> kernel,
                                  Exec exec = Exec::parallel);
ComplexGrid convolve_periodic_separable(const ComplexGrid& in, std::span<const double> kernel,
                                        Exec exec = Exec::parallel);

/// Runs `fn(line_index)` for 0 <= line_index < count, in parallel when asked.
/// `fn` must only write to state owned by its line.
void for_each_line(int count, Exec exec, const std::function<void(int)>& fn);

}  // namespace kernels
}  // namespace despeckle
