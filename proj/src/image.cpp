#include "despeckle/image.hpp"

#include <algorithm>
#include <cmath>

namespace despeckle {

bool all_finite(const Image& img) noexcept {
  return std::all_of(img.pixels().begin(), img.pixels().end(),
                     [](double v) { return std::isfinite(v); });
}

bool all_finite(const ComplexGrid& grid) noexcept {
  return std::all_of(grid.pixels().begin(), grid.pixels().end(), [](const std::complex<double>& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

double mean(const Image& img) noexcept {
  if (img.empty()) return 0.0;
  double sum = 0.0;
  for (double v : img.pixels()) sum += v;
  return sum / static_cast<double>(img.size());
}

double max_value(const Image& img) noexcept {
  if (img.empty()) return 0.0;
  return *std::max_element(img.pixels().begin(), img.pixels().end());
}

double min_value(const Image& img) noexcept {
  if (img.empty()) return 0.0;
  return *std::min_element(img.pixels().begin(), img.pixels().end());
}

}  // namespace despeckle
