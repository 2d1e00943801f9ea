#pragma once

#include "despeckle/image.hpp"

namespace despeckle {

/// Returned by snr_db when the error is exactly zero.
inline constexpr double kSnrCapDb = 300.0;

struct MetricsReport {
  double snr_db = 0.0;
  double beta = 0.0;
  double mse = 0.0;
};

/// 10 log10(sum ref^2 / sum (ref - test)^2).
double snr_db(const Image& reference, const Image& test);

/// Correlation of the 3x3 Laplacians (symmetric borders) of the two images;
/// 0 when either Laplacian has zero variance.
double beta(const Image& reference, const Image& test);

double mse(const Image& reference, const Image& test);

MetricsReport evaluate(const Image& reference, const Image& test);

/// [[0,1,0],[1,-4,1],[0,1,0]] with half-sample symmetric borders.
Image laplacian(const Image& img);

}  // namespace despeckle
