#pragma once

#include <string>
#include <vector>

#include "despeckle/image.hpp"
#include "despeckle/kernels.hpp"
#include "despeckle/specteq.hpp"

namespace despeckle {

struct PipelineConfig {
  int levels = 3;
  EqualizerConfig equalizer;
  /// Odd window for the local signal scale.
  int window = 7;
  bool enable_equalization = true;
  Exec exec = Exec::parallel;

  /// Throws InvalidArgument unless levels is in [1, 5] and window is odd >= 3.
  void validate() const;
};

struct DespeckleReport {
  Image output;
  double sigma_n2 = 0.0;
  /// Mean quantum noise probability per level, finest first.
  std::vector<double> mean_k;
  double equalizer_epsilon = 0.0;
};

/// Equalize, log(x + lambda), DTCWT, adaptive shrinkage, inverse DTCWT,
/// exp - lambda, then clamp at zero and restore the input mean.
/// lambda = 1e-6 * max(img). A non-finite intermediate throws StageError.
DespeckleReport despeckle(const Image& img, const PipelineConfig& cfg = {});

/// Frost filter with symmetric borders. window odd (default 5), damping > 0.
Image frost_filter(const Image& img, int window = 5, double damping = 1.0, Exec exec = Exec::parallel);

/// Homomorphic soft threshold: log, DTCWT, per-subband T = sigma_n2 / sigma_x
/// on coefficient magnitudes, inverse, exp, mean-rescaled. sigma_x is the
/// per-component signal deviation, sqrt((E|Y|^2 - 2 sigma_n2) / 2).
Image log_wavelet_baseline(const Image& img, int levels = 3, Exec exec = Exec::parallel);

namespace pipeline_detail {

/// Log transform with the positivity guard; returns lambda.
double log_guarded(Image& img);
/// Inverse of log_guarded followed by the clamp and mean rescale.
void exp_restore(Image& img, double lambda, double target_mean);
/// Throws StageError(stage) if img holds NaN or Inf.
void check_finite(const Image& img, const std::string& stage);

}  // namespace pipeline_detail
}  // namespace despeckle
