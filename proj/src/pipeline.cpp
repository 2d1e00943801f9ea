#include "despeckle/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "despeckle/dtcwt.hpp"
#include "despeckle/error.hpp"
#include "despeckle/shrink.hpp"

namespace despeckle {

void PipelineConfig::validate() const {
  if (levels < 1 || levels > 5) throw InvalidArgument("levels must be in [1, 5]");
  if (window < 3 || window % 2 == 0) throw InvalidArgument("window must be odd and at least 3");
}

namespace pipeline_detail {

double log_guarded(Image& img) {
  if (min_value(img) < 0.0) throw InvalidArgument("input pixels must be nonnegative");
  const double lambda = 1e-6 * max_value(img);
  // An all-zero image still needs a positive argument.
  const double guard = lambda > 0.0 ? lambda : 1e-300;
  for (double& v : img.pixels()) v = std::log(v + guard);
  return guard;
}

void exp_restore(Image& img, double lambda, double target_mean) {
  for (double& v : img.pixels()) v = std::max(0.0, std::exp(v) - lambda);
  const double m = mean(img);
  if (m > 0.0) {
    const double scale = target_mean / m;
    for (double& v : img.pixels()) v *= scale;
  }
}

void check_finite(const Image& img, const std::string& stage) {
  if (!all_finite(img)) throw StageError(stage, "non-finite values after " + stage);
}

}  // namespace pipeline_detail

DespeckleReport despeckle(const Image& img, const PipelineConfig& cfg) {
  using namespace pipeline_detail;
  cfg.validate();
  check_finite(img, "input");
  if (min_value(img) < 0.0) throw InvalidArgument("input pixels must be nonnegative");

  DespeckleReport report;
  report.equalizer_epsilon = cfg.equalizer.epsilon;
  const double input_mean = mean(img);

  Image work = cfg.enable_equalization ? equalize_spectrum(img, cfg.equalizer) : img;
  check_finite(work, "equalize");

  const double lambda = log_guarded(work);
  check_finite(work, "log");

  const DtcwtPyramid pyr = dtcwt_forward(work, cfg.levels, default_filter_bank(), cfg.exec);
  for (const auto& level : pyr.subbands) {
    for (const auto& band : level) {
      if (!all_finite(band)) throw StageError("dtcwt_forward", "non-finite wavelet coefficients");
    }
  }

  ShrinkConfig shrink_cfg;
  shrink_cfg.window = cfg.window;
  shrink_cfg.exec = cfg.exec;
  ShrinkResult shrunk = shrink_pyramid(pyr, shrink_cfg);
  for (const auto& level : shrunk.pyramid.subbands) {
    for (const auto& band : level) {
      if (!all_finite(band)) throw StageError("shrink", "non-finite shrunk coefficients");
    }
  }
  report.sigma_n2 = shrunk.sigma_n2;
  report.mean_k = std::move(shrunk.mean_k);

  work = dtcwt_inverse(shrunk.pyramid, default_filter_bank(), cfg.exec);
  check_finite(work, "dtcwt_inverse");

  exp_restore(work, lambda, input_mean);
  check_finite(work, "exp");
  report.output = std::move(work);
  return report;
}

}  // namespace despeckle
