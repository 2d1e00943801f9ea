#include <algorithm>
#include <cmath>

#include "despeckle/dtcwt.hpp"
#include "despeckle/error.hpp"
#include "despeckle/pipeline.hpp"
#include "despeckle/shrink.hpp"

namespace despeckle {

Image frost_filter(const Image& img, int window, double damping, Exec exec) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("frost window must be odd");
  if (!(damping > 0.0)) throw InvalidArgument("frost damping must be positive");
  return kernels::frost(img, window, damping, exec);
}

Image log_wavelet_baseline(const Image& img, int levels, Exec exec) {
  using namespace pipeline_detail;
  if (levels < 1 || levels > 5) throw InvalidArgument("levels must be in [1, 5]");
  check_finite(img, "input");
  const double input_mean = mean(img);

  Image work = img;
  const double lambda = log_guarded(work);
  DtcwtPyramid pyr = dtcwt_forward(work, levels, default_filter_bank(), exec);
  const double sigma_n2 = estimate_noise_sigma2(pyr);

  for (auto& level : pyr.subbands) {
    for (auto& band : level) {
      double power = 0.0;
      for (const auto& c : band.pixels()) power += std::norm(c);
      power /= static_cast<double>(band.size());
      const double floor = signal_floor(band);
      // Per-component signal deviation, matching the per-component sigma_n2.
      const double sigma_x = std::sqrt(std::max(0.5 * (power - 2.0 * sigma_n2), floor * floor));
      const double t = sigma_n2 / sigma_x;
      for (auto& c : band.pixels()) {
        const double m = std::abs(c);
        c = m > t ? ((m - t) / m) * c : 0.0;
      }
    }
  }

  work = dtcwt_inverse(pyr, default_filter_bank(), exec);
  check_finite(work, "dtcwt_inverse");
  exp_restore(work, lambda, input_mean);
  return work;
}

}  // namespace despeckle
