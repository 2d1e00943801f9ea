#include "despeckle/shrink.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace despeckle {
namespace {

constexpr double kMadToSigma = 0.6745;

double median_inplace(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

Image magnitudes(const ComplexGrid& g) {
  Image out(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::abs(g[i]);
  return out;
}

}  // namespace

double estimate_noise_sigma2(const DtcwtPyramid& pyr) {
  if (pyr.subbands.empty()) throw InvalidArgument("noise estimation needs at least one pyramid level");
  std::vector<double> values;
  for (const auto& band : pyr.subbands.front()) {
    for (const auto& c : band.pixels()) {
      values.push_back(std::abs(c.real()));
      values.push_back(std::abs(c.imag()));
    }
  }
  const double sigma = median_inplace(values) / kMadToSigma;
  return sigma * sigma;
}

double signal_floor(const ComplexGrid& subband) {
  double peak = 0.0;
  for (const auto& c : subband.pixels()) peak = std::max(peak, std::abs(c));
  return 1e-6 * (peak + 1e-300);
}

Image estimate_signal_s(const ComplexGrid& subband, double sigma_n2, int window, Exec exec) {
  if (window < 3 || window % 2 == 0) throw InvalidArgument("signal window must be odd and at least 3");
  Image power(subband.width(), subband.height());
  for (std::size_t i = 0; i < subband.size(); ++i) power[i] = std::norm(subband[i]);
  Image s = kernels::box_mean(power, window, exec);
  const double floor = signal_floor(subband);
  const double floor2 = floor * floor;
  for (double& v : s.pixels()) v = std::sqrt(std::max(v - 2.0 * sigma_n2, floor2));
  return s;
}

InterscaleField interscale_product(const ComplexGrid& child, const Image& parent_magnitude) {
  const int pw = (child.width() + 1) / 2;
  const int ph = (child.height() + 1) / 2;
  if (parent_magnitude.width() != pw || parent_magnitude.height() != ph) {
    throw InvalidArgument("parent dims must be ceil(child dims / 2)");
  }
  InterscaleField f{Image(child.width(), child.height()), Image(child.width(), child.height())};
  double peak = 0.0;
  for (int y = 0; y < child.height(); ++y) {
    for (int x = 0; x < child.width(); ++x) {
      const double c = parent_magnitude(x / 2, y / 2) * std::abs(child(x, y));
      f.c_grid(x, y) = c;
      peak = std::max(peak, c);
    }
  }
  if (peak > 0.0) {
    for (std::size_t i = 0; i < f.c_grid.size(); ++i) f.nc_grid[i] = std::min(1.0, f.c_grid[i] / peak);
  }
  return f;
}

InterscaleField interscale_product(const ComplexGrid& child, const ComplexGrid& parent) {
  return interscale_product(child, magnitudes(parent));
}

double compute_k(double nc) {
  if (!(nc >= 0.0 && nc <= 1.0)) throw InvalidArgument("normalised interscale product must lie in [0, 1]");
  const double c = std::cos(nc * std::numbers::pi / 2.0);
  // cos(pi/2) is 6e-17 in floating point; the endpoint is exactly zero.
  return nc == 1.0 ? 0.0 : c * c;
}

Image compute_k_map(const Image& nc) {
  Image k(nc.width(), nc.height());
  for (std::size_t i = 0; i < nc.size(); ++i) k[i] = compute_k(nc[i]);
  return k;
}

double map_threshold(double k, double sigma_n2, double s) noexcept {
  return std::sqrt(3.0) * std::exp(k) * sigma_n2 / s;
}

ComplexGrid shrink_subband(const ComplexGrid& subband, const ShrinkageParams& params) {
  if (!subband.same_dims(params.s_map) || !subband.same_dims(params.k_map)) {
    throw InvalidArgument("shrinkage parameter grids must match the subband");
  }
  ComplexGrid out(subband.width(), subband.height());
  for (std::size_t i = 0; i < subband.size(); ++i) {
    const std::complex<double> y = subband[i];
    const double m = std::abs(y);
    const double t = map_threshold(params.k_map[i], params.sigma_n2, std::max(params.s_map[i], params.s_floor));
    if (m == 0.0 || m <= t) {
      out[i] = 0.0;
    } else {
      out[i] = ((m - t) / m) * y;
    }
  }
  return out;
}

Image lowpass_magnitude(const DtcwtPyramid& pyr, int width, int height) {
  const Image& t0 = pyr.lowpass[0];
  Image rms(t0.width(), t0.height());
  for (std::size_t i = 0; i < rms.size(); ++i) {
    double acc = 0.0;
    for (const auto& t : pyr.lowpass) acc += t[i] * t[i];
    rms[i] = std::sqrt(acc / 4.0);
  }
  if (rms.width() == width && rms.height() == height) return rms;
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out(x, y) = rms(std::min(rms.width() - 1, x * rms.width() / width),
                      std::min(rms.height() - 1, y * rms.height() / height));
    }
  }
  return out;
}

ShrinkResult shrink_pyramid(const DtcwtPyramid& pyr, const ShrinkConfig& cfg) {
  ShrinkResult result;
  result.pyramid = pyr;
  result.sigma_n2 = cfg.sigma_n2 ? *cfg.sigma_n2 : estimate_noise_sigma2(pyr);
  if (!(result.sigma_n2 >= 0.0)) throw InvalidArgument("noise variance must be nonnegative");

  for (int level = 0; level < pyr.levels; ++level) {
    double k_sum = 0.0;
    std::size_t k_count = 0;
    for (int d = 0; d < 6; ++d) {
      const ComplexGrid& band = pyr.subbands[level][d];
      const InterscaleField field =
          level + 1 < pyr.levels
              ? interscale_product(band, pyr.subbands[level + 1][d])
              : interscale_product(band, lowpass_magnitude(pyr, (band.width() + 1) / 2, (band.height() + 1) / 2));

      ShrinkageParams params;
      params.sigma_n2 = result.sigma_n2;
      params.k_map = compute_k_map(field.nc_grid);
      params.s_map = estimate_signal_s(band, result.sigma_n2, cfg.window, cfg.exec);
      params.s_floor = signal_floor(band);
      result.pyramid.subbands[level][d] = shrink_subband(band, params);

      for (double k : params.k_map.pixels()) k_sum += k;
      k_count += params.k_map.size();
    }
    result.mean_k.push_back(k_sum / static_cast<double>(k_count));
  }
  return result;
}

}  // namespace despeckle
