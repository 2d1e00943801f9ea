#include "despeckle/specteq.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "despeckle/kernels.hpp"

namespace despeckle {
namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

void fft2_inplace(ComplexGrid& grid, int sign) {
  auto* data = reinterpret_cast<fftw_complex*>(grid.pixels().data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(grid.height(), grid.width(), data, data, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

double median(std::vector<float>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (static_cast<double>(*std::max_element(v.begin(), mid)) + *mid);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate(const EqualizerConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InvalidArgument("equalizer epsilon must be positive");
  if (!is_power_of_two(cfg.block)) throw InvalidArgument("equalizer block must be a power of two");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0)) throw InvalidArgument("equalizer overlap must be in [0, 1)");
  if (cfg.fluctuation_window < 3 || cfg.fluctuation_window % 2 == 0) {
    throw InvalidArgument("equalizer fluctuation window must be odd and at least 3");
  }
}

std::vector<int> block_starts(int extent, int block, int step) {
  std::vector<int> starts;
  for (int s = 0; s + block <= extent; s += step) starts.push_back(s);
  return starts;
}

}  // namespace

Spectrum dft2(const Image& img) {
  ComplexGrid grid(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) grid[i] = img[i];
  fft2_inplace(grid, FFTW_FORWARD);
  return grid;
}

InverseDft idft2(const Spectrum& spectrum) {
  ComplexGrid grid = spectrum;
  fft2_inplace(grid, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(grid.size());
  InverseDft result{Image(grid.width(), grid.height()), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.image[i] = grid[i].real() * scale;
    result.max_imag_residue = std::max(result.max_imag_residue, std::abs(grid[i].imag() * scale));
  }
  return result;
}

Spectrum estimate_spectrum_magnitude(const Image& img, const EqualizerConfig& cfg) {
  validate(cfg);
  const int b = cfg.block;
  if (img.width() < b || img.height() < b) throw InvalidArgument("image is smaller than the periodogram block");
  const int step = std::max(1, static_cast<int>(std::lround(b * (1.0 - cfg.overlap))));

  // Speckle is multiplicative, so dividing by the local mean strips most of
  // the tissue contrast. Taken from the raw image, the periodogram of a scene
  // with many edges is dominated by its own low frequencies.
  const Image local = kernels::box_mean(img, cfg.fluctuation_window);
  Image fluct(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) fluct[i] = local[i] > 0.0 ? img[i] / local[i] - 1.0 : 0.0;

  // Periodic Hann window.
  std::vector<double> hann(static_cast<std::size_t>(b));
  for (int i = 0; i < b; ++i) hann[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / b));

  // Per-bin powers of every block; float storage keeps large images affordable.
  const std::size_t bins = static_cast<std::size_t>(b) * b;
  std::vector<std::vector<float>> power(bins);
  ComplexGrid tile(b, b);
  for (int y0 : block_starts(img.height(), b, step)) {
    for (int x0 : block_starts(img.width(), b, step)) {
      double m = 0.0;
      for (int y = 0; y < b; ++y) {
        for (int x = 0; x < b; ++x) m += fluct(x0 + x, y0 + y);
      }
      m /= static_cast<double>(b) * b;
      for (int y = 0; y < b; ++y) {
        for (int x = 0; x < b; ++x) tile(x, y) = (fluct(x0 + x, y0 + y) - m) * hann[x] * hann[y];
      }
      fft2_inplace(tile, FFTW_FORWARD);
      for (std::size_t i = 0; i < bins; ++i) power[i].push_back(static_cast<float>(std::norm(tile[i])));
    }
  }

  // Median rather than mean over blocks: the few blocks that straddle an
  // edge would otherwise dominate the low-frequency bins.
  Spectrum mag(b, b);
  double peak = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    const double v = std::sqrt(median(power[i]));
    mag[i] = v;
    peak = std::max(peak, v);
  }
  if (peak > 0.0) {
    for (auto& v : mag.pixels()) v = v.real() / peak;
  } else {
    // Constant image: no fluctuation energy anywhere, treat as flat.
    for (auto& v : mag.pixels()) v = 1.0;
  }
  return mag;
}

Spectrum resample_spectrum(const Spectrum& mag, int width, int height) {
  if (mag.width() == width && mag.height() == height) return mag;
  Spectrum out(width, height);
  const int bw = mag.width();
  const int bh = mag.height();
  for (int ky = 0; ky < height; ++ky) {
    const double fy = static_cast<double>(ky) * bh / height;
    const int y0 = static_cast<int>(std::floor(fy));
    const double ty = fy - y0;
    for (int kx = 0; kx < width; ++kx) {
      const double fx = static_cast<double>(kx) * bw / width;
      const int x0 = static_cast<int>(std::floor(fx));
      const double tx = fx - x0;
      const double v00 = mag(x0 % bw, y0 % bh).real();
      const double v10 = mag((x0 + 1) % bw, y0 % bh).real();
      const double v01 = mag(x0 % bw, (y0 + 1) % bh).real();
      const double v11 = mag((x0 + 1) % bw, (y0 + 1) % bh).real();
      out(kx, ky) = (1 - ty) * ((1 - tx) * v00 + tx * v10) + ty * ((1 - tx) * v01 + tx * v11);
    }
  }
  return out;
}

Spectrum build_equalizer(const Spectrum& mag_h, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("equalizer epsilon must be positive");
  Spectrum gain(mag_h.width(), mag_h.height());
  for (std::size_t i = 0; i < mag_h.size(); ++i) {
    const double h = std::abs(mag_h[i]);
    gain[i] = 1.0 / std::sqrt(h + epsilon);
  }
  return gain;
}

Image apply_equalizer(const Image& img, const Spectrum& gain) {
  if (!img.same_dims(gain)) throw InvalidArgument("equalizer gain must match image dimensions");
  Spectrum spec = dft2(img);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= gain[i].real();
  Image out = idft2(spec).image;

  const double floor = 1e-6 * max_value(out);
  for (double& v : out.pixels()) v = std::max(v, floor);

  const double in_mean = mean(img);
  const double out_mean = mean(out);
  if (out_mean > 0.0) {
    const double k = in_mean / out_mean;
    for (double& v : out.pixels()) v *= k;
  }
  return out;
}

Image equalize_spectrum(const Image& img, const EqualizerConfig& cfg) {
  const Spectrum mag = estimate_spectrum_magnitude(img, cfg);
  const Spectrum gain = build_equalizer(resample_spectrum(mag, img.width(), img.height()), cfg.epsilon);
  return apply_equalizer(img, gain);
}

}  // namespace despeckle
