#include "despeckle/specksim.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace despeckle {
namespace {

constexpr int kMinPhantomSide = 32;

std::vector<double> gaussian_kernel(double sigma) {
  const int half = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * half + 1));
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + half];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

PhantomKind parse_phantom_kind(std::string_view name) {
  if (name == "disks") return PhantomKind::disks;
  if (name == "blocks") return PhantomKind::blocks;
  if (name == "gradient") return PhantomKind::gradient;
  throw InvalidArgument("unknown phantom kind '" + std::string(name) + "'");
}

SpeckleMode parse_speckle_mode(std::string_view name) {
  if (name == "iid") return SpeckleMode::iid;
  if (name == "correlated") return SpeckleMode::correlated;
  throw InvalidArgument("unknown speckle mode '" + std::string(name) + "'");
}

Image generate_phantom(int width, int height, PhantomKind kind) {
  if (width < kMinPhantomSide || height < kMinPhantomSide) {
    throw InvalidArgument("phantom dimensions must be at least 32x32");
  }
  Image img(width, height);
  switch (kind) {
    case PhantomKind::blocks: {
      // Quadrants: top-left, top-right, bottom-left, bottom-right.
      constexpr std::array<double, 4> levels = {40.0, 90.0, 150.0, 210.0};
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const int q = (y >= height / 2 ? 2 : 0) + (x >= width / 2 ? 1 : 0);
          img(x, y) = levels[q];
        }
      }
      break;
    }
    case PhantomKind::gradient:
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) img(x, y) = 20.0 + 215.0 * x / (width - 1);
      }
      break;
    case PhantomKind::disks: {
      // 3x3 grid of disks of growing radius on a mid-grey background; the
      // first disk is the darkest allowed level (anechoic cyst).
      constexpr std::array<double, 9> levels = {20.0, 110.0, 235.0, 150.0, 30.0, 190.0, 60.0, 220.0, 130.0};
      constexpr double background = 80.0;
      const double cell_w = width / 3.0;
      const double cell_h = height / 3.0;
      const double max_r = 0.45 * std::min(cell_w, cell_h);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const int cx = std::min(2, static_cast<int>(x / cell_w));
          const int cy = std::min(2, static_cast<int>(y / cell_h));
          const int idx = cy * 3 + cx;
          const double r = max_r * (0.4 + 0.6 * idx / 8.0);
          const double dx = x + 0.5 - (cx + 0.5) * cell_w;
          const double dy = y + 0.5 - (cy + 0.5) * cell_h;
          img(x, y) = dx * dx + dy * dy <= r * r ? levels[idx] : background;
        }
      }
      break;
    }
  }
  return img;
}

Image speckle_multiplier(int width, int height, const SpeckleSpec& spec, Exec exec) {
  if (!(spec.rayleigh_scale > 0.0)) throw InvalidArgument("rayleigh_scale must be positive");
  Prng prng{spec.seed};
  Image field(width, height);

  if (spec.mode == SpeckleMode::iid) {
    for (double& v : field.pixels()) v = spec.rayleigh_scale * std::sqrt(-2.0 * std::log(prng.uniform_open0()));
    return field;
  }

  if (!(spec.psf_sigma > 0.0)) throw InvalidArgument("psf_sigma must be positive in correlated mode");
  // Circular complex Gaussian scatterers with unit total variance.
  ComplexGrid scatter(width, height);
  const double component_std = std::sqrt(0.5);
  for (auto& c : scatter.pixels()) {
    const double r = std::sqrt(-2.0 * std::log(prng.uniform_open0()));
    const double theta = 2.0 * std::numbers::pi * prng.uniform_open0();
    c = {component_std * r * std::cos(theta), component_std * r * std::sin(theta)};
  }
  const std::vector<double> kernel = gaussian_kernel(spec.psf_sigma);
  const ComplexGrid blurred = kernels::convolve_periodic_separable(scatter, kernel, exec);

  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    field[i] = std::abs(blurred[i]);
    sum += field[i];
  }
  const double envelope_mean = sum / static_cast<double>(field.size());
  // The Rayleigh scale sets the mean of the envelope exactly as in iid mode.
  const double gain = spec.rayleigh_scale * std::sqrt(std::numbers::pi / 2.0) / envelope_mean;
  for (double& v : field.pixels()) v *= gain;
  return field;
}

Image apply_speckle(const Image& img, const SpeckleSpec& spec, Exec exec) {
  for (double v : img.pixels()) {
    if (v < 0.0) throw InvalidArgument("apply_speckle requires nonnegative pixels");
  }
  const Image noise = speckle_multiplier(img.width(), img.height(), spec, exec);
  Image out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = img[i] * noise[i];
  return out;
}

}  // namespace despeckle
