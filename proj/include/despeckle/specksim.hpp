#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <utility>

#include "despeckle/image.hpp"
#include "despeckle/kernels.hpp"

namespace despeckle {

/// splitmix64 generator. A plain value: copying it forks the stream.
struct Prng {
  std::uint64_t state = 0;

  std::uint64_t next() noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on (0, 1], 53 bits.
  double uniform_open0() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  friend bool operator==(const Prng&, const Prng&) = default;
};

/// Functional form of Prng::next: returns the output and the advanced state.
inline std::pair<std::uint64_t, Prng> next_u64(Prng prng) noexcept {
  const std::uint64_t value = prng.next();
  return {value, prng};
}

enum class SpeckleMode { iid, correlated };

struct SpeckleSpec {
  SpeckleMode mode = SpeckleMode::iid;
  /// Rayleigh scale of the multiplier; sqrt(2/pi) gives unit mean.
  double rayleigh_scale = std::sqrt(2.0 / std::numbers::pi);
  /// Std of the isotropic Gaussian PSF, pixels (correlated mode only).
  double psf_sigma = 2.0;
  std::uint64_t seed = 0;
};

enum class PhantomKind { disks, blocks, gradient };

PhantomKind parse_phantom_kind(std::string_view name);
SpeckleMode parse_speckle_mode(std::string_view name);

/// Deterministic test scene with intensities in [20, 235]; width, height >= 32.
Image generate_phantom(int width, int height, PhantomKind kind);

/// Multiplicative speckle Y = X * N.
Image apply_speckle(const Image& img, const SpeckleSpec& spec, Exec exec = Exec::parallel);

/// The multiplier field N alone (what apply_speckle multiplies in).
Image speckle_multiplier(int width, int height, const SpeckleSpec& spec, Exec exec = Exec::parallel);

}  // namespace despeckle
