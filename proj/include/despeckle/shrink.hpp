#pragma once

#include <optional>
#include <vector>

#include "despeckle/dtcwt.hpp"
#include "despeckle/image.hpp"
#include "despeckle/kernels.hpp"

namespace despeckle {

/// Per-subband inputs to the MAP update.
struct ShrinkageParams {
  /// Noise variance per real/imaginary component.
  double sigma_n2 = 0.0;
  /// Signal scale per coefficient, >= s_floor.
  Image s_map;
  /// Quantum noise probability per coefficient, in [0, 1].
  Image k_map;
  double s_floor = 1e-300;
};

/// Parent-child magnitude product and its per-subband normalisation.
struct InterscaleField {
  Image c_grid;
  Image nc_grid;
};

/// Robust noise variance from the finest level: (median|v| / 0.6745)^2 over
/// the real and imaginary parts of its six subbands.
double estimate_noise_sigma2(const DtcwtPyramid& pyr);

/// Division guard for a subband: 1e-6 * (max |Y| + 1e-300).
double signal_floor(const ComplexGrid& subband);

/// S = sqrt(max(local mean |Y|^2 - 2 sigma_n2, s_floor^2)) over an odd window
/// with symmetric borders.
Image estimate_signal_s(const ComplexGrid& subband, double sigma_n2, int window = 7,
                        Exec exec = Exec::parallel);

/// c = |parent| * |child| with the parent upsampled by 2x2 replication;
/// nc = c / max(c), or all zero when c is.
InterscaleField interscale_product(const ComplexGrid& child, const ComplexGrid& parent);
InterscaleField interscale_product(const ComplexGrid& child, const Image& parent_magnitude);

/// Probability of the noise state: K = cos^2(nc * pi / 2).
double compute_k(double nc);
Image compute_k_map(const Image& nc);

/// Threshold of the MAP estimate: sqrt(3) * exp(K) * sigma_n2 / S.
double map_threshold(double k, double sigma_n2, double s) noexcept;

/// Reduces each coefficient magnitude by its threshold (to zero at most),
/// keeping the phase.
ComplexGrid shrink_subband(const ComplexGrid& subband, const ShrinkageParams& params);

struct ShrinkConfig {
  int window = 7;
  /// Use this noise variance instead of the MAD estimate.
  std::optional<double> sigma_n2;
  Exec exec = Exec::parallel;
};

struct ShrinkResult {
  DtcwtPyramid pyramid;
  double sigma_n2 = 0.0;
  /// Mean K per level, finest first.
  std::vector<double> mean_k;
};

/// Shrinks every directional subband using its parent at the next coarser
/// level (the lowpass magnitude for the coarsest level). The lowpass is
/// passed through untouched.
ShrinkResult shrink_pyramid(const DtcwtPyramid& pyr, const ShrinkConfig& cfg = {});

/// Magnitude of the coarsest lowpass (RMS over the four trees), resampled by
/// nearest neighbour to width x height.
Image lowpass_magnitude(const DtcwtPyramid& pyr, int width, int height);

}  // namespace despeckle
