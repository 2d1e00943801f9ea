#pragma once

#include "despeckle/image.hpp"

namespace despeckle {

/// Complex frequency grid, DC at (0, 0). Magnitude-only spectra keep im = 0.
using Spectrum = ComplexGrid;

struct EqualizerConfig {
  /// Offset added to |H| before the inverse square root; bounds the gain at
  /// 1/sqrt(epsilon).
  double epsilon = 0.1;
  /// Periodogram block side, a power of two no larger than the image.
  int block = 32;
  /// Fractional overlap of consecutive periodogram blocks, in [0, 1).
  double overlap = 0.5;
  /// Odd box window for the local mean that the speckle fluctuation is
  /// measured against.
  int fluctuation_window = 13;
};

/// Unnormalized forward 2-D DFT.
Spectrum dft2(const Image& img);

struct InverseDft {
  Image image;
  /// Largest |imaginary part| discarded when taking the real part.
  double max_imag_residue = 0.0;
};

/// Inverse 2-D DFT scaled by 1/(width*height).
InverseDft idft2(const Spectrum& spectrum);

/// Welch-style estimate of the speckle spectral magnitude. The periodogram is
/// taken of the fluctuation field img / local_mean(img) - 1 rather than of
/// img itself, so tissue structure contributes little: Hann-windowed,
/// mean-removed, overlapping blocks; sqrt of the per-bin median power over
/// blocks; max bin = 1. Pixels whose local mean is not positive contribute 0.
/// Result is block x block.
Spectrum estimate_spectrum_magnitude(const Image& img, const EqualizerConfig& cfg);

/// Bilinear resampling of a magnitude spectrum to another grid size, treating
/// the frequency plane as periodic.
Spectrum resample_spectrum(const Spectrum& mag, int width, int height);

/// Per-bin real gain L = (|H| + epsilon)^(-1/2).
Spectrum build_equalizer(const Spectrum& mag_h, double epsilon);

/// Filters `img` by the real gains `gain` (same dims, every bin including DC),
/// floors the result at 1e-6 * max and rescales it to the input mean, so only
/// the shape of `gain` matters.
Image apply_equalizer(const Image& img, const Spectrum& gain);

/// estimate -> resample -> build -> apply.
Image equalize_spectrum(const Image& img, const EqualizerConfig& cfg);

}  // namespace despeckle
