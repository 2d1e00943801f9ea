#pragma once

#include <array>
#include <vector>

#include "despeckle/image.hpp"
#include "despeckle/kernels.hpp"

namespace despeckle {

struct FilterPair {
  std::vector<double> lowpass;
  std::vector<double> highpass;
};

struct TreePair {
  FilterPair tree_a;
  FilterPair tree_b;
};

/// Filters for the dual-tree transform.
///
/// Level 1 uses odd-length, zero-phase filters applied without decimation;
/// the two trees are the even and odd samples of the result, so tree_a and
/// tree_b hold identical filters there.
///
/// Levels >= 2 use even-length Q-shift filters, decimating by two. Tree A
/// (even samples of the interleaved lowpass) uses the filter with the larger
/// group delay and tree B its time reverse, which keeps the two trees half a
/// sample apart at every level. Q-shift banks are orthonormal, so synthesis
/// is the transpose of analysis with the same taps.
struct FilterBank {
  TreePair level1_analysis;
  TreePair level1_synthesis;
  TreePair qshift_analysis;
  TreePair qshift_synthesis;
};

/// Kingsbury near-symmetric (13,19)-tap level-1 filters and 14-tap Q-shift
/// filters for the coarser levels.
const FilterBank& default_filter_bank();

/// Six oriented complex subbands per level plus the real lowpass residual.
struct DtcwtPyramid {
  int levels = 0;
  int original_width = 0;
  int original_height = 0;
  int padded_width = 0;
  int padded_height = 0;
  /// subbands[level][direction]; level 0 is the finest, each level halves the
  /// dims of the previous one starting from padded/2. Directions are ordered
  /// by angle: about 15, 45, 75, 105, 135, 165 degrees.
  std::vector<std::array<ComplexGrid, 6>> subbands;
  /// Coarsest lowpass, one grid per tree combination (column tree, row tree):
  /// AA, AB, BA, BB. Each is padded/2^levels.
  std::array<Image, 4> lowpass;
};

DtcwtPyramid dtcwt_forward(const Image& img, int levels, const FilterBank& fb = default_filter_bank(),
                           Exec exec = Exec::parallel);

Image dtcwt_inverse(const DtcwtPyramid& pyr, const FilterBank& fb = default_filter_bank(),
                    Exec exec = Exec::parallel);

namespace dtcwt_detail {

// One-dimensional building blocks, exposed for the filter-bank tests.

/// Undecimated zero-phase filtering with half-sample symmetric borders.
void filter_zero_phase(std::span<const double> in, std::span<const double> taps, std::span<double> out);

/// Q-shift analysis of an interleaved two-tree signal of length N (N % 4 == 0)
/// into interleaved lowpass and highpass outputs of length N/2.
void qshift_analysis(std::span<const double> in, const TreePair& filters, std::span<double> lo,
                     std::span<double> hi);

/// Exact inverse of qshift_analysis.
void qshift_synthesis(std::span<const double> lo, std::span<const double> hi, const TreePair& filters,
                      std::span<double> out);

}  // namespace dtcwt_detail
}  // namespace despeckle
