#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "despeckle/dtcwt.hpp"

namespace despeckle {
namespace {

// Kingsbury's near-symmetric 'near_sym_b' pair (N. G. Kingsbury, "Complex
// wavelets for shift invariant analysis and filtering of signals", ACHA 2001;
// tables as distributed with the DTCWT toolbox). The 13-tap analysis lowpass
// is dyadic-rational. The 19-tap synthesis lowpass is the member of its
// perfect-reconstruction family whose centre tap is the tabulated 0.55943;
// every other tap agrees with the table to the printed precision.
constexpr double kNearSymH0[13] = {
    -9.0 / 5120,   0.0,           114.0 / 5120, -240.0 / 5120, -247.0 / 5120,
    1520.0 / 5120, 2844.0 / 5120, 1520.0 / 5120, -247.0 / 5120, -240.0 / 5120,
    114.0 / 5120,  0.0,           -9.0 / 5120,
};

constexpr double kNearSymG0Half[10] = {
    348057.0 / 4928000000.0,     0.0,
    -6613029.0 / 4928000000.0,   -116019.0 / 61600000.0,
    1603143.0 / 224000000.0,     33399.0 / 1400000.0,
    -137106357.0 / 2464000000.0, -3183981.0 / 61600000.0,
    73860427.0 / 246400000.0,    55943.0 / 100000.0,
};

// Kingsbury 'qshift_b' 14-tap orthonormal lowpass (group delay ~6.23).
constexpr double kQshiftH0[14] = {
    0.00325314276365318,  -0.00388321199915849, 0.0346603468448535,  -0.0388728012688278,
    -0.117203887699115,   0.275295384668882,    0.756145643892522,   0.568810420712123,
    0.0118660920337970,   -0.106711804686665,   0.0238253847949203,  0.0170252238815540,
    -0.00543947593727412, -0.00455689562847549,
};

/// Moves an even-length orthonormal lowpass the shortest distance that gives
/// it an exact zero at Nyquist while keeping it orthonormal. The tabulated
/// Q-shift taps leak about 1e-6 of DC into the highpass; this removes the leak
/// and changes no tap by more than a few parts in 1e7.
std::vector<double> project_zero_at_nyquist(std::vector<double> h) {
  const int n = static_cast<int>(h.size());
  const int shifts = n / 2;
  const int m = shifts + 1;  // orthonormality at every even shift, plus H(-1) = 0
  for (int iter = 0; iter < 4; ++iter) {
    std::vector<double> c(m, 0.0);
    std::vector<std::vector<double>> jac(m, std::vector<double>(n, 0.0));
    for (int k = 0; k < shifts; ++k) {
      for (int i = 0; i + 2 * k < n; ++i) {
        c[k] += h[i] * h[i + 2 * k];
        jac[k][i] += h[i + 2 * k];
        jac[k][i + 2 * k] += h[i];
      }
    }
    c[0] -= 1.0;
    for (int i = 0; i < n; ++i) {
      const double sign = i % 2 == 0 ? 1.0 : -1.0;
      c[shifts] += sign * h[i];
      jac[shifts][i] = sign;
    }
    // Minimum-norm step: solve (J J^T) y = c, then h -= J^T y.
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (int r = 0; r < m; ++r) {
      for (int q = 0; q < m; ++q) {
        for (int i = 0; i < n; ++i) a[r][q] += jac[r][i] * jac[q][i];
      }
      a[r][m] = c[r];
    }
    for (int col = 0; col < m; ++col) {
      int pivot = col;
      for (int r = col + 1; r < m; ++r) {
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      }
      std::swap(a[col], a[pivot]);
      for (int r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = a[r][col] / a[col][col];
        for (int q = col; q <= m; ++q) a[r][q] -= f * a[col][q];
      }
    }
    for (int i = 0; i < n; ++i) {
      double step = 0.0;
      for (int r = 0; r < m; ++r) step += jac[r][i] * a[r][m] / a[r][r];
      h[i] -= step;
    }
  }
  return h;
}

/// (-1)^n modulation about the centre tap of an odd-length zero-phase filter.
std::vector<double> modulate_centered(const std::vector<double>& f) {
  const int c = static_cast<int>(f.size() / 2);
  std::vector<double> out(f.size());
  for (int i = 0; i < static_cast<int>(f.size()); ++i) out[i] = ((i - c) % 2 == 0) ? f[i] : -f[i];
  return out;
}

std::vector<double> reversed(std::vector<double> f) {
  std::reverse(f.begin(), f.end());
  return f;
}

FilterBank make_default_bank() {
  const std::vector<double> h0(std::begin(kNearSymH0), std::end(kNearSymH0));
  std::vector<double> g0(19);
  for (int i = 0; i < 19; ++i) g0[i] = kNearSymG0Half[9 - std::abs(i - 9)];
  const std::vector<double> h1 = modulate_centered(g0);
  const std::vector<double> g1 = modulate_centered(h0);

  // Tree A takes the slower of the two Q-shift filters.
  const std::vector<double> qa0 =
      reversed(project_zero_at_nyquist(std::vector<double>(std::begin(kQshiftH0), std::end(kQshiftH0))));
  std::vector<double> qa1(qa0.size());
  const int n = static_cast<int>(qa0.size());
  for (int i = 0; i < n; ++i) qa1[i] = (i % 2 == 0 ? 1.0 : -1.0) * qa0[n - 1 - i];
  const std::vector<double> qb0 = reversed(qa0);
  const std::vector<double> qb1 = reversed(qa1);

  FilterBank fb;
  fb.level1_analysis = {{h0, h1}, {h0, h1}};
  fb.level1_synthesis = {{g0, g1}, {g0, g1}};
  fb.qshift_analysis = {{qa0, qa1}, {qb0, qb1}};
  fb.qshift_synthesis = fb.qshift_analysis;
  return fb;
}

}  // namespace

const FilterBank& default_filter_bank() {
  static const FilterBank bank = make_default_bank();
  return bank;
}

}  // namespace despeckle
