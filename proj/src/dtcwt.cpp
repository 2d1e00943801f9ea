#include "despeckle/dtcwt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace despeckle {
namespace dtcwt_detail {

using kernels::reflect;

void filter_zero_phase(std::span<const double> in, std::span<const double> taps, std::span<double> out) {
  const int n = static_cast<int>(in.size());
  const int len = static_cast<int>(taps.size());
  const int c = len / 2;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < len; ++j) acc += taps[j] * in[reflect(i + c - j, n)];
    out[i] = acc;
  }
}

// Interleaved layout: sample 2k belongs to tree A, 2k+1 to tree B. Output n of
// a tree sees its own input samples 2n + L/2 - j for taps j. Because tree B's
// filters are the time reverses of tree A's, a half-sample-symmetric input
// yields half-sample-symmetric outputs, which is what makes symmetric borders
// exactly invertible.
void qshift_analysis(std::span<const double> in, const TreePair& f, std::span<double> lo, std::span<double> hi) {
  const int n = static_cast<int>(in.size());
  const int len = static_cast<int>(f.tree_a.lowpass.size());
  const int half = len / 2;
  const int outputs = n / 4;
  for (int k = 0; k < outputs; ++k) {
    double lo_a = 0.0, hi_a = 0.0, lo_b = 0.0, hi_b = 0.0;
    for (int j = 0; j < len; ++j) {
      const int t = 2 * k + half - j;  // tree sample index
      const double a = in[reflect(2 * t, n)];
      const double b = in[reflect(2 * t + 1, n)];
      lo_a += f.tree_a.lowpass[j] * a;
      hi_a += f.tree_a.highpass[j] * a;
      lo_b += f.tree_b.lowpass[j] * b;
      hi_b += f.tree_b.highpass[j] * b;
    }
    lo[2 * k] = lo_a;
    lo[2 * k + 1] = lo_b;
    hi[2 * k] = hi_a;
    hi[2 * k + 1] = hi_b;
  }
}

void qshift_synthesis(std::span<const double> lo, std::span<const double> hi, const TreePair& f,
                      std::span<double> out) {
  const int m = static_cast<int>(lo.size());
  const int n = 2 * m;
  const int len = static_cast<int>(f.tree_a.lowpass.size());
  const int half = len / 2;
  for (int t = 0; t < m; ++t) {
    double a = 0.0, b = 0.0;
    // Taps j with 2k + half - j == t for integer k.
    for (int j = (t + half) % 2; j < len; j += 2) {
      const int k = (t - half + j) / 2;
      const int ia = reflect(2 * k, m);
      const int ib = reflect(2 * k + 1, m);
      a += f.tree_a.lowpass[j] * lo[ia] + f.tree_a.highpass[j] * hi[ia];
      b += f.tree_b.lowpass[j] * lo[ib] + f.tree_b.highpass[j] * hi[ib];
    }
    out[reflect(2 * t, n)] = a;
    out[reflect(2 * t + 1, n)] = b;
  }
}

}  // namespace dtcwt_detail

namespace {

using dtcwt_detail::filter_zero_phase;
using kernels::for_each_line;
using kernels::reflect;

// Applies `op(in_line, out_lines...)` along columns or rows. Column lines are
// gathered into scratch buffers so the 1-D code only sees contiguous data.
template <typename Op>
void along_columns(const Image& in, std::vector<Image*> outs, Exec exec, Op op) {
  const int h = in.height();
  for_each_line(in.width(), exec, [&](int x) {
    std::vector<double> src(static_cast<std::size_t>(h));
    for (int y = 0; y < h; ++y) src[y] = in(x, y);
    std::vector<std::vector<double>> dst;
    for (Image* o : outs) dst.emplace_back(static_cast<std::size_t>(o->height()));
    op(std::span<const double>(src), dst);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      for (int y = 0; y < outs[i]->height(); ++y) (*outs[i])(x, y) = dst[i][y];
    }
  });
}

template <typename Op>
void along_rows(const Image& in, std::vector<Image*> outs, Exec exec, Op op) {
  for_each_line(in.height(), exec, [&](int y) {
    std::vector<std::vector<double>> dst;
    for (Image* o : outs) dst.emplace_back(static_cast<std::size_t>(o->width()));
    op(in.row(y), dst);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      std::copy(dst[i].begin(), dst[i].end(), outs[i]->row(y).begin());
    }
  });
}

// Two-input variants for synthesis.
template <typename Op>
Image combine_columns(const Image& a, const Image& b, int out_height, Exec exec, Op op) {
  Image out(a.width(), out_height);
  for_each_line(a.width(), exec, [&](int x) {
    std::vector<double> sa(static_cast<std::size_t>(a.height()));
    std::vector<double> sb(static_cast<std::size_t>(b.height()));
    for (int y = 0; y < a.height(); ++y) sa[y] = a(x, y);
    for (int y = 0; y < b.height(); ++y) sb[y] = b(x, y);
    std::vector<double> dst(static_cast<std::size_t>(out_height));
    op(std::span<const double>(sa), std::span<const double>(sb), std::span<double>(dst));
    for (int y = 0; y < out_height; ++y) out(x, y) = dst[y];
  });
  return out;
}

template <typename Op>
Image combine_rows(const Image& a, const Image& b, int out_width, Exec exec, Op op) {
  Image out(out_width, a.height());
  for_each_line(a.height(), exec, [&](int y) { op(a.row(y), b.row(y), out.row(y)); });
  return out;
}

// --- level 1 -----------------------------------------------------------------

struct Split {
  Image lo;
  Image hi;
};

Split level1_columns(const Image& in, const FilterPair& f, Exec exec) {
  Split s{Image(in.width(), in.height()), Image(in.width(), in.height())};
  along_columns(in, {&s.lo, &s.hi}, exec, [&](std::span<const double> src, std::vector<std::vector<double>>& dst) {
    filter_zero_phase(src, f.lowpass, dst[0]);
    filter_zero_phase(src, f.highpass, dst[1]);
  });
  return s;
}

Split level1_rows(const Image& in, const FilterPair& f, Exec exec) {
  Split s{Image(in.width(), in.height()), Image(in.width(), in.height())};
  along_rows(in, {&s.lo, &s.hi}, exec, [&](std::span<const double> src, std::vector<std::vector<double>>& dst) {
    filter_zero_phase(src, f.lowpass, dst[0]);
    filter_zero_phase(src, f.highpass, dst[1]);
  });
  return s;
}

void level1_merge(std::span<const double> lo, std::span<const double> hi, const FilterPair& g, std::span<double> out) {
  std::vector<double> tmp(out.size());
  filter_zero_phase(lo, g.lowpass, out);
  filter_zero_phase(hi, g.highpass, tmp);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
}

// --- q-shift levels ------------------------------------------------------------

Split qshift_columns(const Image& in, const TreePair& f, Exec exec) {
  Split s{Image(in.width(), in.height() / 2), Image(in.width(), in.height() / 2)};
  along_columns(in, {&s.lo, &s.hi}, exec, [&](std::span<const double> src, std::vector<std::vector<double>>& dst) {
    dtcwt_detail::qshift_analysis(src, f, dst[0], dst[1]);
  });
  return s;
}

Split qshift_rows(const Image& in, const TreePair& f, Exec exec) {
  Split s{Image(in.width() / 2, in.height()), Image(in.width() / 2, in.height())};
  along_rows(in, {&s.lo, &s.hi}, exec, [&](std::span<const double> src, std::vector<std::vector<double>>& dst) {
    dtcwt_detail::qshift_analysis(src, f, dst[0], dst[1]);
  });
  return s;
}

// --- quad <-> complex ------------------------------------------------------------

// A 2x2 polyphase quad holds the four tree combinations:
//   (even row, even col) = AA, (even, odd) = AB, (odd, even) = BA, (odd, odd) = BB
// where the first letter is the column-filter tree. The two complex outputs are
//   p = (AA + i AB) / sqrt2,  q = (BB - i BA) / sqrt2,  z0 = p - q,  z1 = p + q.
std::array<ComplexGrid, 2> quad_to_complex(const Image& quad) {
  const int w = quad.width() / 2;
  const int h = quad.height() / 2;
  const double s = std::sqrt(0.5);
  std::array<ComplexGrid, 2> z{ComplexGrid(w, h), ComplexGrid(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::complex<double> p(s * quad(2 * x, 2 * y), s * quad(2 * x + 1, 2 * y));
      const std::complex<double> q(s * quad(2 * x + 1, 2 * y + 1), -s * quad(2 * x, 2 * y + 1));
      z[0](x, y) = p - q;
      z[1](x, y) = p + q;
    }
  }
  return z;
}

Image complex_to_quad(const ComplexGrid& z0, const ComplexGrid& z1) {
  const int w = z0.width();
  const int h = z0.height();
  const double s = std::sqrt(0.5);
  Image quad(2 * w, 2 * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // p = (z0 + z1)/2 = (AA + i AB)/sqrt2 ; q = (z1 - z0)/2 = (BB - i BA)/sqrt2
      const std::complex<double> p2 = z0(x, y) + z1(x, y);
      const std::complex<double> q2 = z1(x, y) - z0(x, y);
      quad(2 * x, 2 * y) = s * p2.real();
      quad(2 * x + 1, 2 * y) = s * p2.imag();
      quad(2 * x + 1, 2 * y + 1) = s * q2.real();
      quad(2 * x, 2 * y + 1) = -s * q2.imag();
    }
  }
  return quad;
}

// Direction slots: (column-highpass, row-lowpass) -> 15/165 deg,
// (column-highpass, row-highpass) -> 45/135, (column-lowpass, row-highpass) -> 75/105.
void store_bands(std::array<ComplexGrid, 6>& bands, const Image& hl, const Image& hh, const Image& lh) {
  auto z = quad_to_complex(hl);
  bands[0] = std::move(z[0]);
  bands[5] = std::move(z[1]);
  z = quad_to_complex(hh);
  bands[1] = std::move(z[0]);
  bands[4] = std::move(z[1]);
  z = quad_to_complex(lh);
  bands[2] = std::move(z[0]);
  bands[3] = std::move(z[1]);
}

std::array<Image, 4> deinterleave(const Image& quad) {
  const int w = quad.width() / 2;
  const int h = quad.height() / 2;
  std::array<Image, 4> t{Image(w, h), Image(w, h), Image(w, h), Image(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      t[0](x, y) = quad(2 * x, 2 * y);
      t[1](x, y) = quad(2 * x + 1, 2 * y);
      t[2](x, y) = quad(2 * x, 2 * y + 1);
      t[3](x, y) = quad(2 * x + 1, 2 * y + 1);
    }
  }
  return t;
}

Image interleave(const std::array<Image, 4>& t) {
  const int w = t[0].width();
  const int h = t[0].height();
  Image quad(2 * w, 2 * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      quad(2 * x, 2 * y) = t[0](x, y);
      quad(2 * x + 1, 2 * y) = t[1](x, y);
      quad(2 * x, 2 * y + 1) = t[2](x, y);
      quad(2 * x + 1, 2 * y + 1) = t[3](x, y);
    }
  }
  return quad;
}

int round_up(int v, int multiple) { return (v + multiple - 1) / multiple * multiple; }

Image pad_symmetric(const Image& img, int width, int height) {
  if (img.width() == width && img.height() == height) return img;
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = img(reflect(x, img.width()), reflect(y, img.height()));
  }
  return out;
}

}  // namespace

DtcwtPyramid dtcwt_forward(const Image& img, int levels, const FilterBank& fb, Exec exec) {
  if (levels < 1) throw InvalidArgument("dtcwt needs at least one level");
  if (levels > 16 || std::min(img.width(), img.height()) < (1 << levels)) {
    throw InvalidArgument("too many dtcwt levels for the image size");
  }
  DtcwtPyramid pyr;
  pyr.levels = levels;
  pyr.original_width = img.width();
  pyr.original_height = img.height();
  pyr.padded_width = round_up(img.width(), 1 << levels);
  pyr.padded_height = round_up(img.height(), 1 << levels);
  pyr.subbands.resize(static_cast<std::size_t>(levels));

  const Image x = pad_symmetric(img, pyr.padded_width, pyr.padded_height);

  // Level 1: undecimated near-symmetric filtering.
  const Split cols = level1_columns(x, fb.level1_analysis.tree_a, exec);
  Split lo_rows = level1_rows(cols.lo, fb.level1_analysis.tree_a, exec);
  const Split hi_rows = level1_rows(cols.hi, fb.level1_analysis.tree_a, exec);
  store_bands(pyr.subbands[0], hi_rows.lo, hi_rows.hi, lo_rows.hi);
  Image lolo = std::move(lo_rows.lo);

  for (int level = 1; level < levels; ++level) {
    const Split c = qshift_columns(lolo, fb.qshift_analysis, exec);
    Split lr = qshift_rows(c.lo, fb.qshift_analysis, exec);
    const Split hr = qshift_rows(c.hi, fb.qshift_analysis, exec);
    store_bands(pyr.subbands[level], hr.lo, hr.hi, lr.hi);
    lolo = std::move(lr.lo);
  }
  pyr.lowpass = deinterleave(lolo);
  return pyr;
}

Image dtcwt_inverse(const DtcwtPyramid& pyr, const FilterBank& fb, Exec exec) {
  if (pyr.levels < 1 || static_cast<int>(pyr.subbands.size()) != pyr.levels) {
    throw InvalidArgument("pyramid level count does not match its subbands");
  }
  for (int level = 0; level < pyr.levels; ++level) {
    const int w = pyr.padded_width >> (level + 1);
    const int h = pyr.padded_height >> (level + 1);
    for (const auto& band : pyr.subbands[level]) {
      if (band.width() != w || band.height() != h) throw InvalidArgument("pyramid subband has wrong dimensions");
    }
  }
  const int low_w = pyr.padded_width >> pyr.levels;
  const int low_h = pyr.padded_height >> pyr.levels;
  for (const auto& t : pyr.lowpass) {
    if (t.width() != low_w || t.height() != low_h) throw InvalidArgument("pyramid lowpass has wrong dimensions");
  }

  Image lolo = interleave(pyr.lowpass);
  const auto merge_q = [&](std::span<const double> lo, std::span<const double> hi, std::span<double> out) {
    dtcwt_detail::qshift_synthesis(lo, hi, fb.qshift_synthesis, out);
  };
  for (int level = pyr.levels - 1; level >= 1; --level) {
    const auto& b = pyr.subbands[level];
    const Image hl = complex_to_quad(b[0], b[5]);
    const Image hh = complex_to_quad(b[1], b[4]);
    const Image lh = complex_to_quad(b[2], b[3]);
    const Image lo = combine_rows(lolo, lh, 2 * lolo.width(), exec, merge_q);
    const Image hi = combine_rows(hl, hh, 2 * hl.width(), exec, merge_q);
    lolo = combine_columns(lo, hi, 2 * lo.height(), exec, merge_q);
  }

  const auto& b = pyr.subbands[0];
  const Image hl = complex_to_quad(b[0], b[5]);
  const Image hh = complex_to_quad(b[1], b[4]);
  const Image lh = complex_to_quad(b[2], b[3]);
  const auto merge_1 = [&](std::span<const double> lo, std::span<const double> hi, std::span<double> out) {
    level1_merge(lo, hi, fb.level1_synthesis.tree_a, out);
  };
  const Image lo = combine_rows(lolo, lh, lolo.width(), exec, merge_1);
  const Image hi = combine_rows(hl, hh, hl.width(), exec, merge_1);
  const Image full = combine_columns(lo, hi, lo.height(), exec, merge_1);

  if (full.width() == pyr.original_width && full.height() == pyr.original_height) return full;
  Image out(pyr.original_width, pyr.original_height);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(x, y) = full(x, y);
  }
  return out;
}

}  // namespace despeckle
