#include "despeckle/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "despeckle/kernels.hpp"

namespace despeckle::reference {

using kernels::reflect;
using kernels::wrap;

Image box_mean(const Image& in, int window) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("window must be a positive odd integer");
  const int half = window / 2;
  Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx) {
          acc += in(reflect(x + dx, in.width()), reflect(y + dy, in.height()));
        }
      }
      out(x, y) = acc / (window * window);
    }
  }
  return out;
}

Image frost(const Image& in, int window, double damping) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("window must be a positive odd integer");
  if (!(damping > 0.0)) throw InvalidArgument("frost damping must be positive");
  const int half = window / 2;
  const int n = window * window;
  std::vector<double> values(static_cast<std::size_t>(n));
  std::vector<int> dist(static_cast<std::size_t>(n));

  Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      int k = 0;
      for (int dy = -half; dy <= half; ++dy) {
        for (int dx = -half; dx <= half; ++dx, ++k) {
          values[k] = in(reflect(x + dx, in.width()), reflect(y + dy, in.height()));
          dist[k] = std::max(std::abs(dx), std::abs(dy));
        }
      }
      double mu = 0.0;
      for (double v : values) mu += v;
      mu /= n;
      if (mu == 0.0) {
        out(x, y) = in(x, y);
        continue;
      }
      double var = 0.0;
      for (double v : values) var += (v - mu) * (v - mu);
      var /= n;
      double num = 0.0;
      double den = 0.0;
      for (int i = 0; i < n; ++i) {
        const double rate = var == 0.0 ? 0.0 : damping * var / (mu * mu);
        const double m = dist[i] == 0 ? 1.0 : std::exp(-rate * dist[i]);
        num += m * values[i];
        den += m;
      }
      out(x, y) = num / den;
    }
  }
  return out;
}

Image convolve_periodic(const Image& in, std::span<const double> kernel) {
  const int half = static_cast<int>(kernel.size() / 2);
  Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int ky = -half; ky <= half; ++ky) {
        for (int kx = -half; kx <= half; ++kx) {
          acc += kernel[ky + half] * kernel[kx + half] *
                 in(wrap(x - kx, in.width()), wrap(y - ky, in.height()));
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace despeckle::reference
