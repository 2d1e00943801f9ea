#include "despeckle/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace despeckle::kernels {
namespace {

void require_odd_window(int window) {
  if (window < 1 || window % 2 == 0) throw InvalidArgument("window must be a positive odd integer");
}

template <typename T>
Grid<T> convolve_periodic_impl(const Grid<T>& in, std::span<const double> kernel, Exec exec) {
  if (kernel.empty() || kernel.size() % 2 == 0) throw InvalidArgument("kernel length must be odd");
  const int w = in.width();
  const int h = in.height();
  const int half = static_cast<int>(kernel.size() / 2);

  Grid<T> tmp(w, h);
  for_each_line(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      T acc{};
      for (int k = -half; k <= half; ++k) acc += kernel[k + half] * in(wrap(x - k, w), y);
      tmp(x, y) = acc;
    }
  });

  Grid<T> out(w, h);
  for_each_line(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      T acc{};
      for (int k = -half; k <= half; ++k) acc += kernel[k + half] * tmp(x, wrap(y - k, h));
      out(x, y) = acc;
    }
  });
  return out;
}

}  // namespace

void for_each_line(int count, Exec exec, const std::function<void(int)>& fn) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i) fn(i);
  } else {
    for (int i = 0; i < count; ++i) fn(i);
  }
}

Image box_mean(const Image& in, int window, Exec exec) {
  require_odd_window(window);
  const int w = in.width();
  const int h = in.height();
  const int half = window / 2;

  Image rows(w, h);
  for_each_line(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += in(reflect(x + k, w), y);
      rows(x, y) = acc;
    }
  });

  const double norm = 1.0 / (static_cast<double>(window) * window);
  Image out(w, h);
  for_each_line(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += rows(x, reflect(y + k, h));
      out(x, y) = acc * norm;
    }
  });
  return out;
}

Image frost(const Image& in, int window, double damping, Exec exec) {
  require_odd_window(window);
  if (!(damping > 0.0)) throw InvalidArgument("frost damping must be positive");
  const int w = in.width();
  const int h = in.height();
  const int half = window / 2;

  Image squares(w, h);
  for (std::size_t i = 0; i < in.size(); ++i) squares[i] = in[i] * in[i];
  const Image local_mean = box_mean(in, window, exec);
  const Image local_sq = box_mean(squares, window, exec);

  Image out(w, h);
  for_each_line(h, exec, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const double mu = local_mean(x, y);
      if (mu == 0.0) {
        out(x, y) = in(x, y);
        continue;
      }
      const double var = std::max(0.0, local_sq(x, y) - mu * mu);
      const double rate = var == 0.0 ? 0.0 : damping * var / (mu * mu);
      double num = 0.0;
      double den = 0.0;
      for (int dy = -half; dy <= half; ++dy) {
        const int yy = reflect(y + dy, h);
        for (int dx = -half; dx <= half; ++dx) {
          const int d = std::max(std::abs(dx), std::abs(dy));
          const double m = d == 0 ? 1.0 : std::exp(-rate * d);
          num += m * in(reflect(x + dx, w), yy);
          den += m;
        }
      }
      out(x, y) = num / den;
    }
  });
  return out;
}

Image convolve_periodic_separable(const Image& in, std::span<const double> kernel, Exec exec) {
  return convolve_periodic_impl(in, kernel, exec);
}

ComplexGrid convolve_periodic_separable(const ComplexGrid& in, std::span<const double> kernel,
                                        Exec exec) {
  return convolve_periodic_impl(in, kernel, exec);
}

}  // namespace despeckle::kernels
