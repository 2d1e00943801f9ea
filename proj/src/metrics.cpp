#include "despeckle/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "despeckle/error.hpp"
#include "despeckle/kernels.hpp"

namespace despeckle {
namespace {

void require_same_dims(const Image& a, const Image& b) {
  if (!a.same_dims(b)) throw InvalidArgument("reference and test images differ in size");
}

}  // namespace

double snr_db(const Image& reference, const Image& test) {
  require_same_dims(reference, test);
  double signal = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    signal += reference[i] * reference[i];
    const double d = reference[i] - test[i];
    error += d * d;
  }
  if (signal == 0.0) throw InvalidArgument("SNR reference is all zero");
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / error));
}

Image laplacian(const Image& img) {
  const int w = img.width();
  const int h = img.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const int ym = kernels::reflect(y - 1, h);
    const int yp = kernels::reflect(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = kernels::reflect(x - 1, w);
      const int xp = kernels::reflect(x + 1, w);
      // Paired sums keep the response of a constant exactly zero.
      out(x, y) = (img(xm, y) + img(xp, y)) + (img(x, ym) + img(x, yp)) - 4.0 * img(x, y);
    }
  }
  return out;
}

double beta(const Image& reference, const Image& test) {
  require_same_dims(reference, test);
  if (reference.width() < 3 || reference.height() < 3) throw InvalidArgument("beta needs at least 3x3 images");
  const Image lr = laplacian(reference);
  const Image lt = laplacian(test);
  const double mr = mean(lr);
  const double mt = mean(lt);
  double cross = 0.0;
  double vr = 0.0;
  double vt = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i) {
    const double a = lr[i] - mr;
    const double b = lt[i] - mt;
    cross += a * b;
    vr += a * a;
    vt += b * b;
  }
  if (vr == 0.0 || vt == 0.0) return 0.0;
  return std::clamp(cross / std::sqrt(vr * vt), -1.0, 1.0);
}

double mse(const Image& reference, const Image& test) {
  require_same_dims(reference, test);
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - test[i];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.size());
}

MetricsReport evaluate(const Image& reference, const Image& test) {
  return {snr_db(reference, test), beta(reference, test), mse(reference, test)};
}

}  // namespace despeckle
