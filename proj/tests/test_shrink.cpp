#include <doctest.h>

#include <cmath>
#include <numbers>

#include "despeckle/dtcwt.hpp"
#include "despeckle/shrink.hpp"
#include "despeckle/specksim.hpp"
#include "test_util.hpp"

using namespace despeckle;

namespace {

ComplexGrid gaussian_subband(int w, int h, std::uint64_t seed, double sigma) {
  const Image re = test_util::gaussian_image(w, h, seed, sigma);
  const Image im = test_util::gaussian_image(w, h, seed + 1000, sigma);
  ComplexGrid z(w, h);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = {re[i], im[i]};
  return z;
}

ShrinkageParams params_for(const ComplexGrid& y, double sigma_n2, double s, double k) {
  ShrinkageParams p;
  p.sigma_n2 = sigma_n2;
  p.s_map = Image(y.width(), y.height(), s);
  p.k_map = Image(y.width(), y.height(), k);
  return p;
}

DtcwtPyramid noise_pyramid(double sigma, std::uint64_t seed) {
  DtcwtPyramid p = dtcwt_forward(Image(256, 256, 0.0), 2);
  std::uint64_t s = seed;
  for (auto& level : p.subbands) {
    for (auto& band : level) band = gaussian_subband(band.width(), band.height(), s += 7, sigma);
  }
  return p;
}

}  // namespace

TEST_CASE("MAD noise estimate on Gaussian subbands") {
  const DtcwtPyramid p = noise_pyramid(1.0, 1);
  const double s2 = estimate_noise_sigma2(p);
  CHECK(s2 >= 0.8);
  CHECK(s2 <= 1.2);

  DtcwtPyramid scaled = p;
  for (auto& level : scaled.subbands) {
    for (auto& band : level) {
      for (auto& c : band.pixels()) c *= 3.0;
    }
  }
  CHECK(estimate_noise_sigma2(scaled) == doctest::Approx(9.0 * s2).epsilon(1e-9));

  CHECK(estimate_noise_sigma2(dtcwt_forward(Image(64, 64, 0.0), 2)) == 0.0);
  CHECK_THROWS_AS(estimate_noise_sigma2(DtcwtPyramid{}), InvalidArgument);
}

TEST_CASE("MAD noise estimate of a real transform of white noise") {
  // Every subband component carries about a quarter of the input variance.
  const Image noise = test_util::gaussian_image(256, 256, 3, 2.0);
  const double s2 = estimate_noise_sigma2(dtcwt_forward(noise, 3));
  CHECK(s2 == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("signal scale of pure noise sits at the floor for most coefficients") {
  const ComplexGrid y = gaussian_subband(128, 128, 5, 1.0);
  const Image s = estimate_signal_s(y, 1.0, 7);
  const double floor = signal_floor(y);
  int at_floor = 0;
  for (double v : s.pixels()) {
    REQUIRE(v >= floor);
    if (v == floor) ++at_floor;
  }
  CHECK(at_floor >= static_cast<int>(s.size() / 2));
}

TEST_CASE("signal scale of a constant-magnitude subband without noise") {
  ComplexGrid y(32, 32);
  for (int i = 0; i < static_cast<int>(y.size()); ++i) y[i] = std::polar(2.5, 0.37 * i);
  const Image s = estimate_signal_s(y, 0.0, 5);
  for (double v : s.pixels()) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(estimate_signal_s(y, 0.0, 4), InvalidArgument);
  CHECK_THROWS_AS(estimate_signal_s(y, 0.0, 1), InvalidArgument);
}

TEST_CASE("signal scale serial and parallel agree") {
  const ComplexGrid y = gaussian_subband(40, 30, 9, 2.0);
  CHECK(estimate_signal_s(y, 0.5, 7, Exec::serial) == estimate_signal_s(y, 0.5, 7, Exec::parallel));
}

TEST_CASE("interscale product uses 2x2 replication of the parent") {
  ComplexGrid child(4, 3);
  ComplexGrid parent(2, 2);
  child(3, 2) = {3.0, 0.0};
  parent(1, 1) = {0.0, 2.0};
  child(0, 0) = {0.0, 1.0};
  parent(0, 0) = {1.0, 0.0};
  const InterscaleField f = interscale_product(child, parent);
  CHECK(f.c_grid(3, 2) == 6.0);
  CHECK(f.c_grid(0, 0) == 1.0);
  CHECK(f.nc_grid(3, 2) == 1.0);
  CHECK(f.nc_grid(0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(f.c_grid(1, 1) == 0.0);

  CHECK_THROWS_AS(interscale_product(child, ComplexGrid(3, 2)), InvalidArgument);
  CHECK_THROWS_AS(interscale_product(child, Image(2, 1)), InvalidArgument);
}

TEST_CASE("interscale product of a zero child is zero") {
  const InterscaleField f = interscale_product(ComplexGrid(8, 8), gaussian_subband(4, 4, 1, 1.0));
  for (double v : f.c_grid.pixels()) CHECK(v == 0.0);
  for (double v : f.nc_grid.pixels()) CHECK(v == 0.0);
}

TEST_CASE("normalized product peaks at exactly 1") {
  const InterscaleField f = interscale_product(gaussian_subband(16, 16, 2, 1.0), gaussian_subband(8, 8, 3, 1.0));
  double peak = 0.0;
  for (double v : f.nc_grid.pixels()) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    peak = std::max(peak, v);
  }
  CHECK(peak == 1.0);
}

TEST_CASE("K is the squared cosine") {
  CHECK(compute_k(0.0) == 1.0);
  CHECK(compute_k(1.0) == 0.0);
  CHECK(compute_k(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(compute_k(-0.01), InvalidArgument);
  CHECK_THROWS_AS(compute_k(1.01), InvalidArgument);
  for (int i = 0; i < 20; ++i) CHECK(compute_k(i / 20.0) >= compute_k((i + 1) / 20.0));
}

TEST_CASE("MAP update on a single coefficient") {
  ComplexGrid y(1, 1);
  y[0] = {3.0, 4.0};
  CHECK(map_threshold(0.0, 1.0, 1.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  const ComplexGrid x = shrink_subband(y, params_for(y, 1.0, 1.0, 0.0));
  CHECK(x[0].real() == doctest::Approx(1.9607695).epsilon(1e-7));
  CHECK(x[0].imag() == doctest::Approx(2.6143594).epsilon(1e-7));

  y[0] = {1.0, 0.0};
  CHECK(shrink_subband(y, params_for(y, 1.0, 1.0, 0.0))[0] == std::complex<double>(0.0, 0.0));
  y[0] = {0.0, 0.0};
  CHECK(shrink_subband(y, params_for(y, 1.0, 1.0, 0.0))[0] == std::complex<double>(0.0, 0.0));
}

TEST_CASE("zero noise leaves coefficients untouched") {
  const ComplexGrid y = gaussian_subband(16, 16, 4, 3.0);
  CHECK(shrink_subband(y, params_for(y, 0.0, 1.0, 0.7)) == y);
}

TEST_CASE("shrink_subband rejects mismatched parameter grids") {
  const ComplexGrid y(8, 8);
  ShrinkageParams p = params_for(y, 1.0, 1.0, 0.5);
  p.k_map = Image(8, 7, 0.5);
  CHECK_THROWS_AS(shrink_subband(y, p), InvalidArgument);
}

TEST_CASE("shrinkage preserves phase and reduces magnitude by exactly T") {
  const ComplexGrid y = gaussian_subband(32, 32, 6, 2.0);
  const ShrinkageParams p = params_for(y, 0.8, 1.3, 0.4);
  const double t = map_threshold(0.4, 0.8, 1.3);
  const ComplexGrid x = shrink_subband(y, p);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) <= t) {
      CHECK(x[i] == std::complex<double>(0.0, 0.0));
      continue;
    }
    CHECK(std::abs(std::arg(x[i]) - std::arg(y[i])) < 1e-12);
    CHECK(std::abs(y[i]) - std::abs(x[i]) == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("larger K shrinks more, stronger interscale evidence shrinks less") {
  const ComplexGrid y = gaussian_subband(16, 16, 7, 2.0);
  for (double k : {0.0, 0.2, 0.5, 0.9}) {
    const ComplexGrid a = shrink_subband(y, params_for(y, 1.0, 1.0, k));
    const ComplexGrid b = shrink_subband(y, params_for(y, 1.0, 1.0, k + 0.1));
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(a[i]) >= std::abs(b[i]));
  }
  for (int i = 0; i < 10; ++i) {
    CHECK(map_threshold(compute_k(i / 10.0), 1.0, 1.0) >= map_threshold(compute_k((i + 1) / 10.0), 1.0, 1.0));
  }
}

TEST_CASE("adaptive threshold spans at most a factor e") {
  const double lo = map_threshold(0.0, 2.0, 3.0);
  const double hi = map_threshold(1.0, 2.0, 3.0);
  CHECK(hi / lo == doctest::Approx(std::numbers::e).epsilon(1e-14));
}

TEST_CASE("lowpass magnitude is the tree RMS, nearest resampled") {
  DtcwtPyramid p = dtcwt_forward(Image(64, 64, 1.0), 2);
  for (int t = 0; t < 4; ++t) p.lowpass[t] = Image(16, 16, t == 0 ? 2.0 : 0.0);
  p.lowpass[0](5, 7) = 4.0;
  const Image m = lowpass_magnitude(p, 32, 32);
  CHECK(m(0, 0) == doctest::Approx(1.0));
  CHECK(m(10, 14) == doctest::Approx(2.0));
  CHECK(m(11, 15) == doctest::Approx(2.0));
}

TEST_CASE("shrink_pyramid with zero noise is the identity") {
  const DtcwtPyramid p = dtcwt_forward(generate_phantom(128, 128, PhantomKind::blocks), 3);
  ShrinkConfig cfg;
  cfg.sigma_n2 = 0.0;
  const ShrinkResult r = shrink_pyramid(p, cfg);
  for (int l = 0; l < 3; ++l) {
    for (int d = 0; d < 6; ++d) CHECK(r.pyramid.subbands[l][d] == p.subbands[l][d]);
  }
}

TEST_CASE("shrink_pyramid never grows a coefficient and passes the lowpass through") {
  const Image img = test_util::random_image(128, 128, 11, 0.0, 10.0);
  const DtcwtPyramid p = dtcwt_forward(img, 3);
  const ShrinkResult r = shrink_pyramid(p);
  CHECK(r.sigma_n2 == doctest::Approx(estimate_noise_sigma2(p)));
  REQUIRE(r.mean_k.size() == 3);
  for (double k : r.mean_k) {
    CHECK(k >= 0.0);
    CHECK(k <= 1.0);
  }
  for (int t = 0; t < 4; ++t) CHECK(r.pyramid.lowpass[t] == p.lowpass[t]);
  for (int l = 0; l < 3; ++l) {
    for (int d = 0; d < 6; ++d) {
      for (std::size_t i = 0; i < p.subbands[l][d].size(); ++i) {
        REQUIRE(std::abs(r.pyramid.subbands[l][d][i]) <= std::abs(p.subbands[l][d][i]));
      }
    }
  }
  ShrinkConfig serial;
  serial.exec = Exec::serial;
  CHECK(shrink_pyramid(p, serial).pyramid.subbands[0][2] == r.pyramid.subbands[0][2]);
}
