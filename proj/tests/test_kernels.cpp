#include <doctest.h>

#include <cmath>

#include "despeckle/kernels.hpp"
#include "despeckle/reference.hpp"
#include "test_util.hpp"

using namespace despeckle;
using test_util::max_abs_diff;

TEST_CASE("reflect is half-sample symmetric and periodic") {
  CHECK(kernels::reflect(-1, 5) == 0);
  CHECK(kernels::reflect(-2, 5) == 1);
  CHECK(kernels::reflect(5, 5) == 4);
  CHECK(kernels::reflect(6, 5) == 3);
  CHECK(kernels::reflect(10, 5) == 0);
  CHECK(kernels::reflect(-11, 5) == 0);
  CHECK(kernels::reflect(3, 1) == 0);
  CHECK(kernels::wrap(-1, 5) == 4);
  CHECK(kernels::wrap(12, 5) == 2);
}

TEST_CASE("box_mean: serial, parallel and reference agree") {
  for (int w : {3, 5, 7, 9}) {
    const Image img = test_util::random_image(41, 23, 100 + w, 0.0, 10.0);
    const Image ser = kernels::box_mean(img, w, Exec::serial);
    const Image par = kernels::box_mean(img, w, Exec::parallel);
    CHECK(ser == par);
    CHECK(max_abs_diff(ser, reference::box_mean(img, w)) < 1e-12);
  }
}

TEST_CASE("box_mean handles windows wider than the image") {
  const Image img = test_util::random_image(3, 2, 5);
  CHECK(max_abs_diff(kernels::box_mean(img, 11), reference::box_mean(img, 11)) < 1e-12);
  CHECK_THROWS_AS(kernels::box_mean(img, 4), InvalidArgument);
}

TEST_CASE("frost: serial, parallel and reference agree") {
  const Image img = test_util::random_image(37, 29, 7, 1.0, 100.0);
  for (double damping : {0.1, 1.0, 4.0}) {
    const Image ser = kernels::frost(img, 5, damping, Exec::serial);
    const Image par = kernels::frost(img, 5, damping, Exec::parallel);
    CHECK(ser == par);
    CHECK(max_abs_diff(ser, reference::frost(img, 5, damping)) < 1e-9);
  }
}

TEST_CASE("frost on a constant image is the identity") {
  const Image img(16, 12, 42.0);
  CHECK(kernels::frost(img, 5, 1.0) == img);
  CHECK(reference::frost(img, 5, 1e300) == img);
}

TEST_CASE("frost with huge damping returns the input") {
  const Image img = test_util::random_image(20, 20, 11, 5.0, 50.0);
  CHECK(max_abs_diff(kernels::frost(img, 5, 1e12), img) < 1e-9);
}

TEST_CASE("frost passes zero-mean windows through") {
  Image img(9, 9, 0.0);
  img(8, 8) = 5.0;
  const Image out = kernels::frost(img, 3, 1.0);
  CHECK(out(0, 0) == 0.0);
  CHECK(all_finite(out));
}

TEST_CASE("periodic separable convolution matches the direct 2-D sum") {
  const Image img = test_util::random_image(19, 14, 21);
  const std::vector<double> k{0.1, 0.2, 0.4, 0.2, 0.1};
  const Image ser = kernels::convolve_periodic_separable(img, k, Exec::serial);
  const Image par = kernels::convolve_periodic_separable(img, k, Exec::parallel);
  CHECK(ser == par);
  CHECK(max_abs_diff(ser, reference::convolve_periodic(img, k)) < 1e-12);
}

TEST_CASE("complex convolution acts on real and imaginary parts independently") {
  const Image re = test_util::random_image(12, 10, 1);
  const Image im = test_util::random_image(12, 10, 2);
  ComplexGrid z(12, 10);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = {re[i], im[i]};
  const std::vector<double> k{0.25, 0.5, 0.25};
  const ComplexGrid out = kernels::convolve_periodic_separable(z, k);
  const Image cre = reference::convolve_periodic(re, k);
  const Image cim = reference::convolve_periodic(im, k);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(std::abs(out[i].real() - cre[i]) < 1e-12);
    CHECK(std::abs(out[i].imag() - cim[i]) < 1e-12);
  }
}

TEST_CASE("for_each_line visits every line once") {
  std::vector<int> hits(100, 0);
  kernels::for_each_line(100, Exec::parallel, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}
