#include <doctest.h>

#include "despeckle/metrics.hpp"
#include "despeckle/specksim.hpp"
#include "test_util.hpp"

using namespace despeckle;

TEST_CASE("snr examples") {
  CHECK(snr_db(Image(2, 1, 1.0), Image(2, 1, 0.0)) == doctest::Approx(0.0));
  const Image ref = test_util::random_image(16, 16, 1, 1.0, 2.0);
  CHECK(snr_db(ref, ref) == kSnrCapDb);
  CHECK_THROWS_AS(snr_db(Image(4, 4, 0.0), ref), InvalidArgument);
  CHECK_THROWS_AS(snr_db(ref, Image(4, 4, 0.0)), InvalidArgument);
}

TEST_CASE("ten times the error costs exactly 20 dB") {
  const Image ref = test_util::random_image(32, 32, 2, 10.0, 20.0);
  const Image err = test_util::gaussian_image(32, 32, 3);
  Image a = ref;
  Image b = ref;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    a[i] += err[i];
    b[i] += 10.0 * err[i];
  }
  CHECK(snr_db(ref, a) - snr_db(ref, b) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("snr strictly decreases with growing noise") {
  const Image ref = generate_phantom(64, 64, PhantomKind::disks);
  const Image err = test_util::gaussian_image(64, 64, 4);
  double last = kSnrCapDb;
  for (double sigma : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    Image t = ref;
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += sigma * err[i];
    const double s = snr_db(ref, t);
    CHECK(s < last);
    last = s;
  }
}

TEST_CASE("laplacian") {
  CHECK(laplacian(Image(5, 4, 3.7)) == Image(5, 4, 0.0));
  Image img(5, 5, 0.0);
  img(2, 2) = 1.0;
  const Image l = laplacian(img);
  CHECK(l(2, 2) == -4.0);
  CHECK(l(1, 2) == 1.0);
  CHECK(l(2, 3) == 1.0);
  CHECK(l(1, 1) == 0.0);
  Image corner(3, 3, 0.0);
  corner(0, 0) = 1.0;
  // Symmetric borders mirror the corner pixel onto itself twice.
  CHECK(laplacian(corner)(0, 0) == -2.0);
}

TEST_CASE("beta examples") {
  const Image ref = generate_phantom(64, 64, PhantomKind::disks);
  CHECK(beta(ref, ref) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(beta(ref, Image(64, 64, 5.0)) == 0.0);
  Image shifted = ref;
  for (double& v : shifted.pixels()) v += 17.0;
  CHECK(beta(ref, shifted) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(beta(Image(2, 5, 1.0), Image(2, 5, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(beta(ref, Image(63, 64, 1.0)), InvalidArgument);
}

TEST_CASE("beta is invariant to offset and positive scale, and bounded") {
  const Image ref = generate_phantom(64, 64, PhantomKind::blocks);
  SpeckleSpec spec;
  spec.seed = 9;
  const Image t = apply_speckle(ref, spec);
  const double b = beta(ref, t);
  Image t2 = t;
  for (double& v : t2.pixels()) v = 3.0 * v - 40.0;
  CHECK(beta(ref, t2) == doctest::Approx(b).epsilon(1e-12));
  CHECK(b >= -1.0);
  CHECK(b <= 1.0);
  Image neg = ref;
  for (double& v : neg.pixels()) v = -v;
  CHECK(beta(ref, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("mse") {
  const Image a = test_util::random_image(8, 8, 5);
  const Image b = test_util::random_image(8, 8, 6);
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(Image(1, 1, 0.0), Image(1, 1, 2.0)) == 4.0);
  CHECK(mse(a, b) == mse(b, a));
  CHECK_THROWS_AS(mse(a, Image(8, 7)), InvalidArgument);
}

TEST_CASE("evaluate bundles the three metrics") {
  const Image a = generate_phantom(32, 32, PhantomKind::gradient);
  const Image b = test_util::random_image(32, 32, 7, 20.0, 200.0);
  const MetricsReport r = evaluate(a, b);
  CHECK(r.snr_db == snr_db(a, b));
  CHECK(r.beta == beta(a, b));
  CHECK(r.mse == mse(a, b));
}
