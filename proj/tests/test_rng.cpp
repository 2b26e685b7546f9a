#include "featdyn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace featdyn;

TEST_CASE("same seed gives the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
}

TEST_CASE("streams of one seed differ") {
  Rng a = make_stream(7, StreamId::labels);
  Rng b = make_stream(7, StreamId::noise);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a() == b();
  CHECK(equal == 0);
}

TEST_CASE("uniform stays in [0, 1) with mean 1/2") {
  Rng rng(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // std error of the mean is sqrt(1/12 / n) ~ 6.5e-4
  CHECK(std::abs(sum / n - 0.5) < 4e-3);
}

TEST_CASE("normal draws have unit variance and zero skew") {
  Rng rng(11);
  const int n = 400000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z, s2 += z * z, s3 += z * z * z, s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
  CHECK(std::abs(s3 / n) < 0.03);
  CHECK(std::abs(s4 / n - 3.0) < 0.05);
}

TEST_CASE("rademacher is balanced +-1") {
  Rng rng(5);
  int sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const int r = rng.rademacher();
    REQUIRE((r == 1 || r == -1));
    sum += r;
  }
  CHECK(std::abs(sum) < 1500);  // ~4.7 sigma
}
