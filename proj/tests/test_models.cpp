#include "featdyn/models.hpp"
#include "featdyn/types.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace featdyn;

TEST_CASE("classifier forward by hand") {
  // m = 2, d = 2. f_j = (1/m) sum_r (<w,x1>^2 + <w,x2>^2)
  ClassifierParams p = ClassifierParams::zeros(2, 2);
  p.w_pos << 1, 0, 0, 2;
  p.w_neg << 1, 1, 0, 0;
  Sample s{Vector(2), Vector(2), 1};
  s.x1 << 1, 1;
  s.x2 << 1, -1;
  const auto out = classifier_forward(p, s);
  // pos: x1 -> (1, 2), x2 -> (1, -2): (1 + 4 + 1 + 4) / 2 = 5
  CHECK(out.f_pos == doctest::Approx(5.0));
  // neg: x1 -> (2, 0), x2 -> (0, 0): 4 / 2 = 2
  CHECK(out.f_neg == doctest::Approx(2.0));
  CHECK(out.f == doctest::Approx(3.0));
}

TEST_CASE("denoiser patch by hand") {
  // f(x) = (1/sqrt m) sum_r <w_r,x>^2 w_r
  Matrix w(2, 2);
  w << 1, 2, 0, 1;
  Vector x(2);
  x << 1, 1;
  // s = (3, 1): (9 * (1,2) + 1 * (0,1)) / sqrt 2
  const Vector f = denoiser_patch(w, x);
  CHECK(f[0] == doctest::Approx(9.0 / std::sqrt(2.0)));
  CHECK(f[1] == doctest::Approx(19.0 / std::sqrt(2.0)));

  DenoiserParams p{w};
  const auto [f1, f2] = denoiser_forward(p, x, -x);
  CHECK(f1 == f);
  CHECK(f2 == f);  // even in x
}

TEST_CASE("shape mismatches throw") {
  ClassifierParams p = ClassifierParams::zeros(2, 3);
  Sample s{Vector::Zero(4), Vector::Zero(4), 1};
  CHECK_THROWS_AS(classifier_forward(p, s), ShapeError);
  CHECK_THROWS_AS(denoiser_patch(Matrix::Zero(2, 3), Vector::Zero(2)), ShapeError);
}

TEST_CASE("gaussian init statistics and determinism") {
  const InitConfig init{0.5, 21};
  const Matrix a = init_gaussian(50, 200, init);
  const Matrix b = init_gaussian(50, 200, init);
  CHECK(a == b);
  const double var = a.squaredNorm() / static_cast<double>(a.size());
  CHECK(var == doctest::Approx(0.25).epsilon(0.03));
  CHECK(std::abs(a.mean()) < 0.01);

  const ClassifierParams c = init_classifier(4, 10, init);
  CHECK(c.w_pos != c.w_neg);
  CHECK_THROWS_AS(init_gaussian(0, 3, init), ConfigError);
  CHECK_THROWS_AS(init_gaussian(2, 3, {0.0, 1}), ConfigError);
}

TEST_CASE("checkpoint round trip is exact") {
  const ClassifierParams c = init_classifier(3, 7, {0.123, 4});
  const CheckpointHeader h{3, 7, 0.123, 4, 250};
  std::stringstream buf;
  write_checkpoint(buf, h, c);
  const auto [h2, c2] = read_classifier_checkpoint(buf);
  CHECK(c2.w_pos == c.w_pos);
  CHECK(c2.w_neg == c.w_neg);
  CHECK(h2.m == 3);
  CHECK(h2.d == 7);
  CHECK(h2.iteration == 250);
  CHECK(h2.seed == 4);

  const DenoiserParams dp = init_denoiser(2, 5, {1e-3, 8});
  std::stringstream buf2;
  write_checkpoint(buf2, {2, 5, 1e-3, 8, 0}, dp);
  const std::string text = buf2.str();
  std::istringstream in(text);
  CHECK(read_denoiser_checkpoint(in).second.w == dp.w);

  std::istringstream wrong(text);
  CHECK_THROWS_AS(read_classifier_checkpoint(wrong), FormatError);
}

TEST_CASE("truncated checkpoint is rejected") {
  const DenoiserParams dp = init_denoiser(3, 4, {1.0, 2});
  std::stringstream buf;
  write_checkpoint(buf, {3, 4, 1.0, 2, 0}, dp);
  std::string text = buf.str();
  text.erase(text.rfind('\n', text.size() - 2) + 1);  // drop the last row
  std::istringstream in(text);
  CHECK_THROWS_AS(read_denoiser_checkpoint(in), FormatError);
}

TEST_CASE("frobenius norm and finiteness") {
  ClassifierParams p = ClassifierParams::zeros(1, 2);
  p.w_pos << 3, 0;
  p.w_neg << 0, 4;
  CHECK(frobenius_norm(p) == doctest::Approx(5.0));
  CHECK(all_finite(p));
  p.w_neg(0, 0) = std::nan("");
  CHECK_FALSE(all_finite(p));
}
