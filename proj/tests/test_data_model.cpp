#include "featdyn/data_model.hpp"
#include "featdyn/types.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace featdyn;

TEST_CASE("axis aligned signals") {
  const SignalPair p = make_signals(5, 3.0);
  CHECK(p.mu_pos.norm() == doctest::Approx(3.0));
  CHECK(p.mu_neg.norm() == doctest::Approx(3.0));
  CHECK(p.mu_pos.dot(p.mu_neg) == 0.0);
  CHECK(p.mu_pos[0] == 3.0);
  CHECK(p.mu_neg[1] == 3.0);
}

TEST_CASE("random orthogonal signals") {
  Rng rng(9);
  const SignalPair p = make_random_signals(50, 2.0, rng);
  CHECK(p.mu_pos.norm() == doctest::Approx(2.0));
  CHECK(p.mu_neg.norm() == doctest::Approx(2.0));
  CHECK(std::abs(p.mu_pos.dot(p.mu_neg)) < 1e-12);
}

TEST_CASE("noise patches are orthogonal to both signals") {
  SyntheticConfig cfg{40, 12, 4.0, 1.0, 3, SignalMode::random_orthogonal};
  const Dataset data = generate_dataset(cfg);
  const auto& s = *data.signals();
  for (const Sample& x : data.samples()) {
    CHECK(std::abs(x.x2.dot(s.mu_pos)) < 1e-10);
    CHECK(std::abs(x.x2.dot(s.mu_neg)) < 1e-10);
  }
}

TEST_CASE("dataset shape and label to signal mapping") {
  SyntheticConfig cfg{20, 16, 5.0, 1.0, 1};
  const Dataset data = generate_dataset(cfg);
  CHECK(data.size() == 16);
  CHECK(data.dim() == 20);
  CHECK(data.signal_patches().rows() == 16);
  CHECK(data.noise_patches().cols() == 20);
  for (const Sample& x : data.samples()) {
    const Vector& mu = x.label == 1 ? data.signals()->mu_pos : data.signals()->mu_neg;
    CHECK(x.x1 == mu);
  }
}

TEST_CASE("generation is deterministic per seed") {
  SyntheticConfig cfg{30, 8, 5.0, 1.0, 17};
  std::ostringstream a, b, c;
  write_dataset_csv(generate_dataset(cfg), a);
  write_dataset_csv(generate_dataset(cfg), b);
  cfg.seed = 18;
  write_dataset_csv(generate_dataset(cfg), c);
  CHECK(a.str() == b.str());
  CHECK(a.str() != c.str());
}

TEST_CASE("test set is independent of the training draw") {
  SyntheticConfig cfg{30, 8, 5.0, 1.0, 17};
  const Dataset train = generate_dataset(cfg);
  const Dataset test = generate_test_set(cfg, 8, cfg.seed);
  CHECK(test.size() == 8);
  CHECK(train[0].x2 != test[0].x2);
}

TEST_CASE("noise variance is sigma^2 off the signal plane") {
  SyntheticConfig cfg{400, 200, 1.0, 0.5, 2};
  const Dataset data = generate_dataset(cfg);
  const double mean_sq = data.noise_patches().rowwise().squaredNorm().mean();
  // (d - 2) sigma^2 in expectation
  CHECK(mean_sq == doctest::Approx(398 * 0.25).epsilon(0.02));
}

TEST_CASE("n SNR^2 at the shipped presets") {
  CHECK(snr_quantities({1000, 30, 5.0, 1.0, 0}).n_snr2 == doctest::Approx(0.75));
  CHECK(snr_quantities({1000, 30, 15.0, 1.0, 0}).n_snr2 == doctest::Approx(6.75));
  CHECK(snr_quantities({1000, 30, 8.0, 1.0, 0}).n_snr2 == doctest::Approx(1.92));
  CHECK(snr_quantities({1000, 30, 12.0, 1.0, 0}).n_snr2 == doctest::Approx(4.32));
}

TEST_CASE("invalid synthetic configs") {
  CHECK_THROWS_AS(generate_dataset({2, 5, 1.0, 1.0, 0}), ConfigError);
  CHECK_THROWS_AS(generate_dataset({10, 0, 1.0, 1.0, 0}), ConfigError);
  CHECK_THROWS_AS(generate_dataset({10, 5, 0.0, 1.0, 0}), ConfigError);
  CHECK_THROWS_AS(generate_dataset({10, 5, 1.0, -1.0, 0}), ConfigError);
}

TEST_CASE("dataset rejects mixed dimensions and bad labels") {
  Sample a{Vector::Zero(3), Vector::Zero(3), 1};
  Sample b{Vector::Zero(4), Vector::Zero(4), 1};
  CHECK_THROWS_AS(Dataset({a, b}, std::nullopt), ShapeError);
  Sample c{Vector::Zero(3), Vector::Zero(3), 0};
  CHECK_THROWS_AS(Dataset({a, c}, std::nullopt), ConfigError);
}
