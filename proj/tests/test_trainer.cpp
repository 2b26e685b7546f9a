#include "featdyn/trainer.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace featdyn;

TEST_CASE("recording grid is powers of two plus multiples") {
  std::vector<long> got;
  for (long k = 0; k <= 40; ++k)
    if (is_record_iteration(k, 10)) got.push_back(k);
  CHECK(got == std::vector<long>{0, 1, 2, 4, 8, 10, 16, 20, 30, 32, 40});
}

TEST_CASE("step size units") {
  TrainConfig cfg;
  cfg.eta = 0.5;
  CHECK(cfg.step_size(1000) == 0.5);
  cfg.eta_units = EtaUnits::per_coordinate;
  CHECK(cfg.step_size(1000) == doctest::Approx(5e-4));
  CHECK(cfg.tolerance(2.0) == doctest::Approx(2e-4));
  cfg.grad_tol = 0.3;
  CHECK(cfg.tolerance(2.0) == 0.3);
}

TEST_CASE("invalid train configs") {
  TrainConfig cfg;
  cfg.eta = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.objective.kind = ObjectiveKind::monte_carlo;
  cfg.objective.n_eps = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("eta = 0 leaves the trajectory flat") {
  const Dataset data = generate_dataset({20, 6, 3.0, 1.0, 1});
  TrainConfig cfg;
  cfg.eta = 0.0;
  cfg.iters = 16;
  cfg.record_every = 4;
  const auto tr = train_classifier(init_classifier(3, 20, {0.1, 2}), data, cfg);
  CHECK(tr.stop_reason == StopReason::max_iters);
  CHECK(tr.iterations_run == 16);
  for (const auto& r : tr.records) CHECK(r.loss == tr.records.front().loss);
}

TEST_CASE("gradient descent lowers the classification loss") {
  const Dataset data = generate_dataset({50, 10, 4.0, 1.0, 3});
  TrainConfig cfg;
  cfg.eta = 0.1;
  cfg.iters = 200;
  const auto tr = train_classifier(init_classifier(5, 50, {0.05, 4}), data, cfg);
  CHECK(tr.records.back().loss < 0.5 * tr.records.front().loss);
  for (std::size_t k = 1; k < tr.records.size(); ++k) CHECK(tr.records[k].loss <= tr.records[k - 1].loss + 1e-12);
}

TEST_CASE("denoiser stops at the gradient tolerance") {
  const Dataset data = generate_dataset({10, 4, 2.0, 0.3, 5});
  TrainConfig cfg;
  cfg.eta = 0.05;
  cfg.iters = 200000;
  cfg.record_every = 1000;
  cfg.rel_grad_tol = 1e-3;
  const auto tr = train_denoiser(init_denoiser(2, 10, {0.3, 6}), data, make_schedule(0.2), cfg);
  REQUIRE(tr.stop_reason == StopReason::grad_tol);
  CHECK(tr.records.back().grad_norm <= 1e-3 * tr.records.front().grad_norm);
  CHECK(tr.records.back().iter == tr.iterations_run);
  CHECK(tr.records.back().loss < tr.records.front().loss);
}

TEST_CASE("divergence is reported with the partial trajectory") {
  const Dataset data = generate_dataset({20, 6, 5.0, 1.0, 7});
  TrainConfig cfg;
  cfg.eta = 1e6;
  cfg.iters = 1000;
  const auto tr = train_denoiser(init_denoiser(3, 20, {0.5, 8}), data, make_schedule(0.2), cfg);
  CHECK(tr.stop_reason == StopReason::nonfinite);
  CHECK(tr.iterations_run < 1000);
  CHECK(tr.records.size() >= 2);
  CHECK(std::isfinite(tr.records.front().loss));
}

TEST_CASE("snapshots line up with records") {
  const Dataset data = generate_dataset({20, 6, 5.0, 1.0, 9});
  TrainConfig cfg;
  cfg.iters = 20;
  cfg.record_every = 5;
  cfg.keep_snapshots = true;
  const auto tr = train_classifier(init_classifier(2, 20, {0.01, 1}), data, cfg);
  REQUIRE(tr.snapshots.size() == tr.records.size());
  CHECK(tr.snapshots.back().w_pos == tr.final_params.w_pos);
}

TEST_CASE("Monte-Carlo objective tracks the exact one") {
  const Dataset data = generate_dataset({12, 4, 3.0, 0.5, 10});
  const DenoiserParams p0 = init_denoiser(2, 12, {0.3, 11});
  TrainConfig cfg;
  cfg.eta = 0.05;
  cfg.iters = 300;
  cfg.record_every = 300;
  cfg.grad_tol = 0.0;
  const auto exact = train_denoiser(p0, data, make_schedule(0.3), cfg);
  cfg.objective = {ObjectiveKind::monte_carlo, 4000, 12};
  const auto mc = train_denoiser(p0, data, make_schedule(0.3), cfg);
  const double moved = (exact.final_params.w - p0.w).norm();
  CHECK(moved > 0.05);
  CHECK((mc.final_params.w - exact.final_params.w).norm() < 0.1 * moved);
}

TEST_CASE("trajectory csv schema") {
  const Dataset data = generate_dataset({20, 6, 5.0, 1.0, 9});
  TrainConfig cfg;
  cfg.iters = 3;
  const auto tr = train_classifier(init_classifier(2, 20, {0.01, 1}), data, cfg);
  std::ostringstream out;
  write_trajectory_csv(out, tr.records);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  CHECK(header == kMetricsCsvHeader);
  int rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
  }
  CHECK(rows == static_cast<int>(tr.records.size()));
}
