#include "featdyn/config.hpp"

#include <doctest.h>

#include <sstream>

using namespace featdyn;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment(in, "case.ini");
}

}  // namespace

TEST_CASE("minimal spec uses the library defaults") {
  const ExperimentSpec s = parse("[experiment]\nmodel = classifier\n");
  CHECK(s.model == ModelKind::classifier);
  CHECK(s.name == "case");
  CHECK(s.synthetic.d == 1000);
  CHECK(s.synthetic.n == 30);
  CHECK(s.m == 20);
  CHECK(s.init.sigma0 == 0.001);
  CHECK(s.train.eta == 0.1);
  CHECK(s.output_dir.filename() == "case");
}

TEST_CASE("full diffusion spec") {
  const ExperimentSpec s = parse(R"(
[experiment]
model = diffusion
name = demo
output_dir = /tmp/x/demo

[data]
d = 50
n = 7
mu = 2.5
sigma_xi = 0.5
seed = 9
signal_mode = random_orthogonal

[model]
m = 4
sigma0 = 0.01
init_seed = 3
t = 0.8

[train]
eta = 0.5
eta_units = per_coordinate
iters = 100
record_every = 5
grad_tol = 1e-7
objective = monte_carlo
n_eps = 300

[analysis]
signal_thresh = 2
)");
  CHECK(s.model == ModelKind::diffusion);
  CHECK(s.synthetic.d == 50);
  CHECK(s.synthetic.mu_norm == 2.5);
  CHECK(s.synthetic.signal_mode == SignalMode::random_orthogonal);
  CHECK(s.init.seed == 3);
  CHECK(s.t == 0.8);
  CHECK(s.train.eta_units == EtaUnits::per_coordinate);
  CHECK(s.train.grad_tol == 1e-7);
  CHECK(s.train.objective.kind == ObjectiveKind::monte_carlo);
  CHECK(s.train.objective.n_eps == 300);
  CHECK(s.train.objective.seed == 9);  // defaults to the data seed
  CHECK(s.thresholds.signal == 2.0);
  CHECK(s.output_dir == "/tmp/x/demo");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("[experiment]\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = svm\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = classifier\n[data]\nmu = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = classifier\n[data]\nmuu = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = classifier\n[train]\niters = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = classifier\n[train]\neta_units = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = classifier\n[model]\nseed = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse("model = classifier\n"), ConfigError);
  CHECK_THROWS_AS(parse("[experiment\nmodel = classifier\n"), ConfigError);
  CHECK_THROWS_AS(load_experiment("/nonexistent/spec.ini"), ConfigError);
}

TEST_CASE("mnist source") {
  const ExperimentSpec s = parse(R"(
[experiment]
model = classifier
[data]
source = mnist
mnist_dir = /data/mnist
classes = 3, 8
per_class = 20
test_per_class = 10
snr_tilde = 0.5
pixel_scaling = standardized
seed = 4
)");
  CHECK(s.source == DataSource::mnist);
  CHECK(s.mnist.dir == "/data/mnist");
  CHECK(s.mnist.noisy.classes == std::pair<int, int>{3, 8});
  CHECK(s.mnist.noisy.per_class == 20);
  CHECK(s.mnist.noisy.seed == 4);
  CHECK(s.mnist.noisy.scaling == PixelScaling::standardized);
  CHECK_THROWS_AS(parse("[experiment]\nmodel = classifier\n[data]\nsource = mnist\nclasses = 1\n"), ConfigError);
}

TEST_CASE("sweep spec") {
  std::istringstream in(R"(
[experiment]
model = diffusion
[data]
seed = 2
[sweep]
mu_values = 5, 8, 9.5
models = diffusion, classifier
jobs = 3
)");
  const SweepSpec s = parse_sweep(in, "sw.ini");
  CHECK(s.mu_values == std::vector<double>{5, 8, 9.5});
  CHECK(s.seeds == std::vector<std::uint64_t>{2});
  CHECK(s.models.size() == 2);
  CHECK(s.jobs == 3);

  std::istringstream empty("[experiment]\nmodel = diffusion\n[sweep]\nseeds = 1\n");
  CHECK_THROWS_AS(parse_sweep(empty, "x"), ConfigError);
  std::istringstream mnist("[experiment]\nmodel = diffusion\n[data]\nsource = mnist\n[sweep]\nmu_values = 1\n");
  CHECK_THROWS_AS(parse_sweep(mnist, "x"), ConfigError);
}

TEST_CASE("shipped presets parse") {
  const std::filesystem::path dir = std::filesystem::path(FEATDYN_SOURCE_DIR) / "presets";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    CAPTURE(entry.path().string());
    if (entry.path().stem().string().rfind("sweep", 0) == 0) CHECK_NOTHROW(load_sweep(entry.path()));
    else CHECK_NOTHROW(load_experiment(entry.path()));
    ++count;
  }
  CHECK(count == 6);
}
