#pragma once

#include "featdyn/analysis.hpp"
#include "featdyn/data_model.hpp"
#include "featdyn/mnist.hpp"
#include "featdyn/models.hpp"
#include "featdyn/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace featdyn {

enum class ModelKind { classifier, diffusion };
enum class DataSource { synthetic, mnist };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct MnistSource {
  std::filesystem::path dir;
  NoisyMnistConfig noisy;
  int test_per_class = 200;  // drawn from the t10k files
};

struct ExperimentSpec {
  std::string name = "experiment";
  ModelKind model = ModelKind::classifier;
  DataSource source = DataSource::synthetic;
  SyntheticConfig synthetic;
  int n_test = 3000;  // fresh synthetic test samples (classifier accuracy)
  MnistSource mnist;
  int m = 20;
  InitConfig init;
  double t = 0.2;  // diffusion time, diffusion only
  TrainConfig train;
  PhaseThresholds thresholds;
  std::filesystem::path output_dir;

  void validate() const;
};

struct SweepSpec {
  ExperimentSpec base;
  std::vector<double> mu_values;
  std::vector<std::uint64_t> seeds;
  std::vector<ModelKind> models;
  int jobs = 1;

  void validate() const;
};

/// INI text -> spec. Unknown sections or keys are configuration errors so a
/// typo never silently falls back to a default. `origin` names the source in
/// diagnostics and provides the default experiment name.
ExperimentSpec parse_experiment(std::istream& in, const std::string& origin = "spec");
SweepSpec parse_sweep(std::istream& in, const std::string& origin = "sweep");

ExperimentSpec load_experiment(const std::filesystem::path& file);
SweepSpec load_sweep(const std::filesystem::path& file);

/// Output root: $FEATDYN_OUT when set, else ./out.
std::filesystem::path default_output_root();
/// MNIST directory: $FEATDYN_MNIST_DIR when set, else ./data/mnist.
std::filesystem::path default_mnist_dir();

}  // namespace featdyn
