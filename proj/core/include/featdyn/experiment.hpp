#pragma once

#include "featdyn/config.hpp"
#include "featdyn/objectives.hpp"
#include "featdyn/trainer.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace featdyn {

/// Stable process exit codes of the command line entry points.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumeric = 3 };

struct ExperimentData {
  Dataset train;
  Dataset test;   // may be empty
  double n_snr2;  // synthetic: n ||mu||^2 / (sigma^2 d); MNIST: empirical n mean||x1||^2 / mean||x2||^2
};

ExperimentData prepare_data(const ExperimentSpec& spec);

struct ExperimentResult {
  ModelKind model = ModelKind::classifier;
  std::vector<TrajectoryRecord> records;
  StopReason stop_reason = StopReason::max_iters;
  long iterations_run = 0;
  Phase phase = Phase::balanced;
  double n_snr2 = 0.0;
  double train_accuracy;  // NaN for the denoiser
  double test_accuracy;   // NaN for the denoiser or without a test set
  std::optional<ClassifierParams> classifier;  // final parameters
  std::optional<DenoiserParams> denoiser;
  double seconds = 0.0;

  const FeatureMetrics& final_metrics() const { return records.back().metrics; }
};

ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentData& data);

/// summary.csv columns.
inline constexpr std::string_view kSummaryCsvHeader =
    "name,model,source,n_snr2,phase,stop_reason,iterations,train_accuracy,test_accuracy";

/// trajectory.csv, summary.csv, params_final.csv, plot.svg and, for
/// Noisy-MNIST, gradient maps (classifier) or reconstructions (denoiser).
void write_outputs(const ExperimentSpec& spec, const ExperimentData& data, const ExperimentResult& result);

int cmd_run(const std::filesystem::path& spec_file, std::ostream& out, std::ostream& err);

struct SweepCell {
  ModelKind model;
  double mu;
  std::uint64_t seed;
  double n_snr2 = 0.0;
  double ratio = 0.0;
  double test_accuracy = 0.0;
  std::string phase;
  std::string status;  // "ok", "nonfinite" or "failed: ..."
};

/// Runs every (model, mu, seed) cell; failing cells are marked and the sweep
/// continues. Writes one subdirectory per cell plus ratio_vs_nsnr2.csv and
/// ratio_vs_nsnr2.svg under base.output_dir.
std::vector<SweepCell> run_sweep(const SweepSpec& sweep, std::ostream& log);

int cmd_sweep(const std::filesystem::path& sweep_file, std::optional<int> jobs, std::ostream& out,
              std::ostream& err);

using DiffusionGradFn = std::function<DenoiserParams(const DenoiserParams&, const Dataset&, const NoiseSchedule&)>;

struct GradcheckOptions {
  int instances = 100;     // FD instances, classifier and denoiser each
  int mc_instances = 5;    // closed form vs Monte-Carlo instances
  int mc_draws = 200000;
  std::uint64_t seed = 20240601;
  double fd_tol = 1e-6;
  double mc_sigmas = 3.0;
  std::filesystem::path csv;  // empty: no report
  /// Analytic denoiser gradient under test (swap in a faulty one to check
  /// that the harness notices).
  DiffusionGradFn diffusion_grad;
};

struct GradcheckReport {
  double worst_classifier = 0.0;
  double worst_diffusion = 0.0;
  double worst_mc_sigmas = 0.0;  // max |exact - mc| / std_err
  std::vector<GradcheckEntry> worst;  // worst coordinate of each failing instance
  bool passed = false;
  double seconds = 0.0;
};

GradcheckReport run_gradcheck(const GradcheckOptions& options);

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err);

/// SVG line chart of `columns` against the iter column (or the first column
/// when there is none).
int emit_plot(const std::filesystem::path& csv, const std::vector<std::string>& columns,
              const std::filesystem::path& out_file, bool log_x, std::ostream& err);

}  // namespace featdyn
