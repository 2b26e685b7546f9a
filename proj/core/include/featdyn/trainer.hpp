#pragma once

#include "featdyn/analysis.hpp"
#include "featdyn/data_model.hpp"
#include "featdyn/models.hpp"
#include "featdyn/objectives.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace featdyn {

enum class ObjectiveKind { exact, monte_carlo };

struct ObjectiveMode {
  ObjectiveKind kind = ObjectiveKind::exact;
  int n_eps = 2000;
  std::uint64_t seed = 0;  // diffusion-noise stream for monte_carlo
};

/// raw: w -= eta * grad. per_coordinate: the step is taken on the loss
/// averaged over coordinates (an elementwise mean-squared error), i.e.
/// w -= (eta / d) * grad.
enum class EtaUnits { raw, per_coordinate };

std::string_view to_string(EtaUnits units);

struct TrainConfig {
  double eta = 0.1;
  EtaUnits eta_units = EtaUnits::raw;
  long iters = 500;
  long record_every = 10;
  /// Stop when the Frobenius gradient norm is at most this. Unset means
  /// rel_grad_tol times the gradient norm at iteration 0.
  std::optional<double> grad_tol;
  double rel_grad_tol = 1e-4;
  ObjectiveMode objective;
  /// Keep a parameter copy for every record (memory heavy, used by checks
  /// that need the weights themselves).
  bool keep_snapshots = false;

  void validate() const;
  double step_size(int d) const { return eta_units == EtaUnits::per_coordinate ? eta / d : eta; }
  double tolerance(double initial_grad_norm) const { return grad_tol.value_or(rel_grad_tol * initial_grad_norm); }
};

enum class StopReason { max_iters, grad_tol, nonfinite };

std::string_view to_string(StopReason reason);

struct TrajectoryRecord {
  long iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  FeatureMetrics metrics;
};

template <class Params>
struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::vector<Params> snapshots;  // parallel to records when keep_snapshots
  Params final_params;
  StopReason stop_reason = StopReason::max_iters;
  long iterations_run = 0;
};

/// True when k belongs to the recording grid {0, 1, 2, 4, 8, ...} union
/// multiples of record_every.
bool is_record_iteration(long k, long record_every);

/// Frobenius norm of all gradient blocks <= tol.
template <class Params>
bool check_stationarity(const Params& grads, double tol) {
  if (tol < 0.0) throw ConfigError("stationarity tolerance must be nonnegative");
  return frobenius_norm(grads) <= tol;
}

Trajectory<ClassifierParams> train_classifier(const ClassifierParams& params0, const Dataset& data,
                                              const TrainConfig& cfg);

Trajectory<DenoiserParams> train_denoiser(const DenoiserParams& params0, const Dataset& data,
                                          const NoiseSchedule& sched, const TrainConfig& cfg);

/// header row + one row per record, schema kMetricsCsvHeader.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);

}  // namespace featdyn
