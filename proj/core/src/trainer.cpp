#include "featdyn/trainer.hpp"

#include <cmath>
#include <ostream>

namespace featdyn {

void TrainConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be a nonnegative finite number");
  if (iters < 1) throw ConfigError("iters must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (grad_tol && !(*grad_tol >= 0.0)) throw ConfigError("grad_tol must be nonnegative");
  if (!(rel_grad_tol >= 0.0)) throw ConfigError("rel_grad_tol must be nonnegative");
  if (objective.kind == ObjectiveKind::monte_carlo && objective.n_eps < 2)
    throw ConfigError("monte_carlo objective needs n_eps >= 2");
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::nonfinite: return "nonfinite";
  }
  return "unknown";
}

std::string_view to_string(EtaUnits units) {
  return units == EtaUnits::per_coordinate ? "per_coordinate" : "raw";
}

bool is_record_iteration(long k, long record_every) {
  if (k == 0 || k % record_every == 0) return true;
  return (k & (k - 1)) == 0;
}

namespace {

// Shared loop. `eval(params, grad&)` returns the loss and fills the step
// gradient; `stationarity_norm(params, grad)` returns the gradient norm the
// stopping rule looks at.
template <class Params, class Eval, class StationarityNorm>
Trajectory<Params> run_gd(const Params& params0, const Dataset& data, const TrainConfig& cfg, Eval eval,
                          StationarityNorm stationarity_norm) {
  cfg.validate();
  Trajectory<Params> traj;
  Params params = params0;
  Params grad;
  const double step = cfg.step_size(params0.dim());
  double tol = 0.0;

  auto record = [&](long k, double loss, double grad_norm) {
    traj.records.push_back({k, loss, grad_norm, compute_metrics(params, data, params0)});
    if (cfg.keep_snapshots) traj.snapshots.push_back(params);
  };

  for (long k = 0;; ++k) {
    const double loss = eval(params, grad);
    const double grad_norm = frobenius_norm(grad);
    const bool finite = std::isfinite(loss) && std::isfinite(grad_norm) && all_finite(params);

    bool stationary = false;
    if (finite) {
      const double s_norm = stationarity_norm(params, grad);
      if (k == 0) tol = cfg.tolerance(s_norm);
      stationary = s_norm <= tol;
    }
    const bool done = !finite || k == cfg.iters || stationary;
    if (done || is_record_iteration(k, cfg.record_every)) record(k, loss, grad_norm);
    if (done) {
      if (!finite) traj.stop_reason = StopReason::nonfinite;
      else if (k == cfg.iters) traj.stop_reason = StopReason::max_iters;
      else traj.stop_reason = StopReason::grad_tol;
      traj.iterations_run = k;
      break;
    }

    auto p_blocks = params.blocks();
    auto g_blocks = grad.blocks();
    for (std::size_t b = 0; b < p_blocks.size(); ++b) *p_blocks[b] -= step * *g_blocks[b];
  }
  traj.final_params = std::move(params);
  return traj;
}

}  // namespace

Trajectory<ClassifierParams> train_classifier(const ClassifierParams& params0, const Dataset& data,
                                              const TrainConfig& cfg) {
  return run_gd(
      params0, data, cfg,
      [&](const ClassifierParams& p, ClassifierParams& g) {
        ClassifierLossGrad lg = classification_loss_grad(p, data);
        g = std::move(lg.grad);
        return lg.loss;
      },
      [](const ClassifierParams&, const ClassifierParams& g) { return frobenius_norm(g); });
}

Trajectory<DenoiserParams> train_denoiser(const DenoiserParams& params0, const Dataset& data,
                                          const NoiseSchedule& sched, const TrainConfig& cfg) {
  if (cfg.objective.kind == ObjectiveKind::exact) {
    return run_gd(
        params0, data, cfg,
        [&](const DenoiserParams& p, DenoiserParams& g) {
          DenoiserLossGrad lg = ddpm_expected_loss_grad(p, data, sched);
          g = std::move(lg.grad);
          return lg.loss;
        },
        [](const DenoiserParams&, const DenoiserParams& g) { return frobenius_norm(g); });
  }
  Rng rng = make_stream(cfg.objective.seed, StreamId::diffusion_noise);
  return run_gd(
      params0, data, cfg,
      [&](const DenoiserParams& p, DenoiserParams& g) {
        McLossGrad lg = ddpm_mc_loss_grad(p, data, sched, cfg.objective.n_eps, rng);
        g = std::move(lg.grad);
        return lg.loss.estimate;
      },
      // stationarity is judged on the exact expected gradient
      [&](const DenoiserParams& p, const DenoiserParams&) {
        return frobenius_norm(ddpm_expected_grad(p, data, sched));
      });
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  const auto old = out.precision(17);
  out << kMetricsCsvHeader << '\n';
  for (const auto& r : records)
    out << r.iter << ',' << r.loss << ',' << r.grad_norm << ',' << metrics_csv_fields(r.metrics) << '\n';
  out.precision(old);
}

}  // namespace featdyn
