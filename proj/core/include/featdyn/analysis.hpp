#pragma once

#include "featdyn/data_model.hpp"
#include "featdyn/models.hpp"
#include "featdyn/types.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace featdyn {

/// Feature-learning observables of one parameter snapshot.
///
/// On synthetic data (SignalPair present):
///   max_signal_pos/neg  max over neurons of |<w, mu_{+1}>|, |<w, mu_{-1}>|
///   max_noise           max over neurons and samples of |<w, xi_i>|
///   mean_signal         denoiser: mean over r, j of |<w_r, mu_j>|;
///                       classifier: mean over own-class neurons |<w_{j,r}, mu_j>|
///   mean_noise          denoiser: mean over r, i of |<w_r, xi_i>|;
///                       classifier: mean over |<w_{y_i,r}, xi_i>|
/// On Noisy-MNIST (per-sample signals) mean_signal and mean_noise are
/// (1/n) sum_i max_r |<w_r, x_i^(1)>| and (1/n) sum_i max_r |<w_r, xi_i>|,
/// with r restricted to class y_i neurons for the classifier.
///
/// ratio is NaN when mean_noise == 0; cross_align_min is NaN with a single
/// neuron per group; w0_overlap is NaN for the classifier.
struct FeatureMetrics {
  double max_signal_pos = 0.0;
  double max_signal_neg = 0.0;
  double mean_signal = 0.0;
  double max_noise = 0.0;
  double mean_noise = 0.0;
  double ratio = 0.0;
  double weight_norm_min = 0.0;
  double weight_norm_max = 0.0;
  double cross_align_min = 0.0;
  double w0_overlap = 0.0;

  bool ratio_defined() const;
  double max_signal() const { return std::max(max_signal_pos, max_signal_neg); }
};

FeatureMetrics compute_metrics(const DenoiserParams& params, const Dataset& data, const DenoiserParams& params0);
FeatureMetrics compute_metrics(const ClassifierParams& params, const Dataset& data,
                               const ClassifierParams& params0);

/// Fixed column order of trajectory / metrics CSV files.
inline constexpr std::string_view kMetricsCsvHeader =
    "iter,loss,grad_norm,max_signal_pos,max_signal_neg,mean_signal,max_noise,mean_noise,ratio,"
    "wnorm_min,wnorm_max,cross_align_min,w0_overlap";

/// The ten metric columns, comma separated, full precision.
std::string metrics_csv_fields(const FeatureMetrics& m);

/// w - w0 = zeta_pos mu_1 + zeta_neg mu_{-1} + sum_i rho_i xi_i / ||xi_i||^2
///          + sum_r' phi_r' w0_r' + residual.
/// phi is empty unless initial rows are passed as extra basis (needed for the
/// denoiser, whose updates mix all neurons).
struct Decomposition {
  double zeta_pos = 0.0;
  double zeta_neg = 0.0;
  Vector rho;
  Vector phi;
  double residual_norm = 0.0;
  double relative_residual = 0.0;
};

Decomposition decompose_weight(const Vector& w_row, const Vector& w0_row, const SignalPair& signals,
                               const Dataset& data, const Matrix* init_rows = nullptr);

enum class Phase { signal_dominant, noise_dominant, balanced };

std::string_view to_string(Phase phase);

struct PhaseThresholds {
  double signal = 1.0;   // "learned" level
  double small = 0.3;    // "not learned" level
  double balance_lo = 1.0 / 3.0;
  double balance_hi = 3.0;
};

/// SignalDominant if max_signal >= signal and max_noise <= small, NoiseDominant
/// symmetrically, Balanced if ratio / n_snr2 lies in [balance_lo, balance_hi],
/// otherwise whichever max is larger.
Phase phase_classify(const FeatureMetrics& metrics, const PhaseThresholds& thresholds, double n_snr2);

/// Neuron concentration at a snapshot: for each signal (and each sample),
/// max_r |<w_r, v>| / min_r |<w_r, v>|, maximised over the directions.
struct Concentration {
  double signal_ratio = 0.0;
  double noise_ratio = 0.0;
  double cross_align_over_min_norm = 0.0;  // min_{r != r'} <w_r,w_r'> / min_r ||w_r||^2
};

Concentration neuron_concentration(const DenoiserParams& params, const Dataset& data);

/// Dimensional diagnostics for the asymptotic regime. Informational only;
/// hidden polylog constants are unknown so flags compare raw ratios.
struct RegimeReport {
  double n_snr2 = 0.0;
  double d_over_n7m5 = 0.0;
  double sigma0_lower = 0.0;
  double sigma0_upper = 0.0;
  double eta_upper = 0.0;
  double sigma_xi_lower = 0.0;
  double sigma_xi_upper = 0.0;
  bool d_too_small = false;
  bool sigma0_out_of_range = false;
  bool eta_too_large = false;
  bool sigma_xi_out_of_range = false;

  std::string text() const;
};

RegimeReport regime_report(const SyntheticConfig& config, int m, double sigma0, double eta);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y ~ a x + b with coefficient of determination.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Number of leading entries of `loss` that are still within `fraction` of
/// the initial value (the loss has not materially moved yet).
std::size_t first_stage_length(const std::vector<double>& loss, double fraction = 0.05);

/// Number of leading snapshots in which every neuron keeps its squared
/// norm within `factor` of its initial value. This is the "weights still
/// at initialization scale" stage for the denoiser, whose loss sits near d
/// long after the inner products start to accelerate.
std::size_t first_stage_length_by_norm(const std::vector<DenoiserParams>& snapshots, const DenoiserParams& params0,
                                       double factor = 2.0);

}  // namespace featdyn
