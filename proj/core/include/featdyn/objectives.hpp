#pragma once

#include "featdyn/data_model.hpp"
#include "featdyn/models.hpp"
#include "featdyn/rng.hpp"
#include "featdyn/types.hpp"

#include <cmath>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace featdyn {

/// Variance-preserving schedule alpha = exp(-t), beta = sqrt(1 - exp(-2t)).
struct NoiseSchedule {
  double t = 0.2;
  double alpha = 0.0;
  double beta = 0.0;
};

NoiseSchedule make_schedule(double t);

/// log(1 + exp(-z)) without overflow.
double logistic_loss(double margin);

/// d/dz log(1 + exp(-z)) = -1 / (1 + exp(z)).
double logistic_derivative(double margin);

struct ClassifierLossGrad {
  double loss = 0.0;
  ClassifierParams grad;
};

/// Mean logistic loss and its exact gradient (chain-rule factor 2 of the
/// quadratic activation included).
ClassifierLossGrad classification_loss_grad(const ClassifierParams& params, const Dataset& data);
double classification_loss(const ClassifierParams& params, const Dataset& data);

struct DenoiserLossGrad {
  double loss = 0.0;
  DenoiserParams grad;
};

/// Closed-form expectation of the DDPM loss over the diffusion noise.
///
/// With G = W W^T, s = W x0 (one patch), q = alpha^2 s^2 + beta^2 diag(G),
/// each patch contributes
///
///   d + (1/m) sum_{r,r'} G_rr' (q_r q_r' + 2 beta^4 G_rr'^2
///                               + 4 alpha^2 beta^2 s_r s_r' G_rr')
///     - (4 alpha beta / sqrt m) sum_r G_rr s_r
///
/// and the loss is the sum over both patches of every sample divided by 2n.
/// The r = r' terms are the single-neuron polynomial, r != r' the
/// cross-neuron alignment terms.
double ddpm_expected_loss(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched);
DenoiserParams ddpm_expected_grad(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched);
DenoiserLossGrad ddpm_expected_loss_grad(const DenoiserParams& params, const Dataset& data,
                                         const NoiseSchedule& sched);

struct McEstimate {
  double estimate = 0.0;
  double std_err = 0.0;
};

/// Monte-Carlo DDPM loss. Draw k samples a fresh epsilon for both patches of
/// every sample; estimate is the mean over draws of the per-draw loss and
/// std_err its standard error.
McEstimate ddpm_mc_loss(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched,
                        int n_eps, Rng& rng);

struct McLossGrad {
  McEstimate loss;
  DenoiserParams grad;
};

/// Monte-Carlo loss together with the gradient of the same sample average.
McLossGrad ddpm_mc_loss_grad(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched,
                             int n_eps, Rng& rng);

/// Central differences per coordinate. With `relative` the step for a
/// coordinate w is h * (1 + |w|).
template <class Params>
Params finite_diff_grad(const std::function<double(const Params&)>& loss_fn, const Params& params,
                        double h = 1e-5, bool relative = true) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  Params grad = params;
  Params probe = params;
  auto out_blocks = grad.blocks();
  auto probe_blocks = probe.blocks();
  for (std::size_t b = 0; b < probe_blocks.size(); ++b) {
    Matrix& w = *probe_blocks[b];
    Matrix& g = *out_blocks[b];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index k = 0; k < w.cols(); ++k) {
        const double w0 = w(r, k);
        const double step = relative ? h * (1.0 + std::abs(w0)) : h;
        w(r, k) = w0 + step;
        const double up = loss_fn(probe);
        w(r, k) = w0 - step;
        const double down = loss_fn(probe);
        w(r, k) = w0;
        g(r, k) = (up - down) / (2.0 * step);
      }
    }
  }
  return grad;
}

struct GradcheckEntry {
  std::string instance;
  std::string coordinate;
  double analytic = 0.0;
  double fd = 0.0;
  double rel_err = 0.0;
};

/// |analytic - fd| relative to the analytic gradient's max-abs entry.
template <class Params>
std::vector<GradcheckEntry> compare_gradients(const Params& analytic, const Params& fd,
                                              const std::string& instance) {
  double scale = 0.0;
  for (const Matrix* b : analytic.blocks()) scale = std::max(scale, b->cwiseAbs().maxCoeff());
  scale = std::max(scale, 1e-12);
  std::vector<GradcheckEntry> out;
  const auto a_blocks = analytic.blocks();
  const auto f_blocks = fd.blocks();
  for (std::size_t b = 0; b < a_blocks.size(); ++b) {
    const Matrix& a = *a_blocks[b];
    const Matrix& f = *f_blocks[b];
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        out.push_back({instance,
                       std::to_string(b) + ":" + std::to_string(r) + ":" + std::to_string(k),
                       a(r, k), f(r, k), std::abs(a(r, k) - f(r, k)) / scale});
      }
    }
  }
  return out;
}

/// CSV report with header instance,coordinate,analytic,fd,rel_err.
void write_gradcheck_csv(std::ostream& out, const std::vector<GradcheckEntry>& entries);

}  // namespace featdyn
