#include "featdyn/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace featdyn {

NoiseSchedule make_schedule(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("diffusion time t must be positive");
  return {t, std::exp(-t), std::sqrt(-std::expm1(-2.0 * t))};
}

double logistic_loss(double margin) {
  return std::max(0.0, -margin) + std::log1p(std::exp(-std::abs(margin)));
}

double logistic_derivative(double margin) {
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

namespace {

void check_classifier_shapes(const ClassifierParams& params, const Dataset& data) {
  if (data.empty()) throw ConfigError("dataset is empty");
  if (params.w_pos.rows() != params.w_neg.rows() || params.w_pos.cols() != params.w_neg.cols())
    throw ShapeError("classifier blocks differ in shape");
  if (params.dim() != data.dim()) throw ShapeError("classifier dimension does not match dataset");
}

void check_denoiser_shapes(const DenoiserParams& params, const Dataset& data) {
  if (data.empty()) throw ConfigError("dataset is empty");
  if (params.dim() != data.dim()) throw ShapeError("denoiser dimension does not match dataset");
  if (params.width() < 1) throw ShapeError("denoiser needs at least one neuron");
}

}  // namespace

ClassifierLossGrad classification_loss_grad(const ClassifierParams& params, const Dataset& data) {
  check_classifier_shapes(params, data);
  const auto n = static_cast<Eigen::Index>(data.size());
  const double m = params.width();
  const Matrix& x1 = data.signal_patches();
  const Matrix& x2 = data.noise_patches();

  const Matrix s1_pos = x1 * params.w_pos.transpose();
  const Matrix s2_pos = x2 * params.w_pos.transpose();
  const Matrix s1_neg = x1 * params.w_neg.transpose();
  const Matrix s2_neg = x2 * params.w_neg.transpose();

  const Vector f_pos = (s1_pos.rowwise().squaredNorm() + s2_pos.rowwise().squaredNorm()) / m;
  const Vector f_neg = (s1_neg.rowwise().squaredNorm() + s2_neg.rowwise().squaredNorm()) / m;

  ClassifierLossGrad out;
  Vector coeff(n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = data.labels()[static_cast<std::size_t>(i)];
    const double margin = y * (f_pos[i] - f_neg[i]);
    loss += logistic_loss(margin);
    coeff[i] = logistic_derivative(margin) * y / static_cast<double>(n);
  }
  out.loss = loss / static_cast<double>(n);

  auto block_grad = [&](const Matrix& s1, const Matrix& s2, double j) -> Matrix {
    const Matrix c1 = coeff.asDiagonal() * s1;
    const Matrix c2 = coeff.asDiagonal() * s2;
    Matrix g = c1.transpose() * x1;
    g.noalias() += c2.transpose() * x2;
    return (j * 2.0 / m) * g;
  };
  out.grad.w_pos = block_grad(s1_pos, s2_pos, 1.0);
  out.grad.w_neg = block_grad(s1_neg, s2_neg, -1.0);
  return out;
}

double classification_loss(const ClassifierParams& params, const Dataset& data) {
  check_classifier_shapes(params, data);
  double loss = 0.0;
  for (const Sample& s : data.samples()) loss += logistic_loss(s.label * classifier_forward(params, s).f);
  return loss / static_cast<double>(data.size());
}

namespace {

struct PatchTerms {
  double poly = 0.0;      // sum over patches of T + linear term
  Matrix x_coeff;         // n x m coefficients on the patch vectors
  Matrix row_mix;         // m x m coefficients on the weight rows
  bool with_grad = false;
};

// Accumulates one patch family (all signal patches or all noise patches).
void accumulate_patches(const Matrix& x, const Matrix& w, const Matrix& gram, const Matrix& gram_sq,
                        double gram_cube_sum, const NoiseSchedule& sched, PatchTerms& acc,
                        Matrix* x_coeff) {
  const double m = static_cast<double>(w.rows());
  const double a2 = sched.alpha * sched.alpha;
  const double b2 = sched.beta * sched.beta;
  const double ab = sched.alpha * sched.beta;
  const double sqrt_m = std::sqrt(m);
  const Vector norms = gram.diagonal();

  const Matrix s = x * w.transpose();                                    // n x m
  const Matrix q = (a2 * s.array().square()).matrix() + (b2 * Vector::Ones(s.rows()) * norms.transpose());
  const Matrix gq = q * gram;                                            // (G q)_r per patch
  const Matrix ggs = s * gram_sq;                                        // ((G o G) s)_r per patch

  const Vector quad = (q.array() * gq.array()).rowwise().sum();
  const Vector align = (s.array() * ggs.array()).rowwise().sum();
  const Vector lin = s * norms;
  const double per_patch_const = 2.0 * b2 * b2 * gram_cube_sum;
  acc.poly += ((quad.array() + per_patch_const + 4.0 * a2 * b2 * align.array()) / m).sum() -
              (4.0 * ab / sqrt_m) * lin.sum();

  if (!acc.with_grad) return;

  // coefficients multiplying the patch vector x for neuron r
  *x_coeff = (2.0 / m) * (2.0 * a2 * (s.array() * gq.array()) + 4.0 * a2 * b2 * ggs.array()).matrix();
  x_coeff->rowwise() -= (4.0 * ab / sqrt_m) * norms.transpose();

  // coefficients multiplying other weight rows
  acc.row_mix.noalias() += (2.0 / m) * (q.transpose() * q);
  acc.row_mix += (2.0 / m) * (8.0 * a2 * b2) * ((s.transpose() * s).array() * gram.array()).matrix();
  const Vector diag = ((4.0 * b2 / m) * gq.array() - (8.0 * ab / sqrt_m) * s.array()).colwise().sum();
  acc.row_mix.diagonal() += diag;
}

DenoiserLossGrad expected_impl(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched,
                               bool with_grad) {
  check_denoiser_shapes(params, data);
  const Matrix& w = params.w;
  const auto m = w.rows();
  const double n = static_cast<double>(data.size());
  const double b4 = std::pow(sched.beta, 4);

  const Matrix gram = w * w.transpose();
  const Matrix gram_sq = gram.array().square().matrix();
  const double gram_cube_sum = gram.array().cube().sum();

  PatchTerms acc;
  acc.with_grad = with_grad;
  if (with_grad) acc.row_mix = Matrix::Zero(m, m);
  Matrix c1, c2;
  accumulate_patches(data.signal_patches(), w, gram, gram_sq, gram_cube_sum, sched, acc, &c1);
  accumulate_patches(data.noise_patches(), w, gram, gram_sq, gram_cube_sum, sched, acc, &c2);

  DenoiserLossGrad out;
  out.loss = static_cast<double>(data.dim()) + acc.poly / (2.0 * n);
  if (!with_grad) return out;

  // the 2 beta^4 G^3 term does not depend on the patch: 2n copies of it
  acc.row_mix += (2.0 / static_cast<double>(m)) * (2.0 * n) * (6.0 * b4) * gram_sq;

  Matrix g = acc.row_mix * w;
  g.noalias() += c1.transpose() * data.signal_patches();
  g.noalias() += c2.transpose() * data.noise_patches();
  out.grad.w = g / (2.0 * n);
  return out;
}

}  // namespace

DenoiserLossGrad ddpm_expected_loss_grad(const DenoiserParams& params, const Dataset& data,
                                         const NoiseSchedule& sched) {
  return expected_impl(params, data, sched, true);
}

double ddpm_expected_loss(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched) {
  return expected_impl(params, data, sched, false).loss;
}

DenoiserParams ddpm_expected_grad(const DenoiserParams& params, const Dataset& data,
                                  const NoiseSchedule& sched) {
  return expected_impl(params, data, sched, true).grad;
}

namespace {

constexpr Eigen::Index kMcChunk = 2048;

McLossGrad mc_impl(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched, int n_eps,
                   Rng& rng, bool with_grad) {
  check_denoiser_shapes(params, data);
  if (n_eps < 2) throw ConfigError("n_eps must be >= 2");
  const Matrix& w = params.w;
  const auto m = w.rows();
  const auto d = w.cols();
  const double n = static_cast<double>(data.size());
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));

  Vector per_draw = Vector::Zero(n_eps);
  Matrix grad = Matrix::Zero(m, d);

  // Draw order: sample i, patch p, draw k, coordinate.
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int p = 0; p < 2; ++p) {
      const Vector& x0 = (p == 0) ? data[i].x1 : data[i].x2;
      for (Eigen::Index start = 0; start < n_eps; start += kMcChunk) {
        const Eigen::Index k = std::min<Eigen::Index>(kMcChunk, n_eps - start);
        Matrix eps(k, d);
        for (Eigen::Index a = 0; a < k; ++a)
          for (Eigen::Index b = 0; b < d; ++b) eps(a, b) = rng.normal();
        Matrix xt = sched.beta * eps;
        xt.rowwise() += sched.alpha * x0.transpose();
        const Matrix u = xt * w.transpose();                                 // k x m
        const Matrix h = u.array().square().matrix();
        const Matrix resid = inv_sqrt_m * (h * w) - eps;                     // k x d
        per_draw.segment(start, k) += resid.rowwise().squaredNorm() / (2.0 * n);
        if (with_grad) {
          const Matrix we = resid * w.transpose();                           // <w_r, e>
          const Matrix coeff_x = (2.0 * u.array() * we.array()).matrix();    // times x_t
          grad.noalias() += h.transpose() * resid;
          grad.noalias() += coeff_x.transpose() * xt;
        }
      }
    }
  }

  McLossGrad out;
  const double mean = per_draw.mean();
  const double var = (per_draw.array() - mean).square().sum() / static_cast<double>(n_eps - 1);
  out.loss = {mean, std::sqrt(var / static_cast<double>(n_eps))};
  if (with_grad) out.grad.w = (2.0 * inv_sqrt_m / (2.0 * n * static_cast<double>(n_eps))) * grad;
  return out;
}

}  // namespace

McEstimate ddpm_mc_loss(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched,
                        int n_eps, Rng& rng) {
  return mc_impl(params, data, sched, n_eps, rng, false).loss;
}

McLossGrad ddpm_mc_loss_grad(const DenoiserParams& params, const Dataset& data, const NoiseSchedule& sched,
                             int n_eps, Rng& rng) {
  return mc_impl(params, data, sched, n_eps, rng, true);
}

void write_gradcheck_csv(std::ostream& out, const std::vector<GradcheckEntry>& entries) {
  const auto old = out.precision(17);
  out << "instance,coordinate,analytic,fd,rel_err\n";
  for (const auto& e : entries)
    out << e.instance << ',' << e.coordinate << ',' << e.analytic << ',' << e.fd << ',' << e.rel_err << '\n';
  out.precision(old);
}

}  // namespace featdyn
