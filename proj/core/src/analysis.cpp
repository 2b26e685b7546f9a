#include "featdyn/analysis.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace featdyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// rows: all neurons stacked; row_class[r] = owning class (+1/-1) or 0 for any.
struct NeuronRows {
  Matrix w;
  std::vector<int> row_class;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;  // [begin, end) for cross alignment
};

bool eligible(int row_class, int label) { return row_class == 0 || row_class == label; }

FeatureMetrics metrics_impl(const NeuronRows& rows, const Dataset& data) {
  if (rows.w.cols() != data.dim()) throw ShapeError("compute_metrics: dimension mismatch");
  const Matrix& w = rows.w;
  const auto n_rows = w.rows();
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto& labels = data.labels();
  const bool per_class = rows.row_class.front() != 0;

  FeatureMetrics out;
  const Matrix noise = (w * data.noise_patches().transpose()).cwiseAbs();  // rows x n
  out.max_noise = noise.maxCoeff();

  if (data.signals()) {
    Matrix sig(n_rows, 2);
    sig.col(0) = (w * data.signals()->mu_pos).cwiseAbs();
    sig.col(1) = (w * data.signals()->mu_neg).cwiseAbs();
    out.max_signal_pos = sig.col(0).maxCoeff();
    out.max_signal_neg = sig.col(1).maxCoeff();
    if (per_class) {
      double sum_sig = 0.0;
      double sum_noise = 0.0;
      long count_noise = 0;
      for (Eigen::Index r = 0; r < n_rows; ++r) {
        const int j = rows.row_class[static_cast<std::size_t>(r)];
        sum_sig += sig(r, j > 0 ? 0 : 1);
        for (Eigen::Index i = 0; i < n; ++i) {
          if (labels[static_cast<std::size_t>(i)] != j) continue;
          sum_noise += noise(r, i);
          ++count_noise;
        }
      }
      out.mean_signal = sum_sig / static_cast<double>(n_rows);
      out.mean_noise = count_noise ? sum_noise / static_cast<double>(count_noise) : 0.0;
    } else {
      out.mean_signal = sig.mean();
      out.mean_noise = noise.mean();
    }
  } else {
    const Matrix sig = (w * data.signal_patches().transpose()).cwiseAbs();  // rows x n
    double sum_sig = 0.0;
    double sum_noise = 0.0;
    out.max_signal_pos = 0.0;
    out.max_signal_neg = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = labels[static_cast<std::size_t>(i)];
      double best_sig = 0.0;
      double best_noise = 0.0;
      for (Eigen::Index r = 0; r < n_rows; ++r) {
        double& class_max = (y > 0) ? out.max_signal_pos : out.max_signal_neg;
        class_max = std::max(class_max, sig(r, i));
        if (!eligible(rows.row_class[static_cast<std::size_t>(r)], y)) continue;
        best_sig = std::max(best_sig, sig(r, i));
        best_noise = std::max(best_noise, noise(r, i));
      }
      sum_sig += best_sig;
      sum_noise += best_noise;
    }
    out.mean_signal = sum_sig / static_cast<double>(n);
    out.mean_noise = sum_noise / static_cast<double>(n);
  }

  out.ratio = out.mean_noise > 0.0 ? out.mean_signal / out.mean_noise : kNaN;

  const Matrix gram = w * w.transpose();
  const Vector norms = gram.diagonal();
  out.weight_norm_min = norms.minCoeff();
  out.weight_norm_max = norms.maxCoeff();

  double cross_min = std::numeric_limits<double>::infinity();
  bool any_pair = false;
  for (const auto& [begin, end] : rows.groups) {
    for (Eigen::Index r = begin; r < end; ++r)
      for (Eigen::Index s = begin; s < end; ++s) {
        if (r == s) continue;
        cross_min = std::min(cross_min, gram(r, s));
        any_pair = true;
      }
  }
  out.cross_align_min = (any_pair && out.weight_norm_max > 0.0) ? cross_min / out.weight_norm_max : kNaN;
  return out;
}

}  // namespace

bool FeatureMetrics::ratio_defined() const { return mean_noise > 0.0 && std::isfinite(ratio); }

FeatureMetrics compute_metrics(const DenoiserParams& params, const Dataset& data, const DenoiserParams& params0) {
  NeuronRows rows{params.w, std::vector<int>(static_cast<std::size_t>(params.width()), 0),
                  {{0, params.w.rows()}}};
  FeatureMetrics out = metrics_impl(rows, data);
  if (params0.w.rows() != params.w.rows() || params0.w.cols() != params.w.cols())
    throw ShapeError("compute_metrics: initial parameters have a different shape");
  double overlap = 0.0;
  for (Eigen::Index r = 0; r < params.w.rows(); ++r) {
    const double base = params0.w.row(r).squaredNorm();
    if (base > 0.0) overlap = std::max(overlap, std::abs(params.w.row(r).dot(params0.w.row(r))) / base);
  }
  out.w0_overlap = overlap;
  return out;
}

FeatureMetrics compute_metrics(const ClassifierParams& params, const Dataset& data,
                               const ClassifierParams& /*params0*/) {
  const auto m = params.w_pos.rows();
  NeuronRows rows;
  rows.w.resize(2 * m, params.w_pos.cols());
  rows.w.topRows(m) = params.w_pos;
  rows.w.bottomRows(m) = params.w_neg;
  rows.row_class.assign(static_cast<std::size_t>(m), 1);
  rows.row_class.insert(rows.row_class.end(), static_cast<std::size_t>(m), -1);
  rows.groups = {{0, m}, {m, 2 * m}};
  FeatureMetrics out = metrics_impl(rows, data);
  out.w0_overlap = kNaN;
  return out;
}

std::string metrics_csv_fields(const FeatureMetrics& m) {
  std::ostringstream os;
  os.precision(17);
  os << m.max_signal_pos << ',' << m.max_signal_neg << ',' << m.mean_signal << ',' << m.max_noise << ','
     << m.mean_noise << ',' << m.ratio << ',' << m.weight_norm_min << ',' << m.weight_norm_max << ','
     << m.cross_align_min << ',' << m.w0_overlap;
  return os.str();
}

Decomposition decompose_weight(const Vector& w_row, const Vector& w0_row, const SignalPair& signals,
                               const Dataset& data, const Matrix* init_rows) {
  const auto d = w_row.size();
  if (w0_row.size() != d || signals.mu_pos.size() != d || data.dim() != d)
    throw ShapeError("decompose_weight: dimension mismatch");
  const auto n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index extra = init_rows ? init_rows->rows() : 0;
  const Eigen::Index k = 2 + n + extra;

  Matrix basis(d, k);
  basis.col(0) = signals.mu_pos;
  basis.col(1) = signals.mu_neg;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector& xi = data[static_cast<std::size_t>(i)].x2;
    basis.col(2 + i) = xi / xi.squaredNorm();
  }
  for (Eigen::Index r = 0; r < extra; ++r) basis.col(2 + n + r) = init_rows->row(r).transpose();

  // column scaling keeps the QR well conditioned across very different norms
  Vector scale(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    scale[c] = basis.col(c).norm();
    if (!(scale[c] > 0.0)) throw NumericError("decompose_weight: zero basis vector");
    basis.col(c) /= scale[c];
  }

  const Vector target = w_row - w0_row;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) throw NumericError("decompose_weight: basis is singular to working precision");
  const Vector coeff = qr.solve(target).cwiseQuotient(scale);

  Decomposition out;
  out.zeta_pos = coeff[0];
  out.zeta_neg = coeff[1];
  out.rho = coeff.segment(2, n);
  out.phi = coeff.tail(extra);

  Vector recon = out.zeta_pos * signals.mu_pos + out.zeta_neg * signals.mu_neg;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector& xi = data[static_cast<std::size_t>(i)].x2;
    recon += out.rho[i] * xi / xi.squaredNorm();
  }
  for (Eigen::Index r = 0; r < extra; ++r) recon += out.phi[r] * init_rows->row(r).transpose();
  out.residual_norm = (target - recon).norm();
  const double base = target.norm();
  out.relative_residual = base > 0.0 ? out.residual_norm / base : out.residual_norm;
  return out;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::signal_dominant: return "SignalDominant";
    case Phase::noise_dominant: return "NoiseDominant";
    case Phase::balanced: return "Balanced";
  }
  return "Unknown";
}

Phase phase_classify(const FeatureMetrics& metrics, const PhaseThresholds& th, double n_snr2) {
  if (!(th.signal > 0.0) || !(th.small > 0.0)) throw ConfigError("phase thresholds must be positive");
  const double sig = metrics.max_signal();
  const double noise = metrics.max_noise;
  if (sig >= th.signal && noise <= th.small) return Phase::signal_dominant;
  if (noise >= th.signal && sig <= th.small) return Phase::noise_dominant;
  if (metrics.ratio_defined() && n_snr2 > 0.0) {
    const double normalised = metrics.ratio / n_snr2;
    if (normalised >= th.balance_lo && normalised <= th.balance_hi) return Phase::balanced;
  }
  return sig >= noise ? Phase::signal_dominant : Phase::noise_dominant;
}

Concentration neuron_concentration(const DenoiserParams& params, const Dataset& data) {
  const Matrix& w = params.w;
  Concentration out;
  auto spread = [](const Vector& v) {
    const Vector a = v.cwiseAbs();
    const double lo = a.minCoeff();
    return lo > 0.0 ? a.maxCoeff() / lo : std::numeric_limits<double>::infinity();
  };
  if (data.signals()) {
    out.signal_ratio = std::max(spread(w * data.signals()->mu_pos), spread(w * data.signals()->mu_neg));
  }
  const Matrix noise = w * data.noise_patches().transpose();
  for (Eigen::Index i = 0; i < noise.cols(); ++i) out.noise_ratio = std::max(out.noise_ratio, spread(noise.col(i)));

  const Matrix gram = w * w.transpose();
  double cross = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < gram.rows(); ++r)
    for (Eigen::Index s = 0; s < gram.cols(); ++s)
      if (r != s) cross = std::min(cross, gram(r, s));
  const double min_norm = gram.diagonal().minCoeff();
  out.cross_align_over_min_norm = (gram.rows() > 1 && min_norm > 0.0) ? cross / min_norm : kNaN;
  return out;
}

RegimeReport regime_report(const SyntheticConfig& config, int m, double sigma0, double eta) {
  RegimeReport r;
  const double d = config.d;
  const double n = config.n;
  const double mm = m;
  const double sx = config.sigma_xi;
  const double snr = config.mu_norm / (sx * std::sqrt(d));
  r.n_snr2 = n * snr * snr;
  r.d_over_n7m5 = d / (std::pow(n, 7) * std::pow(mm, 5));
  r.sigma0_lower = n * n * mm / (sx * d);
  r.sigma0_upper = std::min({std::pow(mm, -1.0 / 6) * std::pow(d, -1.0 / 6) * std::cbrt(sx) * std::pow(n, -1.0 / 3),
                             std::pow(mm, -1.0 / 6) * std::pow(d, -7.0 / 12) * std::pow(sx, -1.0 / 3) * std::cbrt(n),
                             std::pow(d, -0.75) * n / sx});
  r.eta_upper = std::min(n * mm * sigma0 / (sx * std::sqrt(d)), n * mm / (sx * sx * d));
  r.sigma_xi_lower = std::max(std::pow(n, 2.5) * std::pow(mm, 1.75) * std::pow(d, -0.625),
                              n * std::pow(mm, 1.0 / 6) / d);
  r.sigma_xi_upper = std::pow(d, -0.25);
  r.d_too_small = r.d_over_n7m5 < 1.0;
  r.sigma0_out_of_range = sigma0 < r.sigma0_lower || sigma0 > r.sigma0_upper;
  r.eta_too_large = eta > r.eta_upper;
  r.sigma_xi_out_of_range = sx < r.sigma_xi_lower || sx > r.sigma_xi_upper;
  return r;
}

std::string RegimeReport::text() const {
  std::ostringstream os;
  os.precision(6);
  auto flag = [](bool bad) { return bad ? "  [outside]" : ""; };
  auto empty = [](double lo, double hi) { return lo > hi ? " (empty at this size)" : ""; };
  os << "regime report (raw ratios; polylog constants unknown, informational only)\n"
     << "  n*SNR^2            = " << n_snr2 << '\n'
     << "  d / (n^7 m^5)      = " << d_over_n7m5 << flag(d_too_small) << '\n'
     << "  sigma0 window      = [" << sigma0_lower << ", " << sigma0_upper << "]"
     << empty(sigma0_lower, sigma0_upper) << flag(sigma0_out_of_range) << '\n'
     << "  eta upper bound    = " << eta_upper << flag(eta_too_large) << '\n'
     << "  sigma_xi window    = [" << sigma_xi_lower << ", " << sigma_xi_upper << "]"
     << empty(sigma_xi_lower, sigma_xi_upper) << flag(sigma_xi_out_of_range) << '\n';
  return os.str();
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_line needs >= 2 paired points");
  const double k = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (sxx > 0.0 && syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

std::size_t first_stage_length(const std::vector<double>& loss, double fraction) {
  if (loss.empty()) return 0;
  const double start = loss.front();
  const double band = fraction * std::abs(start);
  std::size_t k = 0;
  while (k < loss.size() && start - loss[k] < band) ++k;
  return k;
}

std::size_t first_stage_length_by_norm(const std::vector<DenoiserParams>& snapshots, const DenoiserParams& params0,
                                       double factor) {
  const Vector n0 = params0.w.rowwise().squaredNorm();
  std::size_t k = 0;
  for (; k < snapshots.size(); ++k) {
    const Vector nk = snapshots[k].w.rowwise().squaredNorm();
    if ((nk.array() > factor * n0.array()).any()) break;
  }
  return k;
}

}  // namespace featdyn
