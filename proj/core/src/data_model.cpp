#include "featdyn/data_model.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace featdyn {

void SyntheticConfig::validate() const {
  if (d < 3) throw ConfigError("d must be >= 3, got " + std::to_string(d));
  if (n < 1) throw ConfigError("n must be >= 1, got " + std::to_string(n));
  if (!(mu_norm > 0.0) || !std::isfinite(mu_norm)) throw ConfigError("mu_norm must be positive");
  if (!(sigma_xi > 0.0) || !std::isfinite(sigma_xi)) throw ConfigError("sigma_xi must be positive");
}

Dataset::Dataset(std::vector<Sample> samples, std::optional<SignalPair> signals,
                 std::optional<SyntheticConfig> config)
    : samples_(std::move(samples)), signals_(std::move(signals)), config_(std::move(config)) {
  if (samples_.empty()) return;
  dim_ = static_cast<int>(samples_.front().x1.size());
  const auto n = static_cast<Eigen::Index>(samples_.size());
  x1_.resize(n, dim_);
  x2_.resize(n, dim_);
  labels_.reserve(samples_.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = samples_[static_cast<std::size_t>(i)];
    if (s.x1.size() != dim_ || s.x2.size() != dim_) {
      throw ShapeError("all patches of a dataset must have the same dimension");
    }
    if (s.label != 1 && s.label != -1) throw ConfigError("labels must be +1 or -1");
    x1_.row(i) = s.x1.transpose();
    x2_.row(i) = s.x2.transpose();
    labels_.push_back(s.label);
  }
}

SignalPair make_signals(int d, double mu_norm) {
  if (d < 2) throw ConfigError("make_signals needs d >= 2, got " + std::to_string(d));
  SignalPair p{Vector::Zero(d), Vector::Zero(d)};
  p.mu_pos[0] = mu_norm;
  p.mu_neg[1] = mu_norm;
  return p;
}

SignalPair make_random_signals(int d, double mu_norm, Rng& rng) {
  if (d < 2) throw ConfigError("make_random_signals needs d >= 2, got " + std::to_string(d));
  Vector a(d), b(d);
  for (int k = 0; k < d; ++k) a[k] = rng.normal();
  for (int k = 0; k < d; ++k) b[k] = rng.normal();
  a.normalize();
  b -= a.dot(b) * a;
  b.normalize();
  // second Gram-Schmidt pass keeps <a, b> at rounding level
  b -= a.dot(b) * a;
  b.normalize();
  return {mu_norm * a, mu_norm * b};
}

Vector sample_noise(const SignalPair& signals, double sigma_xi, Rng& rng) {
  const auto d = signals.mu_pos.size();
  Vector g(d);
  for (Eigen::Index k = 0; k < d; ++k) g[k] = sigma_xi * rng.normal();
  g -= (signals.mu_pos.dot(g) / signals.mu_pos.squaredNorm()) * signals.mu_pos;
  g -= (signals.mu_neg.dot(g) / signals.mu_neg.squaredNorm()) * signals.mu_neg;
  return g;
}

namespace {

SignalPair signals_for(const SyntheticConfig& config) {
  if (config.signal_mode == SignalMode::axis_aligned) return make_signals(config.d, config.mu_norm);
  Rng basis = make_stream(config.seed, StreamId::signal_basis);
  return make_random_signals(config.d, config.mu_norm, basis);
}

Dataset draw(const SyntheticConfig& config, int n, Rng& label_rng, Rng& noise_rng) {
  SignalPair signals = signals_for(config);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& y : labels) y = label_rng.rademacher();

  std::vector<Sample> samples;
  samples.reserve(labels.size());
  for (int y : labels) {
    Sample s;
    s.label = y;
    s.x1 = (y == 1) ? signals.mu_pos : signals.mu_neg;
    s.x2 = sample_noise(signals, config.sigma_xi, noise_rng);
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), std::move(signals), config);
}

}  // namespace

Dataset generate_dataset(const SyntheticConfig& config) {
  config.validate();
  Rng label_rng = make_stream(config.seed, StreamId::labels);
  Rng noise_rng = make_stream(config.seed, StreamId::noise);
  return draw(config, config.n, label_rng, noise_rng);
}

Dataset generate_test_set(const SyntheticConfig& config, int n_test, std::uint64_t seed) {
  config.validate();
  if (n_test < 1) throw ConfigError("n_test must be >= 1");
  Rng label_rng = make_stream(seed, StreamId::test_data);
  Rng noise_rng = Rng::stream(seed, 0x7e57);
  SyntheticConfig test_config = config;
  test_config.n = n_test;
  return draw(test_config, n_test, label_rng, noise_rng);
}

SnrQuantities snr_quantities(const SyntheticConfig& config) {
  config.validate();
  const double snr = config.mu_norm / (config.sigma_xi * std::sqrt(static_cast<double>(config.d)));
  return {snr, config.n * snr * snr};
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (const Sample& s : data.samples()) {
    out << s.label;
    for (Eigen::Index k = 0; k < s.x1.size(); ++k) out << ',' << s.x1[k];
    for (Eigen::Index k = 0; k < s.x2.size(); ++k) out << ',' << s.x2[k];
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace featdyn
