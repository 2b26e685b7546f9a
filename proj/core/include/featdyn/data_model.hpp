#pragma once

#include "featdyn/rng.hpp"
#include "featdyn/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace featdyn {

enum class SignalMode { axis_aligned, random_orthogonal };

struct SyntheticConfig {
  int d = 1000;
  int n = 30;
  double mu_norm = 5.0;
  double sigma_xi = 1.0;
  std::uint64_t seed = 0;
  SignalMode signal_mode = SignalMode::axis_aligned;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct SignalPair {
  Vector mu_pos;
  Vector mu_neg;
};

struct Sample {
  Vector x1;  // signal patch
  Vector x2;  // noise patch
  int label = 1;
};

/// Immutable set of two-patch samples.
///
/// Synthetic datasets carry the SignalPair they were drawn from; Noisy-MNIST
/// datasets have one signal per sample and leave `signals` empty.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::vector<Sample> samples, std::optional<SignalPair> signals,
          std::optional<SyntheticConfig> config = std::nullopt);

  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int dim() const { return dim_; }

  const std::optional<SignalPair>& signals() const { return signals_; }
  const std::optional<SyntheticConfig>& config() const { return config_; }

  /// n x d matrices of stacked signal / noise patches, row i = sample i.
  const Matrix& signal_patches() const { return x1_; }
  const Matrix& noise_patches() const { return x2_; }
  const std::vector<int>& labels() const { return labels_; }

private:
  std::vector<Sample> samples_;
  std::optional<SignalPair> signals_;
  std::optional<SyntheticConfig> config_;
  Matrix x1_;
  Matrix x2_;
  std::vector<int> labels_;
  int dim_ = 0;
};

/// mu_pos = mu_norm e1, mu_neg = mu_norm e2.
SignalPair make_signals(int d, double mu_norm);

/// Uniformly random orthogonal pair of the given norm.
SignalPair make_random_signals(int d, double mu_norm, Rng& rng);

/// N(0, sigma^2 I) draw with its components along both signals removed.
Vector sample_noise(const SignalPair& signals, double sigma_xi, Rng& rng);

/// Labels are drawn first from their own stream, then the noise patches, so
/// the noise is label independent.
Dataset generate_dataset(const SyntheticConfig& config);

/// Fresh samples from the same distribution (same signals) with a separate
/// stream; used for test accuracy.
Dataset generate_test_set(const SyntheticConfig& config, int n_test, std::uint64_t seed);

struct SnrQuantities {
  double snr = 0.0;
  double n_snr2 = 0.0;
};

SnrQuantities snr_quantities(const SyntheticConfig& config);

/// One row per sample: label, x1 entries, x2 entries.
void write_dataset_csv(const Dataset& data, std::ostream& out);

}  // namespace featdyn
