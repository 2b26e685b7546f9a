#pragma once

#include "featdyn/data_model.hpp"
#include "featdyn/types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <utility>

namespace featdyn {

/// Quadratic classifier with fixed +1 / -1 second layer.
struct ClassifierParams {
  Matrix w_pos;  // m x d, neurons w_{+1,r}
  Matrix w_neg;  // m x d, neurons w_{-1,r}

  int width() const { return static_cast<int>(w_pos.rows()); }
  int dim() const { return static_cast<int>(w_pos.cols()); }

  const Matrix& block(int j) const { return j > 0 ? w_pos : w_neg; }
  Matrix& block(int j) { return j > 0 ? w_pos : w_neg; }

  std::array<Matrix*, 2> blocks() { return {&w_pos, &w_neg}; }
  std::array<const Matrix*, 2> blocks() const { return {&w_pos, &w_neg}; }

  static ClassifierParams zeros(int m, int d) {
    return {Matrix::Zero(m, d), Matrix::Zero(m, d)};
  }
};

/// Quadratic denoiser whose first and second layers share the weights of
/// one diffusion step.
struct DenoiserParams {
  Matrix w;  // m x d

  int width() const { return static_cast<int>(w.rows()); }
  int dim() const { return static_cast<int>(w.cols()); }

  std::array<Matrix*, 1> blocks() { return {&w}; }
  std::array<const Matrix*, 1> blocks() const { return {&w}; }

  static DenoiserParams zeros(int m, int d) { return {Matrix::Zero(m, d)}; }
};

struct InitConfig {
  double sigma0 = 0.001;
  std::uint64_t seed = 0;

  void validate() const;
};

/// i.i.d. N(0, sigma0^2) entries.
Matrix init_gaussian(int m, int d, const InitConfig& init);

/// Both blocks from one init stream, w_pos first.
ClassifierParams init_classifier(int m, int d, const InitConfig& init);
DenoiserParams init_denoiser(int m, int d, const InitConfig& init);

struct ClassifierOutput {
  double f_pos = 0.0;
  double f_neg = 0.0;
  double f = 0.0;
};

ClassifierOutput classifier_forward(const ClassifierParams& params, const Sample& sample);

/// Patchwise (1/sqrt m) sum_r <w_r, x_p>^2 w_r.
std::pair<Vector, Vector> denoiser_forward(const DenoiserParams& params, const Vector& x1,
                                           const Vector& x2);

/// Single-patch denoiser output.
Vector denoiser_patch(const Matrix& w, const Vector& x);

/// Frobenius norm over every block.
template <class Params>
double frobenius_norm(const Params& p) {
  double sq = 0.0;
  for (const Matrix* b : p.blocks()) sq += b->squaredNorm();
  return std::sqrt(sq);
}

template <class Params>
bool all_finite(const Params& p) {
  for (const Matrix* b : p.blocks()) {
    if (!b->allFinite()) return false;
  }
  return true;
}

struct CheckpointHeader {
  int m = 0;
  int d = 0;
  double sigma0 = 0.0;
  std::uint64_t seed = 0;
  long iteration = 0;
};

/// Text checkpoint: '#'-prefixed header lines, then one CSV row per neuron
/// (blocks concatenated: w_pos rows then w_neg rows for the classifier).
void write_checkpoint(std::ostream& out, const CheckpointHeader& header, const ClassifierParams& p);
void write_checkpoint(std::ostream& out, const CheckpointHeader& header, const DenoiserParams& p);
std::pair<CheckpointHeader, ClassifierParams> read_classifier_checkpoint(std::istream& in);
std::pair<CheckpointHeader, DenoiserParams> read_denoiser_checkpoint(std::istream& in);

}  // namespace featdyn
