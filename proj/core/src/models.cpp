#include "featdyn/models.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace featdyn {

void InitConfig::validate() const {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ConfigError("sigma0 must be positive");
}

Matrix init_gaussian(int m, int d, const InitConfig& init) {
  if (m < 1 || d < 1) throw ConfigError("init_gaussian needs m >= 1 and d >= 1");
  init.validate();
  Rng rng = make_stream(init.seed, StreamId::init);
  Matrix w(m, d);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index k = 0; k < d; ++k) w(r, k) = init.sigma0 * rng.normal();
  return w;
}

ClassifierParams init_classifier(int m, int d, const InitConfig& init) {
  if (m < 1 || d < 1) throw ConfigError("init_classifier needs m >= 1 and d >= 1");
  init.validate();
  Rng rng = make_stream(init.seed, StreamId::init);
  ClassifierParams p{Matrix(m, d), Matrix(m, d)};
  for (Matrix* block : p.blocks())
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index k = 0; k < d; ++k) (*block)(r, k) = init.sigma0 * rng.normal();
  return p;
}

DenoiserParams init_denoiser(int m, int d, const InitConfig& init) {
  return {init_gaussian(m, d, init)};
}

ClassifierOutput classifier_forward(const ClassifierParams& params, const Sample& sample) {
  if (params.w_pos.cols() != sample.x1.size() || params.w_neg.cols() != sample.x1.size() ||
      sample.x2.size() != sample.x1.size() || params.w_pos.rows() != params.w_neg.rows()) {
    throw ShapeError("classifier_forward: dimension mismatch");
  }
  const double inv_m = 1.0 / static_cast<double>(params.width());
  auto branch = [&](const Matrix& w) {
    const Vector s1 = w * sample.x1;
    const Vector s2 = w * sample.x2;
    return inv_m * (s1.squaredNorm() + s2.squaredNorm());
  };
  ClassifierOutput out;
  out.f_pos = branch(params.w_pos);
  out.f_neg = branch(params.w_neg);
  out.f = out.f_pos - out.f_neg;
  return out;
}

Vector denoiser_patch(const Matrix& w, const Vector& x) {
  if (w.cols() != x.size()) throw ShapeError("denoiser: dimension mismatch");
  const Vector s = w * x;
  const Vector coeff = s.array().square().matrix() / std::sqrt(static_cast<double>(w.rows()));
  return w.transpose() * coeff;
}

std::pair<Vector, Vector> denoiser_forward(const DenoiserParams& params, const Vector& x1,
                                           const Vector& x2) {
  return {denoiser_patch(params.w, x1), denoiser_patch(params.w, x2)};
}

namespace {

void write_header(std::ostream& out, const CheckpointHeader& h, const char* kind) {
  out << "# kind=" << kind << '\n'
      << "# m=" << h.m << '\n'
      << "# d=" << h.d << '\n'
      << "# sigma0=" << h.sigma0 << '\n'
      << "# seed=" << h.seed << '\n'
      << "# iteration=" << h.iteration << '\n';
}

void write_rows(std::ostream& out, const Matrix& w) {
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
      if (k) out << ',';
      out << w(r, k);
    }
    out << '\n';
  }
}

struct RawCheckpoint {
  CheckpointHeader header;
  std::string kind;
  std::vector<std::vector<double>> rows;
};

RawCheckpoint read_raw(std::istream& in) {
  RawCheckpoint raw;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      if (key == "kind") raw.kind = value;
      else if (key == "m") raw.header.m = std::stoi(value);
      else if (key == "d") raw.header.d = std::stoi(value);
      else if (key == "sigma0") raw.header.sigma0 = std::stod(value);
      else if (key == "seed") raw.header.seed = std::stoull(value);
      else if (key == "iteration") raw.header.iteration = std::stol(value);
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    raw.rows.push_back(std::move(row));
  }
  return raw;
}

Matrix rows_to_matrix(const RawCheckpoint& raw, std::size_t first, int m, int d) {
  Matrix w(m, d);
  for (int r = 0; r < m; ++r) {
    const auto& row = raw.rows.at(first + static_cast<std::size_t>(r));
    if (static_cast<int>(row.size()) != d) throw FormatError("checkpoint row has wrong length");
    for (int k = 0; k < d; ++k) w(r, k) = row[static_cast<std::size_t>(k)];
  }
  return w;
}

}  // namespace

void write_checkpoint(std::ostream& out, const CheckpointHeader& header, const ClassifierParams& p) {
  const auto old = out.precision(17);
  write_header(out, header, "classifier");
  write_rows(out, p.w_pos);
  write_rows(out, p.w_neg);
  out.precision(old);
}

void write_checkpoint(std::ostream& out, const CheckpointHeader& header, const DenoiserParams& p) {
  const auto old = out.precision(17);
  write_header(out, header, "denoiser");
  write_rows(out, p.w);
  out.precision(old);
}

std::pair<CheckpointHeader, ClassifierParams> read_classifier_checkpoint(std::istream& in) {
  RawCheckpoint raw = read_raw(in);
  if (raw.kind != "classifier") throw FormatError("not a classifier checkpoint");
  const int m = raw.header.m, d = raw.header.d;
  if (raw.rows.size() != static_cast<std::size_t>(2 * m)) throw FormatError("checkpoint row count mismatch");
  ClassifierParams p{rows_to_matrix(raw, 0, m, d), rows_to_matrix(raw, static_cast<std::size_t>(m), m, d)};
  return {raw.header, std::move(p)};
}

std::pair<CheckpointHeader, DenoiserParams> read_denoiser_checkpoint(std::istream& in) {
  RawCheckpoint raw = read_raw(in);
  if (raw.kind != "denoiser") throw FormatError("not a denoiser checkpoint");
  if (raw.rows.size() != static_cast<std::size_t>(raw.header.m)) throw FormatError("checkpoint row count mismatch");
  return {raw.header, DenoiserParams{rows_to_matrix(raw, 0, raw.header.m, raw.header.d)}};
}

}  // namespace featdyn
