#include "featdyn/mnist.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

namespace featdyn {

std::size_t IdxTensor::element_count() const {
  std::size_t count = dims.empty() ? 0 : 1;
  for (auto dim : dims) count *= dim;
  return count;
}

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxTensor parse_idx(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("IDX buffer shorter than the 4-byte magic");
  IdxTensor t;
  t.magic = read_be32(bytes, 0);
  std::size_t rank = 0;
  if (t.magic == kIdxImagesMagic) rank = 3;
  else if (t.magic == kIdxLabelsMagic) rank = 1;
  else throw FormatError("unsupported IDX magic 0x" + [&] {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", t.magic);
    return std::string(buf);
  }());

  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header)
    throw FormatError("IDX header truncated: expected " + std::to_string(header) + " bytes, got " +
                      std::to_string(bytes.size()));
  for (std::size_t k = 0; k < rank; ++k) t.dims.push_back(read_be32(bytes, 4 + 4 * k));

  const std::size_t expected = t.element_count();
  const std::size_t actual = bytes.size() - header;
  if (actual != expected)
    throw FormatError("IDX payload size mismatch: expected " + std::to_string(expected) + " bytes, got " +
                      std::to_string(actual));
  t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return t;
}

std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor) {
  if (tensor.data.size() != tensor.element_count()) throw FormatError("IDX tensor dims do not match payload");
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * tensor.dims.size() + tensor.data.size());
  write_be32(out, tensor.magic);
  for (auto dim : tensor.dims) write_be32(out, dim);
  out.insert(out.end(), tensor.data.begin(), tensor.data.end());
  return out;
}

IdxTensor read_idx_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open IDX file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_idx(bytes);
}

void NoisyMnistConfig::validate() const {
  if (!(snr_tilde > 0.0) || !std::isfinite(snr_tilde)) throw ConfigError("snr_tilde must be positive");
  auto digit = [](int c) { return c >= 0 && c <= 9; };
  if (!digit(classes.first) || !digit(classes.second) || classes.first == classes.second)
    throw ConfigError("classes must be two distinct digits in 0..9");
  if (per_class < 1) throw ConfigError("per_class must be >= 1");
}

std::string_view to_string(PixelScaling scaling) {
  return scaling == PixelScaling::standardized ? "standardized" : "unit";
}

Dataset build_noisy_mnist(const IdxTensor& images, const IdxTensor& labels, const NoisyMnistConfig& cfg,
                          int skip_per_class) {
  cfg.validate();
  if (images.magic != kIdxImagesMagic || images.dims.size() != 3) throw FormatError("not an IDX image tensor");
  if (labels.magic != kIdxLabelsMagic || labels.dims.size() != 1) throw FormatError("not an IDX label tensor");
  if (images.dims[0] != labels.dims[0]) throw FormatError("image and label counts differ");

  const std::size_t pixels = std::size_t{images.dims[1]} * images.dims[2];
  const auto d = static_cast<Eigen::Index>(pixels);
  int seen_first = 0, seen_second = 0, taken_first = 0, taken_second = 0;
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < labels.data.size(); ++i) {
    const int digit = labels.data[i];
    if (digit == cfg.classes.first && taken_first < cfg.per_class) {
      if (seen_first++ >= skip_per_class) {
        picked.push_back(i);
        ++taken_first;
      }
    } else if (digit == cfg.classes.second && taken_second < cfg.per_class) {
      if (seen_second++ >= skip_per_class) {
        picked.push_back(i);
        ++taken_second;
      }
    }
    if (taken_first == cfg.per_class && taken_second == cfg.per_class) break;
  }
  if (taken_first < cfg.per_class || taken_second < cfg.per_class)
    throw ConfigError("not enough images of digits " + std::to_string(cfg.classes.first) + "/" +
                      std::to_string(cfg.classes.second) + " for per_class=" + std::to_string(cfg.per_class));

  Rng noise = make_stream(cfg.seed, StreamId::noise);
  std::vector<Sample> samples;
  samples.reserve(picked.size());
  for (std::size_t idx : picked) {
    Sample s;
    s.label = labels.data[idx] == cfg.classes.first ? 1 : -1;
    s.x1.resize(d);
    const std::uint8_t* px = images.data.data() + idx * pixels;
    for (Eigen::Index k = 0; k < d; ++k) {
      double v = static_cast<double>(px[k]) / 255.0;
      if (cfg.scaling == PixelScaling::standardized) v = (v - kMnistPixelMean) / kMnistPixelStd;
      s.x1[k] = cfg.snr_tilde * v;
    }
    s.x2.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) s.x2[k] = noise.normal();
    samples.push_back(std::move(s));
  }
  return Dataset(std::move(samples), std::nullopt);
}

Vector input_gradient_map(const ClassifierParams& params, const Sample& sample) {
  const Matrix& w = params.block(sample.label);
  if (w.cols() != sample.x1.size() || w.cols() != sample.x2.size())
    throw ShapeError("input_gradient_map: dimension mismatch");
  const double scale = 2.0 / static_cast<double>(w.rows());
  const auto d = w.cols();
  Vector out(2 * d);
  out.head(d) = scale * (w.transpose() * (w * sample.x1));
  out.tail(d) = scale * (w.transpose() * (w * sample.x2));
  return out;
}

Vector denoise_reconstruct_with(const DenoiserParams& params, const Vector& x0, const NoiseSchedule& sched,
                                const Vector& eps) {
  if (!(sched.alpha > 0.0)) throw ConfigError("denoise_reconstruct needs alpha > 0");
  const auto d = params.w.cols();
  if (x0.size() != 2 * d || eps.size() != 2 * d) throw ShapeError("denoise_reconstruct: expected 2d inputs");
  const Vector xt = sched.alpha * x0 + sched.beta * eps;
  Vector pred(2 * d);
  pred.head(d) = denoiser_patch(params.w, xt.head(d));
  pred.tail(d) = denoiser_patch(params.w, xt.tail(d));
  return (xt - sched.beta * pred) / sched.alpha;
}

Vector denoise_reconstruct(const DenoiserParams& params, const Vector& x0, const NoiseSchedule& sched, Rng& rng) {
  Vector eps(x0.size());
  for (Eigen::Index k = 0; k < eps.size(); ++k) eps[k] = rng.normal();
  return denoise_reconstruct_with(params, x0, sched, eps);
}

double accuracy(const ClassifierParams& params, const Dataset& data) {
  if (data.empty()) throw ConfigError("accuracy needs a non-empty dataset");
  long correct = 0;
  for (const Sample& s : data.samples()) {
    const int predicted = classifier_forward(params, s).f >= 0.0 ? 1 : -1;
    if (predicted == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace featdyn
