#pragma once

#include "featdyn/data_model.hpp"
#include "featdyn/models.hpp"
#include "featdyn/objectives.hpp"
#include "featdyn/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace featdyn {

/// Raw IDX container (unsigned byte payloads only).
struct IdxTensor {
  std::uint32_t magic = 0;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> data;

  std::size_t element_count() const;
  bool operator==(const IdxTensor&) const = default;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Big-endian magic and dimension sizes, then row-major payload.
IdxTensor parse_idx(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_idx(const IdxTensor& tensor);
IdxTensor read_idx_file(const std::filesystem::path& path);

/// unit: pixel / 255. standardized: (pixel / 255 - 0.1307) / 0.3081, the
/// usual MNIST normalization, which gives every pixel roughly unit variance
/// so that ||x1|| is about snr_tilde * ||x2||.
enum class PixelScaling { unit, standardized };

std::string_view to_string(PixelScaling scaling);

inline constexpr double kMnistPixelMean = 0.1307;
inline constexpr double kMnistPixelStd = 0.3081;

struct NoisyMnistConfig {
  double snr_tilde = 0.1;
  PixelScaling scaling = PixelScaling::unit;
  std::pair<int, int> classes{1, 0};  // first -> label +1, second -> label -1
  int per_class = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// x1 = snr_tilde * scaled image (784 entries), x2 ~ N(0, I_784).
/// Takes the first `per_class` images of each class in file order (skipping
/// the first `skip_per_class` matches); samples keep file order.
Dataset build_noisy_mnist(const IdxTensor& images, const IdxTensor& labels, const NoisyMnistConfig& cfg,
                          int skip_per_class = 0);

/// d/dx F_j(W, x) over both patches, j = sample label.
Vector input_gradient_map(const ClassifierParams& params, const Sample& sample);

/// Forward-diffuse x0 = [x1; x2] with a fresh epsilon, then invert with the
/// denoiser's noise prediction: (x_t - beta f(W, x_t)) / alpha.
Vector denoise_reconstruct(const DenoiserParams& params, const Vector& x0, const NoiseSchedule& sched, Rng& rng);

/// Same with a caller supplied epsilon (length 2d).
Vector denoise_reconstruct_with(const DenoiserParams& params, const Vector& x0, const NoiseSchedule& sched,
                                const Vector& eps);

/// Fraction of samples with sign(f) == label; f == 0 counts as +1.
double accuracy(const ClassifierParams& params, const Dataset& data);

}  // namespace featdyn
