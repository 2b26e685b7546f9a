#pragma once

#include <array>
#include <cstdint>

namespace featdyn {

/// xoshiro256** seeded through splitmix64.
///
/// Streams are bit-reproducible across platforms: the generator is fully
/// specified here and normals come from our own Box-Muller transform
/// instead of std::normal_distribution (whose algorithm is
/// implementation-defined).
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent stream for a (seed, purpose) pair.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal.
  double normal();

  /// +1 or -1 with probability 1/2 each.
  int rademacher();

private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Purpose tags so that independent parts of an experiment never share a
/// stream even when they are given the same user seed.
enum class StreamId : std::uint64_t {
  labels = 1,
  noise = 2,
  init = 3,
  diffusion_noise = 4,
  test_data = 5,
  signal_basis = 6,
};

inline Rng make_stream(std::uint64_t seed, StreamId id) {
  return Rng::stream(seed, static_cast<std::uint64_t>(id));
}

}  // namespace featdyn
