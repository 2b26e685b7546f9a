#pragma once

#include "featdyn/data_model.hpp"
#include "featdyn/rng.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>

namespace testutil {

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("featdyn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Small dataset with arbitrary (not orthogonal) patches, handy for
// objectives that must hold on any data.
inline featdyn::Dataset random_dataset(int n, int d, std::uint64_t seed) {
  featdyn::Rng rng(seed);
  std::vector<featdyn::Sample> samples;
  for (int i = 0; i < n; ++i) {
    featdyn::Sample s;
    s.x1 = featdyn::Vector(d);
    s.x2 = featdyn::Vector(d);
    for (int k = 0; k < d; ++k) s.x1[k] = rng.normal();
    for (int k = 0; k < d; ++k) s.x2[k] = rng.normal();
    s.label = rng.rademacher();
    samples.push_back(s);
  }
  return featdyn::Dataset(std::move(samples), std::nullopt);
}

}  // namespace testutil
