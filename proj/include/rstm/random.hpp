// Copyright 2026 The rstm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSTM_RANDOM_HPP
#define RSTM_RANDOM_HPP

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <random>

namespace rstm {

/// Seedable, splittable random stream.
///
/// A stream is identified by (seed, stream id); split() derives an
/// independent child stream so that e.g. direction sampling and noise draws
/// never interleave. Reproducible on a given standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  Rng split(std::uint64_t id) const {
    // splitmix64 finalizer keeps child ids well separated from the parent
    std::uint64_t z = stream_ + 0x9e3779b97f4a7c15ull * (id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return Rng(seed_, z);
  }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  /// Uniform point on the unit Euclidean sphere in R^d (normalized Gaussian).
  Eigen::VectorXd sphere(std::size_t d) {
    Eigen::VectorXd e(static_cast<Eigen::Index>(d));
    double norm2 = 0.0;
    do {
      for (Eigen::Index j = 0; j < e.size(); ++j) e[j] = normal();
      norm2 = e.squaredNorm();
    } while (norm2 == 0.0);
    return e / std::sqrt(norm2);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace rstm

#endif  // RSTM_RANDOM_HPP
