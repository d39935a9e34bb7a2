// Copyright 2026 The pose3d Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POSE3D_RNG_HPP_
#define POSE3D_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "pose3d/tensor.hpp"

namespace pose3d {

/// Counter-based SplitMix64 generator.
///
/// Draw n returns mix(seed + (n + 1) * 0x9E3779B97F4A7C15) where mix is the
/// SplitMix64 finalizer (xor-shift 30, *0xBF58476D1CE4E5B9, xor-shift 27,
/// *0x94D049BB133111EB, xor-shift 31). Only integer arithmetic is involved,
/// so a seed yields the same stream on every platform. Uniform reals use the
/// top 53 bits.
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix(seed_ + counter_ * kGamma);
  }

  /// Uniform on [0, 1).
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (one draw per call, the sine branch discarded).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Independent child stream derived from this generator's next draw.
  Rng fork() noexcept { return Rng(next_u64()); }

  template <typename It>
  void shuffle(It first, It last) noexcept {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Glorot/Xavier uniform initialisation: i.i.d. U[-b, b] with
/// b = sqrt(6 / (fan_in + fan_out)).
template <typename T>
Tensor<T> xavier_init(const Shape& shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  if (fan_in == 0 || fan_out == 0) throw ConfigError("xavier_init: fan_in and fan_out must be >= 1");
  Tensor<T> out(shape);
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (T& v : out.data()) v = static_cast<T>(rng.uniform(-bound, bound));
  return out;
}

}  // namespace pose3d

#endif  // POSE3D_RNG_HPP_
