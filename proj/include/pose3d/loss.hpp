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

#ifndef POSE3D_LOSS_HPP_
#define POSE3D_LOSS_HPP_

#include <cmath>
#include <string>

#include "pose3d/tensor.hpp"

namespace pose3d {

/// Distances below this are treated as zero when differentiating MPJPE.
inline constexpr double kMpjpeGradEpsilon = 1e-12;

namespace detail {
template <typename T>
std::size_t joint_count(const Tensor<T>& pred, const Tensor<T>& truth) {
  if (pred.size() != truth.size() || pred.size() % 3 != 0) {
    throw ShapeError("mpjpe: prediction " + to_string(pred.shape()) + " and truth " +
                     to_string(truth.shape()) + " must hold the same number of 3D joints");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(truth[i])) {
      throw InvalidInputError("mpjpe: non-finite coordinate at element " + std::to_string(i));
    }
  }
  return pred.size() / 3;
}
}  // namespace detail

/// Mean per-joint position error: the average Euclidean distance between
/// corresponding 3D points. Inputs are any layout whose flat data is a list
/// of (x, y, z) triples, e.g. [frames, joints, 3] or the flat head output.
template <typename T>
T mpjpe(const Tensor<T>& pred, const Tensor<T>& truth) {
  const std::size_t n = detail::joint_count(pred, truth);
  T total{0};
  for (std::size_t j = 0; j < n; ++j) {
    const T dx = pred[3 * j] - truth[3 * j];
    const T dy = pred[3 * j + 1] - truth[3 * j + 1];
    const T dz = pred[3 * j + 2] - truth[3 * j + 2];
    total += std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  return total / static_cast<T>(n);
}

/// d mpjpe / d pred, shaped like pred. A joint closer than
/// kMpjpeGradEpsilon to its target contributes a zero gradient.
template <typename T>
Tensor<T> mpjpe_gradient(const Tensor<T>& pred, const Tensor<T>& truth) {
  const std::size_t n = detail::joint_count(pred, truth);
  Tensor<T> g(pred.shape());
  for (std::size_t j = 0; j < n; ++j) {
    const T dx = pred[3 * j] - truth[3 * j];
    const T dy = pred[3 * j + 1] - truth[3 * j + 1];
    const T dz = pred[3 * j + 2] - truth[3 * j + 2];
    const T d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (d < static_cast<T>(kMpjpeGradEpsilon)) continue;
    const T s = T{1} / (static_cast<T>(n) * d);
    g[3 * j] = dx * s;
    g[3 * j + 1] = dy * s;
    g[3 * j + 2] = dz * s;
  }
  return g;
}

}  // namespace pose3d

#endif  // POSE3D_LOSS_HPP_
