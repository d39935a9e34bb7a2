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

#ifndef POSE3D_SAMPLE_HPP_
#define POSE3D_SAMPLE_HPP_

#include <string>
#include <vector>

#include "pose3d/tensor.hpp"

namespace pose3d {

/// A preprocessed clip window paired with its pose target.
template <typename T>
struct Sample {
  Tensor<T> input;   // [3, frames, size, size], contrast-normalised
  Tensor<T> target;  // [frames, joints, 3], millimetres, pelvis-centred
  std::string clip;
  std::vector<std::size_t> frames;  // source frame indices
};

template <typename T>
using ClipSample = Sample<T>;

}  // namespace pose3d

#endif  // POSE3D_SAMPLE_HPP_
