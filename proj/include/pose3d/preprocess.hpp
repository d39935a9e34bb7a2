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

#ifndef POSE3D_PREPROCESS_HPP_
#define POSE3D_PREPROCESS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pose3d/dataset.hpp"
#include "pose3d/image.hpp"
#include "pose3d/parallel.hpp"
#include "pose3d/rng.hpp"
#include "pose3d/sample.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d {

inline constexpr double kGcnEpsilon = 1e-8;

/// Global contrast normalisation per channel (axis 0): each channel is shifted
/// to zero mean and divided by max(stddev, kGcnEpsilon), pooling all remaining
/// axes. Population standard deviation.
template <typename T>
Tensor<T> gcn(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  const std::size_t per = x.size() / x.extent(0);
  for (std::size_t c = 0; c < x.extent(0); ++c) {
    const std::size_t begin = c * per;
    double mean = 0;
    for (std::size_t e = begin; e < begin + per; ++e) mean += static_cast<double>(x[e]);
    mean /= static_cast<double>(per);
    double residual = 0;
    bool constant = true;
    for (std::size_t e = begin; e < begin + per; ++e) {
      residual += static_cast<double>(x[e]) - mean;
      constant = constant && x[e] == x[begin];
    }
    if (constant) continue;  // out is already zero
    mean += residual / static_cast<double>(per);
    double var = 0;
    for (std::size_t e = begin; e < begin + per; ++e) {
      const double d = static_cast<double>(x[e]) - mean;
      var += d * d;
    }
    const double scale = std::max(std::sqrt(var / static_cast<double>(per)), kGcnEpsilon);
    for (std::size_t e = begin; e < begin + per; ++e) {
      out[e] = static_cast<T>((static_cast<double>(x[e]) - mean) / scale);
    }
  }
  return out;
}

/// Stacks equally sized frames into [3, frames, size, size] and applies gcn().
template <typename T>
Tensor<T> window_tensor(std::span<const Image> frames) {
  if (frames.empty()) throw InvalidInputError("window_tensor: no frames");
  const std::size_t W = frames[0].width, H = frames[0].height;
  Tensor<T> x({3, frames.size(), H, W});
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (frames[t].width != W || frames[t].height != H) throw ShapeError("window_tensor: frame sizes differ");
    for (std::size_t y = 0; y < H; ++y)
      for (std::size_t px = 0; px < W; ++px)
        for (std::size_t c = 0; c < 3; ++c) x(c, t, y, px) = static_cast<T>(frames[t].at(px, y, c));
  }
  return gcn(x);
}

/// Subtracts joint 0 (pelvis) from every joint of each frame of [frames, joints, 3].
template <typename T>
Tensor<T> center_pelvis(const Tensor<T>& joints) {
  if (joints.rank() != 3 || joints.extent(2) != 3) {
    throw ShapeError("center_pelvis: expected [frames, joints, 3], got " + to_string(joints.shape()));
  }
  Tensor<T> out(joints.shape());
  for (std::size_t f = 0; f < joints.extent(0); ++f)
    for (std::size_t j = 0; j < joints.extent(1); ++j)
      for (std::size_t c = 0; c < 3; ++c) out(f, j, c) = joints(f, j, c) - joints(f, 0, c);
  return out;
}

/// Integer frame stride approximating source_hz / target_hz (never below 1).
inline std::size_t decimation_stride(double source_hz, double target_hz) {
  if (!(source_hz > 0) || !(target_hz > 0)) throw ConfigError("frame rates must be positive");
  return static_cast<std::size_t>(std::max(1.0, std::round(source_hz / target_hz)));
}

/// Source indices 0, stride, 2*stride, ... below frame_count.
inline std::vector<std::size_t> decimated_indices(std::size_t frame_count, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < frame_count; i += stride) out.push_back(i);
  return out;
}

/// Square crop around the box followed by bilinear resize, in [0, 1] units.
inline Image preprocess_frame(const Image8& frame, const Box& box, std::size_t size) {
  return resize_bilinear(to_real(crop_square(frame, box)), size);
}

/// Preprocessed frames and pelvis-centred joints at the given source indices.
struct PreparedStream {
  std::vector<std::size_t> source_frames;
  std::vector<Image> frames;
  Tensor<double> joints;  // [n, 17, 3]
};

inline PreparedStream prepare_stream(const RawClip& clip, std::span<const std::size_t> indices,
                                     std::size_t input_size) {
  clip.validate();
  if (indices.empty()) throw InvalidInputError("prepare_stream: no frames selected");
  PreparedStream s;
  s.source_frames.assign(indices.begin(), indices.end());
  s.frames.resize(indices.size());
  parallel_for(indices.size(), [&](std::size_t i) {
    const std::size_t f = indices[i];
    s.frames[i] = preprocess_frame(clip.frames.at(f), clip.boxes.at(f), input_size);
  }, 4);
  const std::size_t J = clip.joints.extent(1);
  Tensor<double> raw({indices.size(), J, 3});
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t c = 0; c < 3; ++c) raw(i, j, c) = clip.joints(indices[i], j, c);
  s.joints = center_pelvis(raw);
  return s;
}

struct WindowOptions {
  double target_hz = 13.0;
  std::size_t window = 5;
  /// Windows drawn per clip; zero takes every start position.
  std::size_t count = 0;
  std::size_t input_size = 128;
};

template <typename T>
struct WindowSampling {
  std::vector<ClipSample<T>> samples;
  std::size_t too_short = 0;  // clips that could not supply a single window
};

/// Seeded-random window start offsets over the decimated stream, sorted, distinct.
inline std::vector<std::size_t> choose_window_starts(std::size_t decimated, std::size_t window,
                                                     std::size_t count, Rng& rng) {
  if (decimated < window) return {};
  const std::size_t positions = decimated - window + 1;
  std::vector<std::size_t> starts(positions);
  for (std::size_t i = 0; i < positions; ++i) starts[i] = i;
  if (count != 0 && count < positions) {
    // Partial Fisher-Yates: the first `count` entries become a uniform sample.
    for (std::size_t i = 0; i < count; ++i) std::swap(starts[i], starts[i + rng.below(positions - i)]);
    starts.resize(count);
    std::sort(starts.begin(), starts.end());
  }
  return starts;
}

/// Decimates the clip to ~target_hz, draws windows of consecutive decimated
/// frames and preprocesses each (crop, resize, GCN) with pelvis-centred targets.
template <typename T>
WindowSampling<T> sample_windows(const RawClip& clip, const WindowOptions& opt, Rng& rng) {
  WindowSampling<T> out;
  const std::size_t stride = decimation_stride(clip.meta.fps, opt.target_hz);
  const auto decimated = decimated_indices(clip.frame_count(), stride);
  const auto starts = choose_window_starts(decimated.size(), opt.window, opt.count, rng);
  if (starts.empty()) {
    out.too_short = 1;
    return out;
  }
  std::vector<std::size_t> used;
  for (std::size_t s : starts)
    for (std::size_t k = 0; k < opt.window; ++k) used.push_back(s + k);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  std::vector<std::size_t> source;
  for (std::size_t d : used) source.push_back(decimated[d]);
  const PreparedStream stream = prepare_stream(clip, source, opt.input_size);
  auto pos = [&](std::size_t d) { return static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), d) - used.begin()); };

  const std::size_t J = clip.joints.extent(1);
  for (std::size_t s : starts) {
    ClipSample<T> cs;
    cs.clip = clip.id;
    std::vector<Image> frames;
    Tensor<T> target({opt.window, J, 3});
    for (std::size_t k = 0; k < opt.window; ++k) {
      const std::size_t p = pos(s + k);
      frames.push_back(stream.frames[p]);
      cs.frames.push_back(stream.source_frames[p]);
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t c = 0; c < 3; ++c) target(k, j, c) = static_cast<T>(stream.joints(p, j, c));
    }
    cs.input = window_tensor<T>(frames);
    cs.target = std::move(target);
    out.samples.push_back(std::move(cs));
  }
  return out;
}

}  // namespace pose3d

#endif  // POSE3D_PREPROCESS_HPP_
