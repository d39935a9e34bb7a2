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

#ifndef POSE3D_NETWORK_HPP_
#define POSE3D_NETWORK_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pose3d/layers.hpp"
#include "pose3d/rng.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d {

inline constexpr std::size_t kNumConv = 5;
inline constexpr std::size_t kPoseJoints = 17;
inline constexpr std::size_t kWindowFrames = 5;
inline constexpr std::size_t kDefaultFlatten = 9680;

/// Kernel extents (time, height, width) of conv1..conv5.
inline constexpr std::array<std::array<std::size_t, 3>, kNumConv> kKernelPlan{
    {{3, 5, 5}, {2, 5, 5}, {1, 5, 5}, {1, 3, 3}, {1, 3, 3}}};

/// Spatial 2x2 pooling follows conv1, conv2 and conv5.
inline constexpr std::array<bool, kNumConv> kPoolAfter{true, true, false, false, true};

/// Network topology. Only the channel counts and the input/head sizes vary;
/// kernel extents and pooling placement are fixed.
struct ArchitectureConfig {
  std::array<std::size_t, kNumConv> channel_plan{16, 24, 32, 40, 40};
  std::size_t in_channels = 3;
  std::size_t frames = kWindowFrames;
  std::size_t input_size = 128;
  std::size_t joints = kPoseJoints;
  /// Required flatten length; zero disables the check (reduced networks).
  std::size_t expected_flatten = kDefaultFlatten;

  std::size_t outputs() const { return frames * joints * 3; }
  Shape input_shape() const { return {in_channels, frames, input_size, input_size}; }

  /// Same topology on a smaller input with no flatten constraint.
  static ArchitectureConfig reduced(std::array<std::size_t, kNumConv> plan, std::size_t input_size,
                                    std::size_t joints = kPoseJoints) {
    ArchitectureConfig cfg;
    cfg.channel_plan = plan;
    cfg.input_size = input_size;
    cfg.joints = joints;
    cfg.expected_flatten = 0;
    return cfg;
  }

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

struct Stage {
  std::string name;
  Shape shape;
};

/// Activation shapes from input to head output. Throws ConfigError when an
/// extent collapses or the flatten length differs from expected_flatten.
inline std::vector<Stage> stage_shapes(const ArchitectureConfig& cfg) {
  if (cfg.in_channels == 0 || cfg.frames == 0 || cfg.input_size == 0 || cfg.joints == 0) {
    throw ConfigError("architecture extents must be >= 1");
  }
  std::vector<Stage> stages{{"input", cfg.input_shape()}};
  Shape s = cfg.input_shape();
  std::size_t pool = 0;
  for (std::size_t i = 0; i < kNumConv; ++i) {
    const auto& k = kKernelPlan[i];
    if (cfg.channel_plan[i] == 0) throw ConfigError("channel_plan entries must be >= 1");
    if (s[1] < k[0] || s[2] < k[1] || s[3] < k[2]) {
      throw ConfigError("conv" + std::to_string(i + 1) + " kernel does not fit input " + to_string(s));
    }
    s = {cfg.channel_plan[i], s[1] - k[0] + 1, s[2] - k[1] + 1, s[3] - k[2] + 1};
    stages.push_back({"conv" + std::to_string(i + 1), s});
    if (kPoolAfter[i]) {
      s = {s[0], s[1], (s[2] + 1) / 2, (s[3] + 1) / 2};
      stages.push_back({"pool" + std::to_string(++pool), s});
    }
  }
  const std::size_t flat = s[0] * s[1] * s[2] * s[3];
  if (cfg.expected_flatten != 0 && flat != cfg.expected_flatten) {
    throw ConfigError("flatten size " + std::to_string(flat) + " != required " +
                      std::to_string(cfg.expected_flatten) + " (channel_plan[4] = " +
                      std::to_string(cfg.channel_plan[4]) + ")");
  }
  stages.push_back({"flatten", {flat}});
  stages.push_back({"head", {cfg.outputs()}});
  return stages;
}

inline std::size_t flatten_size(const ArchitectureConfig& cfg) {
  return stage_shapes(cfg).end()[-2].shape[0];
}

/// All learnable tensors of the pose network. The same type carries
/// gradients (see backward()).
template <typename T>
struct NetworkParams {
  ArchitectureConfig config;
  std::array<Conv3d<T>, kNumConv> conv;
  std::array<PRelu<T>, kNumConv> prelu;
  Dense<T> head;

  /// Calls fn(name, tensor) for every parameter in serialization order.
  template <typename Fn>
  void visit(Fn&& fn) {
    for (std::size_t i = 0; i < kNumConv; ++i) {
      const std::string n = std::to_string(i + 1);
      fn("conv" + n + ".kernel", conv[i].kernel);
      fn("conv" + n + ".bias", conv[i].bias);
      fn("prelu" + n + ".slope", prelu[i].slope);
    }
    fn(std::string("head.weights"), head.weights);
    fn(std::string("head.bias"), head.bias);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    const_cast<NetworkParams*>(this)->visit(
        [&](const std::string& name, Tensor<T>& t) { fn(name, static_cast<const Tensor<T>&>(t)); });
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    visit([&](const std::string&, const Tensor<T>& t) { n += t.size(); });
    return n;
  }

  /// Zero-filled tensors with this network's shapes.
  NetworkParams zeros_like() const {
    NetworkParams z = *this;
    z.visit([](const std::string&, Tensor<T>& t) { t.fill(T{0}); });
    return z;
  }

  template <typename U>
  NetworkParams<U> cast() const {
    NetworkParams<U> out;
    out.config = config;
    for (std::size_t i = 0; i < kNumConv; ++i) {
      out.conv[i] = {conv[i].kernel.template cast<U>(), conv[i].bias.template cast<U>()};
      out.prelu[i] = {prelu[i].slope.template cast<U>()};
    }
    out.head = {head.weights.template cast<U>(), head.bias.template cast<U>()};
    return out;
  }

  friend bool operator==(const NetworkParams& a, const NetworkParams& b) {
    if (!(a.config == b.config)) return false;
    bool eq = true;
    std::vector<const Tensor<T>*> bs;
    b.visit([&](const std::string&, const Tensor<T>& t) { bs.push_back(&t); });
    std::size_t i = 0;
    a.visit([&](const std::string&, const Tensor<T>& t) { eq = eq && t == *bs[i++]; });
    return eq;
  }
};

/// Closed-form parameter count for `cfg`.
inline std::size_t parameter_count(const ArchitectureConfig& cfg) {
  std::size_t n = 0;
  std::size_t in = cfg.in_channels;
  for (std::size_t i = 0; i < kNumConv; ++i) {
    const auto& k = kKernelPlan[i];
    const std::size_t out = cfg.channel_plan[i];
    n += out * in * k[0] * k[1] * k[2] + out + out;
    in = out;
  }
  return n + cfg.outputs() * flatten_size(cfg) + cfg.outputs();
}

/// Xavier weights, zero biases (conv and head), PReLU slopes at 0.01.
template <typename T>
NetworkParams<T> build_network(const ArchitectureConfig& cfg, Rng& rng) {
  stage_shapes(cfg);
  NetworkParams<T> p;
  p.config = cfg;
  std::size_t in = cfg.in_channels;
  for (std::size_t i = 0; i < kNumConv; ++i) {
    const auto& k = kKernelPlan[i];
    p.conv[i] = Conv3d<T>::init(cfg.channel_plan[i], in, k[0], k[1], k[2], rng);
    p.prelu[i] = PRelu<T>::init(cfg.channel_plan[i]);
    in = cfg.channel_plan[i];
  }
  p.head = Dense<T>::init(cfg.outputs(), flatten_size(cfg), rng);
  return p;
}

/// Intermediate values retained for backward().
template <typename T>
struct ForwardTrace {
  std::array<Tensor<T>, kNumConv> conv_input;
  std::array<Tensor<T>, kNumConv> pre_activation;
  std::array<PoolIndices, kNumConv> pool;  // populated where kPoolAfter
  Tensor<T> flat;
  std::vector<Stage> stages;  // observed shapes, input to head
};

template <typename T>
struct ForwardResult {
  Tensor<T> output;
  ForwardTrace<T> trace;
};

template <typename T>
ForwardResult<T> forward(const NetworkParams<T>& params, const Tensor<T>& x) {
  if (x.shape() != params.config.input_shape()) {
    throw ShapeError("network input must be " + to_string(params.config.input_shape()) + ", got " +
                     to_string(x.shape()));
  }
  ForwardResult<T> r;
  auto& tr = r.trace;
  tr.stages.push_back({"input", x.shape()});
  Tensor<T> a = x;
  std::size_t pool = 0;
  for (std::size_t i = 0; i < kNumConv; ++i) {
    tr.conv_input[i] = std::move(a);
    tr.pre_activation[i] = conv3d_forward(params.conv[i], tr.conv_input[i]);
    tr.stages.push_back({"conv" + std::to_string(i + 1), tr.pre_activation[i].shape()});
    a = prelu_forward(params.prelu[i], tr.pre_activation[i]);
    if (kPoolAfter[i]) {
      auto pr = maxpool_forward(a);
      tr.pool[i] = std::move(pr.indices);
      a = std::move(pr.output);
      tr.stages.push_back({"pool" + std::to_string(++pool), a.shape()});
    }
  }
  tr.flat = flatten(a);
  tr.stages.push_back({"flatten", tr.flat.shape()});
  r.output = dense_forward(params.head, tr.flat);
  tr.stages.push_back({"head", r.output.shape()});
  return r;
}

/// Output only; no trace retained beyond the call.
template <typename T>
Tensor<T> predict(const NetworkParams<T>& params, const Tensor<T>& x) {
  return forward(params, x).output;
}

/// Parameter gradients for upstream gradient `grad_out` at the head output.
/// When input_grad is non-null it receives the gradient at the network input.
template <typename T>
NetworkParams<T> backward(const NetworkParams<T>& params, const ForwardTrace<T>& trace,
                          const Tensor<T>& grad_out, Tensor<T>* input_grad = nullptr) {
  if (grad_out.rank() != 1 || grad_out.size() != params.config.outputs() ||
      trace.flat.size() != params.head.inputs()) {
    throw ShapeError("backward: trace or gradient does not match network");
  }
  NetworkParams<T> g;
  g.config = params.config;
  auto dh = dense_backward(params.head, trace.flat, grad_out);
  g.head = {std::move(dh.weights), std::move(dh.bias)};

  const std::size_t last = kNumConv - 1;
  Shape last_shape = trace.pre_activation[last].shape();
  if (kPoolAfter[last]) last_shape = trace.pool[last].output_shape;
  Tensor<T> grad = dh.input.reshaped(last_shape);

  for (std::size_t i = kNumConv; i-- > 0;) {
    if (kPoolAfter[i]) grad = maxpool_backward(trace.pool[i], grad);
    auto dp = prelu_backward(params.prelu[i], trace.pre_activation[i], grad);
    g.prelu[i] = {std::move(dp.slope)};
    auto dc = conv3d_backward(params.conv[i], trace.conv_input[i], dp.input, i > 0 || input_grad);
    g.conv[i] = {std::move(dc.kernel), std::move(dc.bias)};
    grad = std::move(dc.input);
  }
  if (input_grad) *input_grad = std::move(grad);
  return g;
}

}  // namespace pose3d

#endif  // POSE3D_NETWORK_HPP_
