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

#ifndef POSE3D_LAYERS_HPP_
#define POSE3D_LAYERS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "pose3d/parallel.hpp"
#include "pose3d/rng.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d {

// All layers operate on single samples laid out as [channels, time, height, width]
// (rank-1 vectors for the dense head). Convolutions are valid-mode with unit
// stride in every dimension.

/// 3D convolution layer. kernel is [out_ch, in_ch, kt, kh, kw], bias is [out_ch].
template <typename T>
struct Conv3d {
  Tensor<T> kernel;
  Tensor<T> bias;

  std::size_t out_channels() const { return kernel.extent(0); }
  std::size_t in_channels() const { return kernel.extent(1); }
  std::size_t kt() const { return kernel.extent(2); }
  std::size_t kh() const { return kernel.extent(3); }
  std::size_t kw() const { return kernel.extent(4); }

  /// Xavier-initialised kernel with zero bias.
  static Conv3d init(std::size_t out_ch, std::size_t in_ch, std::size_t kt, std::size_t kh,
                     std::size_t kw, Rng& rng) {
    const std::size_t receptive = kt * kh * kw;
    return Conv3d{xavier_init<T>({out_ch, in_ch, kt, kh, kw}, in_ch * receptive, out_ch * receptive, rng),
                  Tensor<T>({out_ch}, T{0})};
  }
};

template <typename T>
struct Conv3dGrads {
  Tensor<T> kernel;
  Tensor<T> bias;
  Tensor<T> input;
};

/// Output shape of a valid-mode convolution of `input` by `layer`.
template <typename T>
Shape conv3d_output_shape(const Conv3d<T>& layer, const Shape& input) {
  if (layer.kernel.rank() != 5 || layer.bias.rank() != 1 ||
      layer.bias.extent(0) != layer.out_channels()) {
    throw ShapeError("conv3d: kernel must be [o,c,kt,kh,kw] with bias [o]");
  }
  if (input.size() != 4) throw ShapeError("conv3d: input must be [c,t,h,w], got " + to_string(input));
  if (input[0] != layer.in_channels()) {
    throw ShapeError("conv3d: input has " + std::to_string(input[0]) + " channels, kernel expects " +
                     std::to_string(layer.in_channels()));
  }
  if (input[1] < layer.kt() || input[2] < layer.kh() || input[3] < layer.kw()) {
    throw ShapeError("conv3d: input " + to_string(input) + " smaller than kernel " +
                     to_string(layer.kernel.shape()));
  }
  return {layer.out_channels(), input[1] - layer.kt() + 1, input[2] - layer.kh() + 1,
          input[3] - layer.kw() + 1};
}

/// out[o,i,j,k] = bias[o] + sum_{c,m,n,l} x[c,i+m,j+n,k+l] * kernel[o,c,m,n,l]
template <typename T>
Tensor<T> conv3d_forward(const Conv3d<T>& layer, const Tensor<T>& x) {
  const Shape os = conv3d_output_shape(layer, x.shape());
  Tensor<T> out(os);
  const std::size_t C = x.extent(0), H = x.extent(2), W = x.extent(3);
  const std::size_t KT = layer.kt(), KH = layer.kh(), KW = layer.kw();
  const std::size_t OT = os[1], OH = os[2], OW = os[3];
  const T* xs = x.data().data();
  const T* ks = layer.kernel.data().data();
  T* ys = out.data().data();

  parallel_for(os[0], [&](std::size_t o) {
    T* yo = ys + o * OT * OH * OW;
    std::fill(yo, yo + OT * OH * OW, layer.bias[o]);
    for (std::size_t c = 0; c < C; ++c) {
      const T* xc = xs + c * x.extent(1) * H * W;
      const T* kc = ks + (o * C + c) * KT * KH * KW;
      for (std::size_t m = 0; m < KT; ++m)
        for (std::size_t n = 0; n < KH; ++n)
          for (std::size_t l = 0; l < KW; ++l) {
            const T w = kc[(m * KH + n) * KW + l];
            for (std::size_t i = 0; i < OT; ++i)
              for (std::size_t j = 0; j < OH; ++j) {
                const T* xr = xc + ((i + m) * H + (j + n)) * W + l;
                T* yr = yo + (i * OH + j) * OW;
                for (std::size_t k = 0; k < OW; ++k) yr[k] += w * xr[k];
              }
          }
    }
  });
  return out;
}

/// Gradients of a scalar loss with respect to kernel, bias and input, given
/// the upstream gradient at the layer output. This is the exact transpose of
/// the forward linear map. With need_input_grad false the input gradient is
/// left at zero.
template <typename T>
Conv3dGrads<T> conv3d_backward(const Conv3d<T>& layer, const Tensor<T>& x, const Tensor<T>& grad_out,
                               bool need_input_grad = true) {
  const Shape os = conv3d_output_shape(layer, x.shape());
  require_same_shape(os, grad_out.shape(), "conv3d_backward");
  const std::size_t O = os[0], C = x.extent(0), TT = x.extent(1), H = x.extent(2), W = x.extent(3);
  const std::size_t KT = layer.kt(), KH = layer.kh(), KW = layer.kw();
  const std::size_t OT = os[1], OH = os[2], OW = os[3];

  Conv3dGrads<T> g{Tensor<T>(layer.kernel.shape()), Tensor<T>(layer.bias.shape()), Tensor<T>(x.shape())};
  const T* xs = x.data().data();
  const T* gs = grad_out.data().data();
  const T* ks = layer.kernel.data().data();
  T* gk = g.kernel.data().data();
  T* gx = g.input.data().data();

  for (std::size_t o = 0; o < O; ++o) {
    T s{0};
    const T* go = gs + o * OT * OH * OW;
    for (std::size_t e = 0; e < OT * OH * OW; ++e) s += go[e];
    g.bias[o] = s;
  }

  parallel_for(O, [&](std::size_t o) {
    const T* go = gs + o * OT * OH * OW;
    for (std::size_t c = 0; c < C; ++c) {
      const T* xc = xs + c * TT * H * W;
      T* kc = gk + (o * C + c) * KT * KH * KW;
      for (std::size_t m = 0; m < KT; ++m)
        for (std::size_t n = 0; n < KH; ++n)
          for (std::size_t l = 0; l < KW; ++l) {
            T s{0};
            for (std::size_t i = 0; i < OT; ++i)
              for (std::size_t j = 0; j < OH; ++j) {
                const T* xr = xc + ((i + m) * H + (j + n)) * W + l;
                const T* gr = go + (i * OH + j) * OW;
                for (std::size_t k = 0; k < OW; ++k) s += gr[k] * xr[k];
              }
            kc[(m * KH + n) * KW + l] = s;
          }
    }
  });

  if (!need_input_grad) return g;
  parallel_for(C, [&](std::size_t c) {
    T* xc = gx + c * TT * H * W;
    for (std::size_t o = 0; o < O; ++o) {
      const T* go = gs + o * OT * OH * OW;
      const T* kc = ks + (o * C + c) * KT * KH * KW;
      for (std::size_t m = 0; m < KT; ++m)
        for (std::size_t n = 0; n < KH; ++n)
          for (std::size_t l = 0; l < KW; ++l) {
            const T w = kc[(m * KH + n) * KW + l];
            for (std::size_t i = 0; i < OT; ++i)
              for (std::size_t j = 0; j < OH; ++j) {
                T* xr = xc + ((i + m) * H + (j + n)) * W + l;
                const T* gr = go + (i * OH + j) * OW;
                for (std::size_t k = 0; k < OW; ++k) xr[k] += w * gr[k];
              }
          }
    }
  });
  return g;
}

/// Parametric ReLU with one learnable slope per channel (axis 0).
template <typename T>
struct PRelu {
  Tensor<T> slope;

  static PRelu init(std::size_t channels, T initial = T(0.01)) {
    return PRelu{Tensor<T>({channels}, initial)};
  }
};

template <typename T>
struct PReluGrads {
  Tensor<T> slope;
  Tensor<T> input;
};

namespace detail {
template <typename T>
std::size_t prelu_channel_stride(const PRelu<T>& layer, const Tensor<T>& x) {
  if (layer.slope.rank() != 1 || x.extent(0) != layer.slope.extent(0)) {
    throw ShapeError("prelu: input channel axis " + to_string(x.shape()) + " does not match " +
                     std::to_string(layer.slope.size()) + " slopes");
  }
  return x.size() / x.extent(0);
}
}  // namespace detail

template <typename T>
Tensor<T> prelu_forward(const PRelu<T>& layer, const Tensor<T>& x) {
  const std::size_t per = detail::prelu_channel_stride(layer, x);
  Tensor<T> y(x.shape());
  for (std::size_t c = 0; c < x.extent(0); ++c) {
    const T a = layer.slope[c];
    for (std::size_t e = c * per; e < (c + 1) * per; ++e) y[e] = x[e] > T{0} ? x[e] : a * x[e];
  }
  return y;
}

/// At x == 0 the negative branch is used for both gradients.
template <typename T>
PReluGrads<T> prelu_backward(const PRelu<T>& layer, const Tensor<T>& x, const Tensor<T>& grad_out) {
  require_same_shape(x.shape(), grad_out.shape(), "prelu_backward");
  const std::size_t per = detail::prelu_channel_stride(layer, x);
  PReluGrads<T> g{Tensor<T>(layer.slope.shape()), Tensor<T>(x.shape())};
  for (std::size_t c = 0; c < x.extent(0); ++c) {
    const T a = layer.slope[c];
    T s{0};
    for (std::size_t e = c * per; e < (c + 1) * per; ++e) {
      if (x[e] > T{0}) {
        g.input[e] = grad_out[e];
      } else {
        g.input[e] = a * grad_out[e];
        s += grad_out[e] * x[e];
      }
    }
    g.slope[c] = s;
  }
  return g;
}

/// Argmax bookkeeping from a max-pool forward pass.
struct PoolIndices {
  Shape input_shape;
  Shape output_shape;
  std::vector<std::size_t> argmax;  // flat input offset per output element
};

template <typename T>
struct PoolResult {
  Tensor<T> output;
  PoolIndices indices;
};

/// 2x2 spatial max pooling over [c,t,h,w] with stride 2 in ceil mode: an odd
/// trailing row or column forms a partial window. The time axis is untouched.
/// Ties resolve to the first element in row-major scan order.
template <typename T>
PoolResult<T> maxpool_forward(const Tensor<T>& x) {
  if (x.rank() != 4) throw ShapeError("maxpool: input must be [c,t,h,w], got " + to_string(x.shape()));
  const std::size_t C = x.extent(0), TT = x.extent(1), H = x.extent(2), W = x.extent(3);
  const std::size_t OH = (H + 1) / 2, OW = (W + 1) / 2;
  PoolResult<T> r{Tensor<T>({C, TT, OH, OW}), PoolIndices{x.shape(), {C, TT, OH, OW}, {}}};
  r.indices.argmax.resize(r.output.size());
  std::size_t out = 0;
  for (std::size_t s = 0; s < C * TT; ++s) {
    const std::size_t base = s * H * W;
    for (std::size_t i = 0; i < OH; ++i)
      for (std::size_t j = 0; j < OW; ++j, ++out) {
        std::size_t best = base + (2 * i) * W + 2 * j;
        for (std::size_t di = 0; di < 2 && 2 * i + di < H; ++di)
          for (std::size_t dj = 0; dj < 2 && 2 * j + dj < W; ++dj) {
            const std::size_t e = base + (2 * i + di) * W + 2 * j + dj;
            if (x[e] > x[best]) best = e;
          }
        r.output[out] = x[best];
        r.indices.argmax[out] = best;
      }
  }
  return r;
}

template <typename T>
Tensor<T> maxpool_backward(const PoolIndices& indices, const Tensor<T>& grad_out) {
  require_same_shape(indices.output_shape, grad_out.shape(), "maxpool_backward");
  if (indices.argmax.size() != grad_out.size()) throw ShapeError("maxpool_backward: stale indices");
  Tensor<T> g(indices.input_shape);
  for (std::size_t e = 0; e < grad_out.size(); ++e) g[indices.argmax[e]] += grad_out[e];
  return g;
}

/// Fully connected layer: y = W x + b with W [out, in].
template <typename T>
struct Dense {
  Tensor<T> weights;
  Tensor<T> bias;

  std::size_t outputs() const { return weights.extent(0); }
  std::size_t inputs() const { return weights.extent(1); }

  static Dense init(std::size_t out, std::size_t in, Rng& rng) {
    return Dense{xavier_init<T>({out, in}, in, out, rng), Tensor<T>({out}, T{0})};
  }
};

template <typename T>
struct DenseGrads {
  Tensor<T> weights;
  Tensor<T> bias;
  Tensor<T> input;
};

template <typename T>
Tensor<T> dense_forward(const Dense<T>& layer, const Tensor<T>& x) {
  if (x.rank() != 1 || x.size() != layer.inputs()) {
    throw ShapeError("dense: expected input of length " + std::to_string(layer.inputs()) + ", got " +
                     to_string(x.shape()));
  }
  const std::size_t N = layer.inputs();
  Tensor<T> y(layer.bias.shape());
  const T* w = layer.weights.data().data();
  for (std::size_t r = 0; r < layer.outputs(); ++r) {
    T s = layer.bias[r];
    const T* row = w + r * N;
    for (std::size_t c = 0; c < N; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

template <typename T>
DenseGrads<T> dense_backward(const Dense<T>& layer, const Tensor<T>& x, const Tensor<T>& grad_out) {
  if (x.rank() != 1 || x.size() != layer.inputs() || grad_out.rank() != 1 ||
      grad_out.size() != layer.outputs()) {
    throw ShapeError("dense_backward: shape mismatch");
  }
  const std::size_t N = layer.inputs();
  DenseGrads<T> g{Tensor<T>(layer.weights.shape()), grad_out, Tensor<T>(x.shape())};
  const T* w = layer.weights.data().data();
  T* gw = g.weights.data().data();
  T* gx = g.input.data().data();
  for (std::size_t r = 0; r < layer.outputs(); ++r) {
    const T gr = grad_out[r];
    const T* row = w + r * N;
    T* grow = gw + r * N;
    for (std::size_t c = 0; c < N; ++c) {
      grow[c] = gr * x[c];
      gx[c] += row[c] * gr;
    }
  }
  return g;
}

/// Row-major flattening to rank 1.
template <typename T>
Tensor<T> flatten(const Tensor<T>& x) {
  return x.reshaped({x.size()});
}

}  // namespace pose3d

#endif  // POSE3D_LAYERS_HPP_
