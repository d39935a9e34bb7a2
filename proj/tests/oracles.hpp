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

// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the layer implementations it is compared against.

#ifndef POSE3D_TESTS_ORACLES_HPP_
#define POSE3D_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pose3d/rng.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d::oracle {

inline void randomize(Tensor<double>& t, Rng& rng, double lo = -1, double hi = 1) {
  for (double& v : t.data()) v = rng.uniform(lo, hi);
}

inline Tensor<double> random_tensor(const Shape& s, Rng& rng, double lo = -1, double hi = 1) {
  Tensor<double> t(s);
  randomize(t, rng, lo, hi);
  return t;
}

/// Discrete 3D convolution of a single-channel volume X (extents A x B x C)
/// with kernel K (extents P x Q x R), evaluated literally as
///   (K * X)[i,j,k] = sum_{m,n,l} X[i-m, j-n, k-l] K[m,n,l]
/// at every position where the sum touches only in-range samples of X, i.e.
/// i in [P-1, A-1] and likewise for j, k. Returned with the valid-region
/// origin shifted to zero.
inline std::vector<double> true_convolution_valid(const std::vector<double>& X, std::size_t A, std::size_t B,
                                                  std::size_t C, const std::vector<double>& K, std::size_t P,
                                                  std::size_t Q, std::size_t R) {
  const std::size_t OA = A - P + 1, OB = B - Q + 1, OC = C - R + 1;
  std::vector<double> out(OA * OB * OC, 0.0);
  for (std::size_t i = P - 1; i < A; ++i)
    for (std::size_t j = Q - 1; j < B; ++j)
      for (std::size_t k = R - 1; k < C; ++k) {
        double s = 0;
        for (std::size_t m = 0; m < P; ++m)
          for (std::size_t n = 0; n < Q; ++n)
            for (std::size_t l = 0; l < R; ++l) s += X[((i - m) * B + (j - n)) * C + (k - l)] * K[(m * Q + n) * R + l];
        out[((i - (P - 1)) * OB + (j - (Q - 1))) * OC + (k - (R - 1))] = s;
      }
  return out;
}

/// Multi-channel layer output built from true convolutions: the learned
/// (cross-correlation) kernel is flipped along all three axes before being
/// handed to true_convolution_valid, channel results are summed and the bias
/// added.
inline Tensor<double> conv_layer_via_true_convolution(const Tensor<double>& x, const Tensor<double>& kernel,
                                                      const Tensor<double>& bias) {
  const std::size_t O = kernel.extent(0), Cin = kernel.extent(1);
  const std::size_t P = kernel.extent(2), Q = kernel.extent(3), R = kernel.extent(4);
  const std::size_t A = x.extent(1), B = x.extent(2), C = x.extent(3);
  Tensor<double> out({O, A - P + 1, B - Q + 1, C - R + 1});
  const std::size_t plane = out.size() / O;
  for (std::size_t o = 0; o < O; ++o) {
    for (std::size_t e = 0; e < plane; ++e) out[o * plane + e] = bias[o];
    for (std::size_t c = 0; c < Cin; ++c) {
      std::vector<double> X(A * B * C), K(P * Q * R);
      for (std::size_t i = 0; i < A; ++i)
        for (std::size_t j = 0; j < B; ++j)
          for (std::size_t k = 0; k < C; ++k) X[(i * B + j) * C + k] = x(c, i, j, k);
      for (std::size_t m = 0; m < P; ++m)
        for (std::size_t n = 0; n < Q; ++n)
          for (std::size_t l = 0; l < R; ++l)
            K[(m * Q + n) * R + l] = kernel(o, c, P - 1 - m, Q - 1 - n, R - 1 - l);
      const auto y = true_convolution_valid(X, A, B, C, K, P, Q, R);
      for (std::size_t e = 0; e < plane; ++e) out[o * plane + e] += y[e];
    }
  }
  return out;
}

/// Central finite-difference gradient of scalar f with respect to every
/// element of `param` (perturbed in place and restored).
inline Tensor<double> numeric_gradient(const std::function<double()>& f, Tensor<double>& param, double h = 1e-5,
                                       const std::vector<std::size_t>* subset = nullptr) {
  Tensor<double> g(param.shape());
  auto probe = [&](std::size_t i) {
    const double saved = param[i];
    param[i] = saved + h;
    const double up = f();
    param[i] = saved - h;
    const double down = f();
    param[i] = saved;
    g[i] = (up - down) / (2 * h);
  };
  if (subset) {
    for (std::size_t i : *subset) probe(i);
  } else {
    for (std::size_t i = 0; i < param.size(); ++i) probe(i);
  }
  return g;
}

/// |a - n| / max(|a|, |n|), with an absolute floor below which the two are
/// treated as agreeing (both effectively zero relative to finite-difference noise).
inline double relative_error(double analytic, double numeric, double floor = 1e-9) {
  const double diff = std::abs(analytic - numeric);
  if (diff <= floor) return 0.0;
  return diff / std::max(std::abs(analytic), std::abs(numeric));
}

inline double max_relative_error(const Tensor<double>& analytic, const Tensor<double>& numeric,
                                 const std::vector<std::size_t>* subset = nullptr) {
  double worst = 0;
  if (subset) {
    for (std::size_t i : *subset) worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  } else {
    for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  }
  return worst;
}

/// sum(r * y): a scalar probe whose gradient with respect to y is r.
inline double dot(const Tensor<double>& r, const Tensor<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
  return s;
}

/// Scalar Nesterov recurrence on L(theta) = theta^2 (gradient 2 theta):
/// v <- mu v - lr * 2 (theta + mu v); theta <- theta + v.
inline std::vector<double> nesterov_quadratic_trajectory(double theta, double lr, double mu, int steps) {
  std::vector<double> out;
  double v = 0;
  for (int s = 0; s < steps; ++s) {
    const double ahead = theta + mu * v;
    v = mu * v - lr * 2 * ahead;
    theta = theta + v;
    out.push_back(theta);
  }
  return out;
}

}  // namespace pose3d::oracle

#endif  // POSE3D_TESTS_ORACLES_HPP_
