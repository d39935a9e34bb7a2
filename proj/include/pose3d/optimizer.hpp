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

#ifndef POSE3D_OPTIMIZER_HPP_
#define POSE3D_OPTIMIZER_HPP_

#include <string>

#include "pose3d/network.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d {

/// Nesterov accelerated gradient in lookahead form:
///
///   v     <- mu * v - lr * grad L(theta + mu * v)
///   theta <- theta + v
///
/// The caller evaluates the gradient at lookahead(theta) and passes it to step().
inline constexpr const char* kNesterovFormulation =
    "v <- mu*v - lr*grad(theta + mu*v); theta <- theta + v";

/// One update of a single tensor; `grad` must be taken at theta + mu * velocity.
template <typename T>
void nesterov_update(Tensor<T>& theta, Tensor<T>& velocity, const Tensor<T>& grad, T lr, T mu) {
  require_same_shape(theta.shape(), velocity.shape(), "nesterov_update");
  require_same_shape(theta.shape(), grad.shape(), "nesterov_update");
  auto th = theta.data();
  auto v = velocity.data();
  auto g = grad.data();
  for (std::size_t i = 0; i < th.size(); ++i) {
    v[i] = mu * v[i] - lr * g[i];
    th[i] += v[i];
  }
}

template <typename T>
class NesterovSgd {
 public:
  NesterovSgd(const NetworkParams<T>& like, T learning_rate, T momentum)
      : velocity_(like.zeros_like()), lr_(learning_rate), mu_(momentum) {}

  T learning_rate() const { return lr_; }
  T momentum() const { return mu_; }
  const NetworkParams<T>& velocity() const { return velocity_; }

  /// theta + mu * v, the point at which the next gradient is evaluated.
  NetworkParams<T> lookahead(const NetworkParams<T>& params) const {
    NetworkParams<T> out = params;
    std::vector<const Tensor<T>*> vs;
    velocity_.visit([&](const std::string&, const Tensor<T>& t) { vs.push_back(&t); });
    std::size_t i = 0;
    out.visit([&](const std::string&, Tensor<T>& t) { axpy(mu_, *vs[i++], t); });
    return out;
  }

  void step(NetworkParams<T>& params, const NetworkParams<T>& grads_at_lookahead) {
    std::vector<Tensor<T>*> vs;
    std::vector<const Tensor<T>*> gs;
    velocity_.visit([&](const std::string&, Tensor<T>& t) { vs.push_back(&t); });
    grads_at_lookahead.visit([&](const std::string&, const Tensor<T>& t) { gs.push_back(&t); });
    std::size_t i = 0;
    params.visit([&](const std::string&, Tensor<T>& t) {
      nesterov_update(t, *vs[i], *gs[i], lr_, mu_);
      ++i;
    });
  }

 private:
  NetworkParams<T> velocity_;
  T lr_;
  T mu_;
};

}  // namespace pose3d

#endif  // POSE3D_OPTIMIZER_HPP_
