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

#ifndef POSE3D_TENSOR_HPP_
#define POSE3D_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pose3d/error.hpp"

namespace pose3d {

using Shape = std::vector<std::size_t>;

inline std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

/// Number of elements described by `shape`; throws ShapeError unless every
/// extent is positive and the rank is at least one.
inline std::size_t checked_volume(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have rank >= 1");
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) throw ShapeError("tensor extent must be >= 1, got " + to_string(shape));
    n *= e;
  }
  return n;
}

/// Dense row-major tensor owning its storage.
///
/// A Tensor is a plain value: copies are deep and no operation aliases
/// another tensor's data.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() : shape_{1}, data_(1, T{0}) {}

  explicit Tensor(Shape shape, T fill = T{0})
      : shape_(std::move(shape)), data_(checked_volume(shape_), fill) {}

  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_volume(shape_) != data_.size()) {
      throw ShapeError("data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  std::span<T> data() & noexcept { return data_; }
  std::span<const T> data() const& noexcept { return data_; }
  std::span<const T> data() const&& = delete;
  const std::vector<T>& vector() const noexcept { return data_; }

  T& operator[](std::size_t flat) noexcept { return data_[flat]; }
  const T& operator[](std::size_t flat) const noexcept { return data_[flat]; }

  template <typename... Idx>
  T& operator()(Idx... idx) noexcept {
    return data_[offset(idx...)];
  }
  template <typename... Idx>
  const T& operator()(Idx... idx) const noexcept {
    return data_[offset(idx...)];
  }

  /// Bounds-checked element access by index list.
  T& at(std::initializer_list<std::size_t> idx) { return data_[checked_offset(idx)]; }
  const T& at(std::initializer_list<std::size_t> idx) const {
    return data_[checked_offset(idx)];
  }

  Tensor reshaped(Shape shape) const {
    if (checked_volume(shape) != size()) {
      throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
    }
    return Tensor(std::move(shape), data_);
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  template <typename... Idx>
  std::size_t offset(Idx... idx) const noexcept {
    std::size_t flat = 0;
    std::size_t axis = 0;
    ((flat = flat * shape_[axis++] + static_cast<std::size_t>(idx)), ...);
    return flat;
  }

  std::size_t checked_offset(std::initializer_list<std::size_t> idx) const {
    if (idx.size() != shape_.size()) throw ShapeError("index rank does not match tensor rank");
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (std::size_t i : idx) {
      if (i >= shape_[axis]) throw ShapeError("index out of range on axis " + std::to_string(axis));
      flat = flat * shape_[axis++] + i;
    }
    return flat;
  }

  Shape shape_;
  std::vector<T> data_;
};

/// Row-major strides of `shape` in elements.
inline std::vector<std::size_t> strides(const Shape& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
  return s;
}

inline void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
  }
}

enum class ElementwiseOp { kAdd, kSub, kMul };

template <typename T>
Tensor<T> elementwise(const Tensor<T>& a, const Tensor<T>& b, ElementwiseOp op) {
  require_same_shape(a.shape(), b.shape(), "elementwise");
  Tensor<T> out(a.shape());
  auto x = a.data();
  auto y = b.data();
  auto z = out.data();
  switch (op) {
    case ElementwiseOp::kAdd:
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + y[i];
      break;
    case ElementwiseOp::kSub:
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] - y[i];
      break;
    case ElementwiseOp::kMul:
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] * y[i];
      break;
  }
  return out;
}

template <typename T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(a, b, ElementwiseOp::kAdd);
}
template <typename T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(a, b, ElementwiseOp::kSub);
}
template <typename T>
Tensor<T> operator*(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(a, b, ElementwiseOp::kMul);
}

template <typename T>
Tensor<T> scaled(const Tensor<T>& a, T factor) {
  Tensor<T> out = a;
  for (T& v : out.data()) v *= factor;
  return out;
}

/// y += alpha * x
template <typename T>
void axpy(T alpha, const Tensor<T>& x, Tensor<T>& y) {
  require_same_shape(x.shape(), y.shape(), "axpy");
  auto xs = x.data();
  auto ys = y.data();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] += alpha * xs[i];
}

template <typename T>
T sum(const Tensor<T>& a) {
  T s{0};
  for (T v : a.data()) s += v;
  return s;
}

/// Arithmetic mean over `axes`. Reduced axes are dropped; reducing every axis
/// yields a single-element tensor of shape [1]. An empty axis list copies.
template <typename T>
Tensor<T> reduce_mean(const Tensor<T>& a, const std::vector<std::size_t>& axes) {
  std::vector<bool> reduced(a.rank(), false);
  for (std::size_t ax : axes) {
    if (ax >= a.rank()) throw AxisError("axis " + std::to_string(ax) + " out of range");
    if (reduced[ax]) throw AxisError("axis " + std::to_string(ax) + " repeated");
    reduced[ax] = true;
  }
  if (axes.empty()) return a;

  Shape out_shape;
  std::size_t count = 1;
  for (std::size_t ax = 0; ax < a.rank(); ++ax) {
    if (reduced[ax]) {
      count *= a.extent(ax);
    } else {
      out_shape.push_back(a.extent(ax));
    }
  }
  if (out_shape.empty()) out_shape.push_back(1);

  Tensor<T> out(out_shape);
  const auto in_strides = strides(a.shape());
  std::vector<std::size_t> kept_strides;  // strides of the output for each kept axis
  {
    std::vector<std::size_t> os = strides(out_shape);
    std::size_t k = 0;
    for (std::size_t ax = 0; ax < a.rank(); ++ax) {
      kept_strides.push_back(reduced[ax] ? 0 : os[k]);
      if (!reduced[ax]) ++k;
    }
  }
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t flat = 0; flat < src.size(); ++flat) {
    std::size_t rem = flat;
    std::size_t target = 0;
    for (std::size_t ax = 0; ax < a.rank(); ++ax) {
      const std::size_t i = rem / in_strides[ax];
      rem %= in_strides[ax];
      target += i * kept_strides[ax];
    }
    dst[target] += src[flat];
  }
  for (T& v : dst) v /= static_cast<T>(count);
  return out;
}

}  // namespace pose3d

#endif  // POSE3D_TENSOR_HPP_
