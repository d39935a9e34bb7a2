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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pose3d/rng.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d {
namespace {

TEST(TensorTest, NewFillsEveryElement) {
  Tensor<double> z({2, 2}, 0.0);
  EXPECT_EQ(z.shape(), (Shape{2, 2}));
  for (double v : z.data()) EXPECT_EQ(v, 0.0);

  Tensor<double> s({1}, 7.5);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 7.5);
}

TEST(TensorTest, ClipSizedTensorHasProductOfExtents) {
  std::size_t product = 1;
  for (std::size_t e : {5u, 3u, 128u, 128u}) product *= e;
  Tensor<float> t({5, 3, 128, 128});
  EXPECT_EQ(t.size(), product);
  EXPECT_EQ(t.size(), 245760u);
}

TEST(TensorTest, InvalidShapesThrow) {
  EXPECT_THROW(Tensor<double>(Shape{}), ShapeError);
  EXPECT_THROW(Tensor<double>({3, 0, 2}), ShapeError);
  EXPECT_THROW(Tensor<double>({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(TensorTest, RowMajorIndexing) {
  Tensor<double> t({2, 3, 4});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  EXPECT_EQ(t(1, 2, 3), 23.0);
  EXPECT_EQ(t(0, 1, 0), 4.0);
  EXPECT_EQ(t.at({1, 0, 2}), 14.0);
  EXPECT_THROW(t.at({2, 0, 0}), ShapeError);
  EXPECT_EQ(strides({2, 3, 4}), (std::vector<std::size_t>{12, 4, 1}));
}

TEST(TensorTest, Elementwise) {
  Tensor<double> a({2}, std::vector<double>{1, 2});
  Tensor<double> b({2}, std::vector<double>{3, 4});
  EXPECT_EQ((a + b).vector(), (std::vector<double>{4, 6}));
  Tensor<double> x({3}, std::vector<double>{1.5, -2, 9});
  const auto zero = x - x;
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);
  Tensor<double> m1({2}, std::vector<double>{2, 3});
  Tensor<double> m2({2}, std::vector<double>{0.5, 2});
  EXPECT_EQ((m1 * m2).vector(), (std::vector<double>{1, 6}));
  EXPECT_THROW(a + Tensor<double>({3}), ShapeError);
}

TEST(TensorTest, ElementwiseDoesNotMutateInputs) {
  Tensor<double> a({2}, std::vector<double>{1, 2});
  Tensor<double> b({2}, std::vector<double>{3, 4});
  const auto a0 = a, b0 = b;
  (void)elementwise(a, b, ElementwiseOp::kMul);
  EXPECT_EQ(a, a0);
  EXPECT_EQ(b, b0);
}

TEST(TensorTest, AdditionCommutesAndAssociatesOnIntegers) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor<double> a({4, 5}), b({4, 5}), c({4, 5});
    for (auto* t : {&a, &b, &c})
      for (double& v : t->data()) v = static_cast<double>(static_cast<long>(rng.below(2001)) - 1000);
    EXPECT_EQ(a + b, b + a);
    EXPECT_EQ((a + b) + c, a + (b + c));
  }
}

TEST(TensorTest, ReshapeRoundTrip) {
  Rng rng(11);
  Tensor<double> t({2, 3, 5});
  for (double& v : t.data()) v = rng.uniform();
  EXPECT_EQ(t.reshaped({6, 5}).reshaped(t.shape()), t);
  EXPECT_THROW(t.reshaped({7}), ShapeError);
}

TEST(TensorTest, ReduceMean) {
  Tensor<double> a({2, 2}, std::vector<double>{1, 3, 5, 7});
  const auto all = reduce_mean(a, {0, 1});
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0], 4.0);
  EXPECT_EQ(reduce_mean(a, {}), a);
  Tensor<double> b({2, 2}, std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(reduce_mean(b, {1}).vector(), (std::vector<double>{1.5, 3.5}));
  EXPECT_EQ(reduce_mean(b, {0}).vector(), (std::vector<double>{2, 3}));
}

TEST(TensorTest, ReduceMeanMiddleAxis) {
  Tensor<double> t({2, 3, 2});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
  const auto m = reduce_mean(t, {1});
  ASSERT_EQ(m.shape(), (Shape{2, 2}));
  // Brute force over the reduced axis.
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      double s = 0;
      for (std::size_t j = 0; j < 3; ++j) s += t(i, j, k);
      EXPECT_DOUBLE_EQ(m(i, k), s / 3);
    }
}

TEST(TensorTest, ReduceMeanAxisErrors) {
  Tensor<double> a({2, 2});
  EXPECT_THROW(reduce_mean(a, {0, 0}), AxisError);
  EXPECT_THROW(reduce_mean(a, {2}), AxisError);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(RngTest, KnownFirstOutputs) {
  // SplitMix64 reference stream for seed 0.
  Rng r(0);
  EXPECT_EQ(r.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(r.next_u64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(r.next_u64(), 0x06C45D188009454FULL);
}

TEST(RngTest, UniformAndBelowRanges) {
  Rng r(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.below(7), 7u);
  }
}

TEST(XavierTest, UnitBoundWhenFansAreThree) {
  Rng rng(1);
  const auto t = xavier_init<double>({1000}, 3, 3, rng);
  for (double v : t.data()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(XavierTest, Deterministic) {
  Rng a(9), b(9);
  EXPECT_EQ(xavier_init<double>({4, 4}, 4, 4, a), xavier_init<double>({4, 4}, 4, 4, b));
}

TEST(XavierTest, MomentsOfUniformDistribution) {
  constexpr std::size_t n = 1000000;
  Rng rng(2024);
  const auto t = xavier_init<double>({n}, 5000, 5000, rng);
  const double b = std::sqrt(6.0 / 10000.0);
  double mean = 0;
  for (double v : t.data()) mean += v;
  mean /= n;
  double var = 0;
  for (double v : t.data()) var += (v - mean) * (v - mean);
  var /= n;
  // U[-b, b] has variance b^2 / 3 and the mean's standard error is b / sqrt(3n).
  EXPECT_NEAR(var, b * b / 3, 0.05 * b * b / 3);
  EXPECT_LT(std::abs(mean), 3 * b / std::sqrt(3.0 * n));
}

TEST(XavierTest, RejectsZeroFan) {
  Rng rng(0);
  EXPECT_THROW(xavier_init<double>({2}, 0, 3, rng), ConfigError);
}

}  // namespace
}  // namespace pose3d
