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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pose3d/network.hpp"
#include "pose3d/weights_io.hpp"

namespace pose3d {
namespace {

namespace fs = std::filesystem;

/// Smallest spatial input the fixed topology accepts is 45; the head predicts
/// 2 joints so that every parameter can be finite-differenced quickly.
ArchitectureConfig gradcheck_config() { return ArchitectureConfig::reduced({2, 2, 3, 2, 2}, 45, 2); }

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "pose3d_network_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(ArchitectureTest, DefaultShapeChain) {
  const auto stages = stage_shapes(ArchitectureConfig{});
  const std::vector<std::pair<std::string, Shape>> expected{
      {"input", {3, 5, 128, 128}}, {"conv1", {16, 3, 124, 124}}, {"pool1", {16, 3, 62, 62}},
      {"conv2", {24, 2, 58, 58}},  {"pool2", {24, 2, 29, 29}},   {"conv3", {32, 2, 25, 25}},
      {"conv4", {40, 2, 23, 23}},  {"conv5", {40, 2, 21, 21}},   {"pool3", {40, 2, 11, 11}},
      {"flatten", {9680}},         {"head", {255}}};
  ASSERT_EQ(stages.size(), expected.size());
  for (std::size_t i = 0; i < stages.size(); ++i) {
    EXPECT_EQ(stages[i].name, expected[i].first);
    EXPECT_EQ(stages[i].shape, expected[i].second) << stages[i].name;
  }
}

TEST(ArchitectureTest, FlattenConstraintForcesFortyFinalChannels) {
  ArchitectureConfig cfg;
  cfg.channel_plan[4] = 39;
  EXPECT_THROW(stage_shapes(cfg), ConfigError);
  Rng rng(0);
  EXPECT_THROW(build_network<float>(cfg, rng), ConfigError);
  EXPECT_NE(39u * 2 * 11 * 11, kDefaultFlatten);
  EXPECT_EQ(40u * 2 * 11 * 11, kDefaultFlatten);
}

TEST(ArchitectureTest, ReducedInputTooSmallIsRejected) {
  EXPECT_THROW(stage_shapes(ArchitectureConfig::reduced({2, 2, 2, 2, 2}, 12)), ConfigError);
  EXPECT_THROW(stage_shapes(ArchitectureConfig::reduced({2, 2, 2, 2, 2}, 44)), ConfigError);
  EXPECT_NO_THROW(stage_shapes(ArchitectureConfig::reduced({2, 2, 2, 2, 2}, 45)));
}

TEST(NetworkTest, BuildInitialisation) {
  Rng rng(1);
  const auto p = build_network<float>(ArchitectureConfig{}, rng);
  EXPECT_EQ(p.head.weights.shape(), (Shape{255, 9680}));
  for (const auto& c : p.conv)
    for (float b : c.bias.data()) EXPECT_EQ(b, 0.0f);
  for (const auto& a : p.prelu)
    for (float s : a.slope.data()) EXPECT_EQ(s, 0.01f);
  // Xavier bound of conv1: fan_in 3*75, fan_out 16*75.
  const float bound = std::sqrt(6.0f / (3 * 75 + 16 * 75));
  for (float w : p.conv[0].kernel.data()) EXPECT_LE(std::abs(w), bound);
}

TEST(NetworkTest, SameSeedSameParameters) {
  Rng a(5), b(5), c(6);
  const auto pa = build_network<float>(ArchitectureConfig{}, a);
  EXPECT_TRUE(pa == build_network<float>(ArchitectureConfig{}, b));
  EXPECT_FALSE(pa == build_network<float>(ArchitectureConfig{}, c));
}

TEST(NetworkTest, ParameterCountMatchesClosedFormAndIgnoresSeed) {
  for (const auto& cfg : {ArchitectureConfig{}, gradcheck_config()}) {
    Rng a(1), b(2);
    const auto pa = build_network<float>(cfg, a);
    EXPECT_EQ(pa.parameter_count(), parameter_count(cfg));
    EXPECT_EQ(build_network<float>(cfg, b).parameter_count(), pa.parameter_count());
  }
  // Hand count for the default plan [16, 24, 32, 40, 40].
  const std::size_t expected = (16 * 3 * 75 + 32) + (24 * 16 * 50 + 48) + (32 * 24 * 25 + 64) +
                               (40 * 32 * 9 + 80) + (40 * 40 * 9 + 80) + (255 * 9680 + 255);
  EXPECT_EQ(parameter_count(ArchitectureConfig{}), expected);
}

TEST(NetworkTest, ForwardShapesAndZeroInput) {
  Rng rng(2);
  auto p = build_network<double>(ArchitectureConfig{}, rng);
  oracle::randomize(p.head.bias, rng);
  const auto r = forward(p, Tensor<double>({3, 5, 128, 128}));
  EXPECT_EQ(r.output.size(), 255u);
  EXPECT_EQ(r.trace.flat.size(), 9680u);
  EXPECT_EQ(r.output, p.head.bias);
  EXPECT_THROW(forward(p, Tensor<double>({3, 5, 127, 128})), ShapeError);
}

TEST(NetworkTest, ForwardIsDeterministic) {
  Rng rng(3);
  const auto cfg = ArchitectureConfig::reduced({4, 4, 4, 4, 4}, 64);
  const auto p = build_network<float>(cfg, rng);
  Tensor<float> x(cfg.input_shape());
  for (float& v : x.data()) v = static_cast<float>(rng.uniform(-1, 1));
  EXPECT_EQ(predict(p, x), predict(p, x));
}

TEST(NetworkTest, BackwardZeroAndLinearity) {
  Rng rng(4);
  const auto cfg = gradcheck_config();
  const auto p = build_network<double>(cfg, rng);
  const auto x = oracle::random_tensor(cfg.input_shape(), rng);
  const auto fr = forward(p, x);
  const auto zero = backward(p, fr.trace, Tensor<double>({cfg.outputs()}));
  zero.visit([](const std::string& name, const Tensor<double>& t) {
    for (double v : t.data()) EXPECT_EQ(v, 0.0) << name;
  });

  const auto g = oracle::random_tensor({cfg.outputs()}, rng);
  const auto g1 = backward(p, fr.trace, g);
  const auto g2 = backward(p, fr.trace, scaled(g, 2.0));
  std::vector<const Tensor<double>*> twice;
  g2.visit([&](const std::string&, const Tensor<double>& t) { twice.push_back(&t); });
  std::size_t i = 0;
  g1.visit([&](const std::string& name, const Tensor<double>& t) {
    EXPECT_EQ(scaled(t, 2.0), *twice[i++]) << name;
  });
}

TEST(NetworkTest, BackwardMatchesFiniteDifferencesOnReducedNetwork) {
  Rng rng(21);
  const auto cfg = gradcheck_config();
  auto p = build_network<double>(cfg, rng);
  for (auto& a : p.prelu) oracle::randomize(a.slope, rng, 0.05, 0.5);
  for (auto& c : p.conv) oracle::randomize(c.bias, rng, -0.1, 0.1);
  oracle::randomize(p.head.bias, rng);
  auto x = oracle::random_tensor(cfg.input_shape(), rng);
  const auto r = oracle::random_tensor({cfg.outputs()}, rng);
  auto loss = [&] { return oracle::dot(r, predict(p, x)); };

  const auto fr = forward(p, x);
  Tensor<double> gx;
  const auto grads = backward(p, fr.trace, r, &gx);
  std::vector<const Tensor<double>*> analytic;
  grads.visit([&](const std::string&, const Tensor<double>& t) { analytic.push_back(&t); });
  std::size_t i = 0;
  p.visit([&](const std::string& name, Tensor<double>& t) {
    const auto numeric = oracle::numeric_gradient(loss, t);
    EXPECT_LT(oracle::max_relative_error(*analytic[i++], numeric), 1e-4) << name;
  });

  std::vector<std::size_t> coords;
  for (int k = 0; k < 200; ++k) coords.push_back(rng.below(x.size()));
  const auto nx = oracle::numeric_gradient(loss, x, 1e-5, &coords);
  EXPECT_LT(oracle::max_relative_error(gx, nx, &coords), 1e-4);
}

TEST(WeightsTest, RoundTripIsBitExact) {
  Rng rng(7);
  const auto p = build_network<float>(ArchitectureConfig{}, rng);
  const auto path = temp_path("default.bin");
  save_weights(p, path);
  EXPECT_TRUE(load_weights<float>(path) == p);
  EXPECT_TRUE(load_weights<float>(path, ArchitectureConfig{}) == p);

  const auto pd = build_network<double>(gradcheck_config(), rng);
  save_weights(pd, temp_path("double.bin"));
  EXPECT_TRUE(load_weights<double>(temp_path("double.bin")) == pd);
}

TEST(WeightsTest, CorruptMagicIsFormatError) {
  Rng rng(8);
  const auto path = temp_path("corrupt.bin");
  save_weights(build_network<float>(gradcheck_config(), rng), path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  EXPECT_THROW(load_weights<float>(path), FormatError);
}

TEST(WeightsTest, ArchitectureMismatchIsShapeMismatch) {
  Rng rng(9);
  const auto path = temp_path("planA.bin");
  save_weights(build_network<float>(ArchitectureConfig::reduced({2, 2, 2, 2, 2}, 64), rng), path);
  try {
    load_weights<float>(path, ArchitectureConfig::reduced({3, 2, 2, 2, 2}, 64));
    FAIL() << "expected ShapeMismatchError";
  } catch (const ShapeMismatchError& e) {
    EXPECT_NE(std::string(e.what()).find("conv1.kernel"), std::string::npos) << e.what();
  }
}

TEST(WeightsTest, TruncatedPayloadIsTruncatedError) {
  Rng rng(10);
  const auto path = temp_path("truncated.bin");
  save_weights(build_network<float>(gradcheck_config(), rng), path);
  fs::resize_file(path, fs::file_size(path) - 10);
  EXPECT_THROW(load_weights<float>(path), TruncatedError);
}

TEST(WeightsTest, CorruptHeaderIsFormatError) {
  const auto path = temp_path("header.bin");
  {
    std::ofstream os(path, std::ios::binary);
    os.write(kWeightsMagic, sizeof(kWeightsMagic));
    os.put(static_cast<char>(kWeightsVersion));
    const std::string junk = "{not json";
    const std::uint32_t n = static_cast<std::uint32_t>(junk.size());
    for (int i = 0; i < 4; ++i) os.put(static_cast<char>((n >> (8 * i)) & 0xff));
    os << junk;
  }
  EXPECT_THROW(load_weights<float>(path), FormatError);
}

}  // namespace
}  // namespace pose3d
