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

#ifndef POSE3D_CONFIG_HPP_
#define POSE3D_CONFIG_HPP_

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pose3d/network.hpp"
#include "pose3d/trainer.hpp"

namespace pose3d {

enum class Precision { kF32, kF64 };

inline std::string to_string(Precision p) { return p == Precision::kF32 ? "f32" : "f64"; }

inline Precision parse_precision(const std::string& s) {
  if (s == "f32" || s == "float32") return Precision::kF32;
  if (s == "f64" || s == "float64") return Precision::kF64;
  throw ConfigError("precision must be f32 or f64, got '" + s + "'");
}

/// Complete run configuration. Built-in defaults are the published training
/// values: lr 1e-5, momentum 0.9, batch 10, patience 15, window 5, 13 Hz.
struct RunConfig {
  std::array<std::size_t, kNumConv> channel_plan{16, 24, 32, 40, 40};
  std::size_t input_size = 128;

  TrainConfig training;
  Precision precision = Precision::kF32;
  double validation_fraction = 0.0;

  std::string dataset;
  double target_hz = 13.0;
  std::size_t window = kWindowFrames;
  std::size_t windows_per_clip = 0;

  std::string weights = "weights.bin";
  std::string log = "epochs.csv";
  std::string report = "report.csv";
  std::string poses = "poses.csv";

  /// The flatten-size constraint applies to full-resolution inputs only.
  ArchitectureConfig architecture() const {
    ArchitectureConfig a;
    a.channel_plan = channel_plan;
    a.input_size = input_size;
    a.frames = window;
    a.expected_flatten = input_size == 128 && window == kWindowFrames ? kDefaultFlatten : 0;
    return a;
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::string& section,
                           const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + (section.empty() ? key : section + "." + key) + "'");
    }
  }
}

template <typename V>
void read_key(const nlohmann::json& obj, const std::string& section, const char* key, V& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
  }
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: parse error at line " + std::to_string(detail::line_of(text, e.byte)) + ": " +
                      e.what());
  }
  RunConfig c;
  detail::reject_unknown(j, "", {"architecture", "training", "data", "inference"});
  if (j.contains("architecture")) {
    const auto& a = j["architecture"];
    detail::reject_unknown(a, "architecture", {"channel_plan", "input_size"});
    detail::read_key(a, "architecture", "channel_plan", c.channel_plan);
    detail::read_key(a, "architecture", "input_size", c.input_size);
  }
  if (j.contains("training")) {
    const auto& t = j["training"];
    detail::reject_unknown(t, "training",
                           {"learning_rate", "momentum", "batch_size", "patience", "max_epochs", "seed", "precision",
                            "freeze_prelu", "validation_fraction", "max_train_batches", "max_val_batches",
                            "max_test_batches"});
    auto& tc = c.training;
    detail::read_key(t, "training", "learning_rate", tc.learning_rate);
    detail::read_key(t, "training", "momentum", tc.momentum);
    detail::read_key(t, "training", "batch_size", tc.batch_size);
    detail::read_key(t, "training", "patience", tc.patience);
    detail::read_key(t, "training", "max_epochs", tc.max_epochs);
    detail::read_key(t, "training", "seed", tc.seed);
    detail::read_key(t, "training", "freeze_prelu", tc.freeze_prelu);
    detail::read_key(t, "training", "validation_fraction", c.validation_fraction);
    detail::read_key(t, "training", "max_train_batches", tc.max_train_batches);
    detail::read_key(t, "training", "max_val_batches", tc.max_val_batches);
    detail::read_key(t, "training", "max_test_batches", tc.max_test_batches);
    std::string precision = to_string(c.precision);
    detail::read_key(t, "training", "precision", precision);
    c.precision = parse_precision(precision);
  }
  if (j.contains("data")) {
    const auto& d = j["data"];
    detail::reject_unknown(d, "data", {"dataset", "target_hz", "window", "windows_per_clip"});
    detail::read_key(d, "data", "dataset", c.dataset);
    detail::read_key(d, "data", "target_hz", c.target_hz);
    detail::read_key(d, "data", "window", c.window);
    detail::read_key(d, "data", "windows_per_clip", c.windows_per_clip);
  }
  if (j.contains("inference")) {
    const auto& i = j["inference"];
    detail::reject_unknown(i, "inference", {"weights", "log", "report", "poses"});
    detail::read_key(i, "inference", "weights", c.weights);
    detail::read_key(i, "inference", "log", c.log);
    detail::read_key(i, "inference", "report", c.report);
    detail::read_key(i, "inference", "poses", c.poses);
  }
  if (c.training.batch_size == 0) throw ConfigError("config: training.batch_size must be >= 1");
  if (c.training.patience == 0) throw ConfigError("config: training.patience must be >= 1");
  if (c.validation_fraction < 0 || c.validation_fraction >= 1) {
    throw ConfigError("config: training.validation_fraction must be in [0, 1)");
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("config not found: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace pose3d

#endif  // POSE3D_CONFIG_HPP_
