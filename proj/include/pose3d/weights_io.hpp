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

#ifndef POSE3D_WEIGHTS_IO_HPP_
#define POSE3D_WEIGHTS_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "pose3d/network.hpp"

namespace pose3d {

// Weights file layout:
//   8 bytes   magic "POSE3DW\0"
//   1 byte    format version (kWeightsVersion)
//   4 bytes   header length N, little-endian uint32
//   N bytes   JSON header: {"architecture": {...}, "entries": [{"name","dtype","shape"}...]}
//   payload   raw little-endian values of each entry, in header order
// dtype is "f32" or "f64" and follows the scalar type the network was saved from.

inline constexpr char kWeightsMagic[8] = {'P', 'O', 'S', 'E', '3', 'D', 'W', '\0'};
inline constexpr std::uint8_t kWeightsVersion = 1;

inline nlohmann::json to_json(const ArchitectureConfig& cfg) {
  return {{"channel_plan", cfg.channel_plan}, {"in_channels", cfg.in_channels},
          {"frames", cfg.frames},             {"input_size", cfg.input_size},
          {"joints", cfg.joints},             {"expected_flatten", cfg.expected_flatten}};
}

inline ArchitectureConfig architecture_from_json(const nlohmann::json& j) {
  ArchitectureConfig cfg;
  cfg.channel_plan = j.at("channel_plan").get<std::array<std::size_t, kNumConv>>();
  cfg.in_channels = j.at("in_channels").get<std::size_t>();
  cfg.frames = j.at("frames").get<std::size_t>();
  cfg.input_size = j.at("input_size").get<std::size_t>();
  cfg.joints = j.at("joints").get<std::size_t>();
  cfg.expected_flatten = j.at("expected_flatten").get<std::size_t>();
  return cfg;
}

namespace detail {

template <typename T>
constexpr const char* dtype_name() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  return std::is_same_v<T, float> ? "f32" : "f64";
}

template <typename U>
void write_le(std::ostream& os, U value) {
  using Bits = std::conditional_t<sizeof(U) == 4, std::uint32_t, std::uint64_t>;
  Bits bits;
  std::memcpy(&bits, &value, sizeof(U));
  unsigned char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), sizeof(U));
}

template <typename U>
U decode_le(const unsigned char* p) {
  using Bits = std::conditional_t<sizeof(U) == 4, std::uint32_t, std::uint64_t>;
  Bits bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<Bits>(p[i]) << (8 * i);
  U value;
  std::memcpy(&value, &bits, sizeof(U));
  return value;
}

}  // namespace detail

template <typename T>
void save_weights(const NetworkParams<T>& params, const std::filesystem::path& path) {
  nlohmann::json header;
  header["architecture"] = to_json(params.config);
  header["entries"] = nlohmann::json::array();
  params.visit([&](const std::string& name, const Tensor<T>& t) {
    header["entries"].push_back({{"name", name}, {"dtype", detail::dtype_name<T>()}, {"shape", t.shape()}});
  });
  const std::string text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write weights file: " + path.string());
  os.write(kWeightsMagic, sizeof(kWeightsMagic));
  os.put(static_cast<char>(kWeightsVersion));
  detail::write_le(os, static_cast<std::uint32_t>(text.size()));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  params.visit([&](const std::string&, const Tensor<T>& t) {
    for (T v : t.data()) detail::write_le(os, v);
  });
  if (!os) throw DataError("failed writing weights file: " + path.string());
}

namespace detail {

struct RawWeights {
  std::vector<unsigned char> bytes;
  nlohmann::json header;
  ArchitectureConfig architecture;
  std::size_t payload_offset = 0;
};

inline RawWeights read_raw_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot read weights file: " + path.string());
  RawWeights raw;
  raw.bytes.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  const auto& bytes = raw.bytes;

  const std::size_t preamble = sizeof(kWeightsMagic) + 1 + 4;
  if (bytes.size() < preamble) throw TruncatedError("weights file shorter than its preamble");
  if (std::memcmp(bytes.data(), kWeightsMagic, sizeof(kWeightsMagic)) != 0) {
    throw FormatError("not a weights file (bad magic): " + path.string());
  }
  if (bytes[sizeof(kWeightsMagic)] != kWeightsVersion) {
    throw FormatError("unsupported weights format version " + std::to_string(bytes[sizeof(kWeightsMagic)]));
  }
  const auto header_len = decode_le<std::uint32_t>(bytes.data() + sizeof(kWeightsMagic) + 1);
  if (bytes.size() < preamble + header_len) throw TruncatedError("weights header truncated");
  try {
    raw.header = nlohmann::json::parse(bytes.begin() + preamble, bytes.begin() + preamble + header_len);
    raw.architecture = architecture_from_json(raw.header.at("architecture"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt weights header: ") + e.what());
  }
  raw.payload_offset = preamble + header_len;
  return raw;
}

}  // namespace detail

struct WeightsInfo {
  ArchitectureConfig architecture;
  std::string dtype;  // dtype of the first entry
};

/// Architecture and stored dtype without decoding the payload.
inline WeightsInfo peek_weights(const std::filesystem::path& path) {
  const auto raw = detail::read_raw_weights(path);
  WeightsInfo info{raw.architecture, ""};
  try {
    const auto& entries = raw.header.at("entries");
    if (!entries.empty()) info.dtype = entries.at(0).at("dtype").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt weights header: ") + e.what());
  }
  return info;
}

/// Reads a weights file using the architecture recorded in its header.
/// Values stored with a different dtype are converted to T.
template <typename T>
NetworkParams<T> load_weights(const std::filesystem::path& path,
                              const std::optional<ArchitectureConfig>& expected = std::nullopt) {
  const auto raw = detail::read_raw_weights(path);
  const auto& bytes = raw.bytes;
  const ArchitectureConfig& cfg = raw.architecture;

  NetworkParams<T> params;
  {
    // Shapes come from a network built on the recorded (or expected) architecture.
    Rng rng(0);
    const ArchitectureConfig shape_cfg = expected ? *expected : cfg;
    try {
      params = build_network<T>(shape_cfg, rng);
    } catch (const ConfigError& e) {
      throw FormatError(std::string("weights header describes an invalid architecture: ") + e.what());
    }
  }

  const auto entries = raw.header.value("entries", nlohmann::json::array());
  std::size_t index = 0;
  std::size_t offset = raw.payload_offset;
  try {
    params.visit([&](const std::string& name, Tensor<T>& t) {
      if (index >= entries.size()) throw ShapeMismatchError("weights file has no entry for " + name);
      const auto& e = entries[index++];
      const auto file_name = e.at("name").get<std::string>();
      const auto file_shape = e.at("shape").get<Shape>();
      const auto dtype = e.at("dtype").get<std::string>();
      if (file_name != name) throw ShapeMismatchError("expected entry " + name + ", file has " + file_name);
      if (file_shape != t.shape()) {
        throw ShapeMismatchError("shape mismatch for layer " + name + ": file " + to_string(file_shape) +
                                 ", architecture " + to_string(t.shape()));
      }
      const std::size_t width = dtype == "f32" ? 4 : dtype == "f64" ? 8 : 0;
      if (width == 0) throw FormatError("unknown dtype " + dtype + " for " + name);
      if (bytes.size() < offset + width * t.size()) {
        throw TruncatedError("weights payload truncated in " + name);
      }
      for (T& v : t.data()) {
        v = width == 4 ? static_cast<T>(detail::decode_le<float>(bytes.data() + offset))
                       : static_cast<T>(detail::decode_le<double>(bytes.data() + offset));
        offset += width;
      }
    });
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt weights header entry: ") + e.what());
  }
  if (index != entries.size()) throw ShapeMismatchError("weights file has extra entries");
  if (offset != bytes.size()) throw FormatError("trailing bytes after weights payload");
  if (expected && !(cfg == *expected)) {
    throw ShapeMismatchError("weights architecture differs from configuration");
  }
  params.config = cfg;
  return params;
}

}  // namespace pose3d

#endif  // POSE3D_WEIGHTS_IO_HPP_
