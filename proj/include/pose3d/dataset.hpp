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

#ifndef POSE3D_DATASET_HPP_
#define POSE3D_DATASET_HPP_

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pose3d/image.hpp"
#include "pose3d/network.hpp"
#include "pose3d/tensor.hpp"

namespace pose3d {

// On-disk dataset layout:
//
//   <root>/manifest.json            {"version": 1, "clips": [{"id","dir","split","action"}...]}
//   <root>/<dir>/frames/%06d.png    8-bit RGB frames
//   <root>/<dir>/joints.csv         frame,joint,x_mm,y_mm,z_mm
//   <root>/<dir>/boxes.csv          frame,x,y,w,h
//   <root>/<dir>/meta.json          fps, camera intrinsics, subject/action labels, frame size

struct CameraIntrinsics {
  double fx = 300;
  double fy = 300;
  double cx = 80;
  double cy = 64;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

struct ClipMeta {
  double fps = 50;
  CameraIntrinsics camera;
  std::string subject;
  std::string action;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const ClipMeta&, const ClipMeta&) = default;
};

/// Source video with per-frame boxes and 3D joints (millimetres, camera frame).
struct RawClip {
  std::string id;
  ClipMeta meta;
  std::vector<Image8> frames;
  std::vector<Box> boxes;
  Tensor<double> joints;  // [frames, 17, 3]

  std::size_t frame_count() const { return frames.size(); }

  void validate() const {
    if (boxes.size() != frames.size() || joints.rank() != 3 || joints.extent(0) != frames.size() ||
        joints.extent(2) != 3) {
      throw DataError("clip " + id + ": " + std::to_string(frames.size()) + " frames, " +
                      std::to_string(boxes.size()) + " boxes, joints " + to_string(joints.shape()));
    }
  }
};

struct ManifestEntry {
  std::string id;
  std::string dir;
  std::string split;  // train | val | test
  std::string action;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::vector<ManifestEntry> clips;

  std::vector<ManifestEntry> split(const std::string& name) const {
    std::vector<ManifestEntry> out;
    for (const auto& c : clips)
      if (c.split == name) out.push_back(c);
    return out;
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw FormatError(where + ": not a number: '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw FormatError(where + ": not an integer: '" + s + "'");
  return v;
}

/// Reads data rows of a CSV file, checking the header and column count.
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                                      const std::string& header) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != header) {
    throw FormatError(path.string() + ": expected header '" + header + "'");
  }
  const std::size_t cols = split_csv_line(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != cols) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                        " columns");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

inline std::string frame_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.png", index);
  return buf;
}

inline void write_clip(const std::filesystem::path& dir, const RawClip& clip) {
  clip.validate();
  namespace fs = std::filesystem;
  fs::create_directories(dir / "frames");
  for (std::size_t f = 0; f < clip.frames.size(); ++f) write_png(dir / "frames" / frame_filename(f), clip.frames[f]);

  std::ofstream joints(dir / "joints.csv", std::ios::trunc);
  joints << "frame,joint,x_mm,y_mm,z_mm\n";
  for (std::size_t f = 0; f < clip.frames.size(); ++f)
    for (std::size_t j = 0; j < clip.joints.extent(1); ++j) {
      joints << f << ',' << j << ',' << detail::format_double(clip.joints(f, j, 0)) << ','
             << detail::format_double(clip.joints(f, j, 1)) << ',' << detail::format_double(clip.joints(f, j, 2))
             << '\n';
    }

  std::ofstream boxes(dir / "boxes.csv", std::ios::trunc);
  boxes << "frame,x,y,w,h\n";
  for (std::size_t f = 0; f < clip.boxes.size(); ++f) {
    const Box& b = clip.boxes[f];
    boxes << f << ',' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
  }

  const nlohmann::json meta{{"fps", clip.meta.fps},
                            {"camera",
                             {{"fx", clip.meta.camera.fx},
                              {"fy", clip.meta.camera.fy},
                              {"cx", clip.meta.camera.cx},
                              {"cy", clip.meta.camera.cy}}},
                            {"subject", clip.meta.subject},
                            {"action", clip.meta.action},
                            {"width", clip.meta.width},
                            {"height", clip.meta.height}};
  std::ofstream(dir / "meta.json", std::ios::trunc) << meta.dump(2) << '\n';
  if (!joints || !boxes) throw DataError("failed writing clip " + dir.string());
}

inline ClipMeta read_meta(const std::filesystem::path& dir) {
  const auto j = detail::read_json(dir / "meta.json");
  try {
    ClipMeta m;
    m.fps = j.at("fps").get<double>();
    const auto& cam = j.at("camera");
    m.camera = {cam.at("fx").get<double>(), cam.at("fy").get<double>(), cam.at("cx").get<double>(),
                cam.at("cy").get<double>()};
    m.subject = j.value("subject", "");
    m.action = j.value("action", "");
    m.width = j.value("width", std::size_t{0});
    m.height = j.value("height", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((dir / "meta.json").string() + ": " + e.what());
  }
}

/// Loads joints and boxes only; `frames` stays empty.
inline RawClip read_clip_annotations(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("clip not found: " + dir.string());
  RawClip clip;
  clip.id = dir.filename().string();
  clip.meta = read_meta(dir);

  const auto box_rows = detail::read_csv(dir / "boxes.csv", "frame,x,y,w,h");
  const std::string bwhere = (dir / "boxes.csv").string();
  for (std::size_t r = 0; r < box_rows.size(); ++r) {
    const auto& row = box_rows[r];
    if (detail::parse_long(row[0], bwhere) != static_cast<long>(r)) throw FormatError(bwhere + ": frames out of order");
    clip.boxes.push_back({detail::parse_long(row[1], bwhere), detail::parse_long(row[2], bwhere),
                          detail::parse_long(row[3], bwhere), detail::parse_long(row[4], bwhere)});
  }

  const auto joint_rows = detail::read_csv(dir / "joints.csv", "frame,joint,x_mm,y_mm,z_mm");
  const std::string jwhere = (dir / "joints.csv").string();
  const std::size_t n = clip.boxes.size();
  if (joint_rows.size() != n * kPoseJoints) {
    throw DataError(jwhere + ": expected " + std::to_string(n * kPoseJoints) + " joint rows, found " +
                    std::to_string(joint_rows.size()));
  }
  if (n == 0) throw DataError("clip has no frames: " + dir.string());
  clip.joints = Tensor<double>({n, kPoseJoints, 3});
  for (const auto& row : joint_rows) {
    const long f = detail::parse_long(row[0], jwhere);
    const long j = detail::parse_long(row[1], jwhere);
    if (f < 0 || j < 0 || static_cast<std::size_t>(f) >= n || static_cast<std::size_t>(j) >= kPoseJoints) {
      throw FormatError(jwhere + ": joint row out of range");
    }
    for (std::size_t c = 0; c < 3; ++c) clip.joints(f, j, c) = detail::parse_double(row[2 + c], jwhere);
  }
  return clip;
}

inline RawClip read_clip(const std::filesystem::path& dir) {
  RawClip clip = read_clip_annotations(dir);
  for (std::size_t f = 0; f < clip.boxes.size(); ++f) {
    const auto path = dir / "frames" / frame_filename(f);
    if (!std::filesystem::exists(path)) throw DataError("missing frame " + path.string());
    clip.frames.push_back(read_png(path));
    clip.boxes[f] = clamp_box(clip.boxes[f], clip.frames[f].width, clip.frames[f].height);
  }
  clip.validate();
  return clip;
}

inline void write_manifest(const std::filesystem::path& root, const Manifest& manifest) {
  nlohmann::json j;
  j["version"] = 1;
  j["clips"] = nlohmann::json::array();
  for (const auto& c : manifest.clips) {
    j["clips"].push_back({{"id", c.id}, {"dir", c.dir}, {"split", c.split}, {"action", c.action}});
  }
  std::filesystem::create_directories(root);
  std::ofstream(root / "manifest.json", std::ios::trunc) << j.dump(2) << '\n';
}

inline Manifest read_manifest(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw DataError("dataset not found: " + root.string());
  const auto j = detail::read_json(root / "manifest.json");
  Manifest m;
  try {
    for (const auto& c : j.at("clips")) {
      ManifestEntry e{c.at("id").get<std::string>(), c.at("dir").get<std::string>(),
                      c.at("split").get<std::string>(), c.value("action", "")};
      if (e.split != "train" && e.split != "val" && e.split != "test") {
        throw FormatError("manifest: clip " + e.id + " has unknown split '" + e.split + "'");
      }
      m.clips.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError((root / "manifest.json").string() + ": " + e.what());
  }
  return m;
}

}  // namespace pose3d

#endif  // POSE3D_DATASET_HPP_
