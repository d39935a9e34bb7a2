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

#ifndef POSE3D_SYNTHETIC_HPP_
#define POSE3D_SYNTHETIC_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "pose3d/dataset.hpp"
#include "pose3d/image.hpp"
#include "pose3d/rng.hpp"

namespace pose3d {

// Stick-figure clip generator. Joint order follows the common 17-joint
// motion-capture convention:
//   0 pelvis, 1 r.hip, 2 r.knee, 3 r.ankle, 4 l.hip, 5 l.knee, 6 l.ankle,
//   7 spine, 8 thorax, 9 neck, 10 head, 11 l.shoulder, 12 l.elbow,
//   13 l.wrist, 14 r.shoulder, 15 r.elbow, 16 r.wrist

/// Bone segments drawn between joints (parent, child).
inline constexpr std::array<std::array<std::size_t, 2>, 16> kBones{{{0, 1},
                                                                    {1, 2},
                                                                    {2, 3},
                                                                    {0, 4},
                                                                    {4, 5},
                                                                    {5, 6},
                                                                    {0, 7},
                                                                    {7, 8},
                                                                    {8, 9},
                                                                    {9, 10},
                                                                    {8, 11},
                                                                    {11, 12},
                                                                    {12, 13},
                                                                    {8, 14},
                                                                    {14, 15},
                                                                    {15, 16}}};

struct LimbLengths {
  double hip_half_width = 130;
  double thigh = 440;
  double shin = 430;
  double pelvis_to_spine = 230;
  double spine_to_thorax = 250;
  double thorax_to_neck = 110;
  double neck_to_head = 120;
  double shoulder_half_width = 170;
  double upper_arm = 280;
  double forearm = 250;
};

struct SyntheticSceneSpec {
  std::uint64_t seed = 0;
  LimbLengths limbs;
  double gait_hz = 1.0;    // cycles per second
  double amplitude = 0.5;  // radians of swing at the hip
  double fps = 50;
  std::size_t width = 160;
  std::size_t height = 128;
  CameraIntrinsics camera{260, 260, 80, 64};
  double depth_mm = 5500;  // pelvis distance from the camera
  std::vector<std::string> actions{"Walking", "Waving", "Squatting"};
  std::size_t val_clips = 0;   // trailing clips tagged "val"
  std::size_t test_clips = 0;  // clips after those tagged "test"
};

namespace detail {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

/// Unit vector hanging straight down, raised sideways by `abduct` (toward
/// `side`) and swung forward by `swing`.
inline Vec3 limb_direction(double side, double swing, double abduct) {
  return {side * std::sin(abduct), -std::cos(abduct) * std::cos(swing), -std::cos(abduct) * std::sin(swing)};
}

struct ClipStyle {
  std::string action;
  double phase = 0;
  double freq = 1;
  double amp = 0.5;
  double yaw = 0;
  double scale = 1;
  Vec3 origin;           // pelvis position in camera coordinates at t = 0
  double drift_x = 0;    // mm, amplitude of a slow sideways sway
  std::array<double, 3> background{};
};

struct Pose {
  std::array<Vec3, 17> joints;  // body frame: x lateral, y up, z away from the camera
  double drop = 0;              // pelvis lowering, mm
};

inline Pose body_pose(const LimbLengths& L0, const ClipStyle& st, double t) {
  LimbLengths L = L0;
  for (double* v : {&L.hip_half_width, &L.thigh, &L.shin, &L.pelvis_to_spine, &L.spine_to_thorax,
                    &L.thorax_to_neck, &L.neck_to_head, &L.shoulder_half_width, &L.upper_arm, &L.forearm}) {
    *v *= st.scale;
  }
  const double phi = 2 * std::numbers::pi * st.freq * t + st.phase;
  double hip_r = 0, hip_l = 0, knee_r = 0.05, knee_l = 0.05;
  double arm_swing_r = 0, arm_swing_l = 0, abduct_r = 0.15, abduct_l = 0.15;
  double fore_swing_r = 0.3, fore_swing_l = 0.3, fore_abduct_r = 0.15, fore_abduct_l = 0.15;

  if (st.action == "Waving") {
    abduct_r = 2.3 + 0.35 * std::sin(phi);
    fore_abduct_r = abduct_r + 0.5 * std::sin(phi);
    fore_swing_r = 0.2;
    arm_swing_l = 0.1 * std::sin(phi);
    fore_swing_l = arm_swing_l + 0.3;
  } else if (st.action == "Squatting") {
    const double s = 0.5 * (1 - std::cos(phi)) * st.amp / 0.5;
    hip_r = hip_l = 1.2 * s;
    knee_r = knee_l = 2.0 * s;
    arm_swing_r = arm_swing_l = 1.2 * s;
    fore_swing_r = fore_swing_l = 1.3 * s + 0.1;
  } else {  // walking gait
    hip_r = st.amp * std::sin(phi);
    hip_l = -hip_r;
    knee_r = 0.1 + 0.5 * (0.5 * (1 - std::cos(phi)));
    knee_l = 0.1 + 0.5 * (0.5 * (1 + std::cos(phi)));
    arm_swing_r = -0.8 * st.amp * std::sin(phi);
    arm_swing_l = -arm_swing_r;
    fore_swing_r = arm_swing_r + 0.35;
    fore_swing_l = arm_swing_l + 0.35;
  }

  Pose p;
  auto& J = p.joints;
  J[0] = {0, 0, 0};
  auto leg = [&](std::size_t hip, double side, double swing, double knee) {
    J[hip] = {side * L.hip_half_width, 0, 0};
    J[hip + 1] = J[hip] + limb_direction(0, swing, 0) * L.thigh;
    J[hip + 2] = J[hip + 1] + limb_direction(0, swing - knee, 0) * L.shin;
  };
  leg(1, -1, hip_r, knee_r);
  leg(4, +1, hip_l, knee_l);
  J[7] = {0, L.pelvis_to_spine, 0};
  J[8] = {0, L.pelvis_to_spine + L.spine_to_thorax, 0};
  J[9] = J[8] + Vec3{0, L.thorax_to_neck, -20 * st.scale};
  J[10] = J[9] + Vec3{0, L.neck_to_head, 0};
  auto arm = [&](std::size_t sh, double side, double swing, double abduct, double fswing, double fabduct) {
    J[sh] = J[8] + Vec3{side * L.shoulder_half_width, -30 * st.scale, 0};
    J[sh + 1] = J[sh] + limb_direction(side, swing, abduct) * L.upper_arm;
    J[sh + 2] = J[sh + 1] + limb_direction(side, fswing, fabduct) * L.forearm;
  };
  arm(11, +1, arm_swing_l, abduct_l, fore_swing_l, fore_abduct_l);
  arm(14, -1, arm_swing_r, abduct_r, fore_swing_r, fore_abduct_r);

  const double standing = L.thigh + L.shin;
  const double leg_r = -(J[3].y);
  const double leg_l = -(J[6].y);
  p.drop = standing - std::max(leg_r, leg_l);
  return p;
}

inline void blend(Image8& img, long x, long y, double coverage, const std::array<double, 3>& color) {
  if (coverage <= 0 || x < 0 || y < 0 || x >= static_cast<long>(img.width) || y >= static_cast<long>(img.height)) {
    return;
  }
  coverage = std::min(coverage, 1.0);
  for (std::size_t c = 0; c < 3; ++c) {
    const double v = img.at(x, y, c) * (1 - coverage) + color[c] * coverage;
    img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
}

/// Anti-aliased thick segment: coverage falls off linearly over one pixel at
/// distance `radius` from the segment.
inline void draw_segment(Image8& img, double x0, double y0, double x1, double y1, double radius,
                         const std::array<double, 3>& color) {
  const long minx = static_cast<long>(std::floor(std::min(x0, x1) - radius - 1));
  const long maxx = static_cast<long>(std::ceil(std::max(x0, x1) + radius + 1));
  const long miny = static_cast<long>(std::floor(std::min(y0, y1) - radius - 1));
  const long maxy = static_cast<long>(std::ceil(std::max(y0, y1) + radius + 1));
  const double dx = x1 - x0, dy = y1 - y0;
  const double len2 = dx * dx + dy * dy;
  for (long y = miny; y <= maxy; ++y)
    for (long x = minx; x <= maxx; ++x) {
      double t = len2 > 0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double ex = x0 + t * dx - x, ey = y0 + t * dy - y;
      blend(img, x, y, radius + 0.5 - std::sqrt(ex * ex + ey * ey), color);
    }
}

}  // namespace detail

/// Projects camera-frame points (millimetres) to pixel coordinates; pixel
/// centres sit at integer coordinates.
inline std::array<double, 2> project(const CameraIntrinsics& cam, double x, double y, double z) {
  return {cam.fx * x / z + cam.cx, cam.fy * y / z + cam.cy};
}

/// Renders clip `index` of the scene. Throws ConfigError naming the frame
/// when any joint projects outside the image.
inline RawClip generate_clip(const SyntheticSceneSpec& spec, std::size_t index, std::size_t frames) {
  using detail::Vec3;
  if (spec.actions.empty()) throw ConfigError("synthetic spec needs at least one action");
  if (spec.width == 0 || spec.height == 0 || !(spec.fps > 0)) throw ConfigError("synthetic spec has empty frame");
  Rng rng(Rng(spec.seed + index).next_u64());

  detail::ClipStyle st;
  st.action = spec.actions[index % spec.actions.size()];
  st.phase = rng.uniform(0, 2 * std::numbers::pi);
  st.freq = spec.gait_hz * rng.uniform(0.8, 1.2);
  st.amp = spec.amplitude * rng.uniform(0.8, 1.2);
  st.yaw = rng.uniform(-0.5, 0.5);
  st.scale = rng.uniform(0.92, 1.08);
  st.origin = {rng.uniform(-250, 250), rng.uniform(0, 150), spec.depth_mm + rng.uniform(-300, 300)};
  st.drift_x = rng.uniform(-150, 150);
  st.background = {rng.uniform(10, 70), rng.uniform(10, 70), rng.uniform(10, 70)};

  RawClip clip;
  char id[32];
  std::snprintf(id, sizeof(id), "clip_%04zu", index);
  clip.id = id;
  clip.meta.fps = spec.fps;
  clip.meta.camera = spec.camera;
  clip.meta.subject = "synthetic";
  clip.meta.action = st.action;
  clip.meta.width = spec.width;
  clip.meta.height = spec.height;
  clip.joints = Tensor<double>({frames, 17, 3});

  const std::array<double, 3> right{225, 80, 60}, left{60, 125, 225}, torso{230, 200, 80}, marker{255, 255, 255};
  const double cy = std::cos(st.yaw), sy = std::sin(st.yaw);
  for (std::size_t f = 0; f < frames; ++f) {
    const double t = static_cast<double>(f) / spec.fps;
    const detail::Pose pose = detail::body_pose(spec.limbs, st, t);
    std::array<std::array<double, 2>, 17> px;
    for (std::size_t j = 0; j < 17; ++j) {
      const Vec3& b = pose.joints[j];
      const double x = b.x * cy + b.z * sy;
      const double z = -b.x * sy + b.z * cy;
      const Vec3 cam{st.origin.x + st.drift_x * std::sin(0.2 * std::numbers::pi * t) + x, st.origin.y + pose.drop - b.y, st.origin.z + z};
      clip.joints(f, j, 0) = cam.x;
      clip.joints(f, j, 1) = cam.y;
      clip.joints(f, j, 2) = cam.z;
      px[j] = project(spec.camera, cam.x, cam.y, cam.z);
      if (!(cam.z > 0) || px[j][0] < 0 || px[j][1] < 0 || px[j][0] > static_cast<double>(spec.width - 1) ||
          px[j][1] > static_cast<double>(spec.height - 1)) {
        throw ConfigError("synthetic skeleton leaves the image in " + clip.id + " frame " + std::to_string(f) +
                          " (joint " + std::to_string(j) + ")");
      }
    }

    Image8 img(spec.width, spec.height);
    for (std::size_t y = 0; y < spec.height; ++y)
      for (std::size_t x = 0; x < spec.width; ++x)
        for (std::size_t c = 0; c < 3; ++c) {
          const double shade = st.background[c] * (0.7 + 0.6 * static_cast<double>(y) / spec.height);
          img.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(shade), 0L, 255L));
        }
    const double depth = st.origin.z;
    const double limb_radius = std::max(1.0, 45.0 * spec.camera.fx / depth);
    for (std::size_t b = 0; b < kBones.size(); ++b) {
      const auto [p, c] = kBones[b];
      const bool is_right = (c >= 1 && c <= 3) || c >= 14;
      const bool is_left = (c >= 4 && c <= 6) || (c >= 11 && c <= 13);
      const auto& color = is_right ? right : is_left ? left : torso;
      detail::draw_segment(img, px[p][0], px[p][1], px[c][0], px[c][1], limb_radius, color);
    }
    const double head_radius = 95.0 * spec.camera.fx / depth;
    detail::draw_segment(img, px[10][0], px[10][1], px[10][0], px[10][1], head_radius, torso);
    for (std::size_t j = 0; j < 17; ++j) detail::draw_segment(img, px[j][0], px[j][1], px[j][0], px[j][1], 1.0, marker);

    double minx = px[0][0], maxx = px[0][0], miny = px[0][1], maxy = px[0][1];
    for (const auto& q : px) {
      minx = std::min(minx, q[0]);
      maxx = std::max(maxx, q[0]);
      miny = std::min(miny, q[1]);
      maxy = std::max(maxy, q[1]);
    }
    const double margin = std::max(limb_radius, head_radius) + 1;
    const long x0 = static_cast<long>(std::floor(minx - margin)), x1 = static_cast<long>(std::ceil(maxx + margin));
    const long y0 = static_cast<long>(std::floor(miny - margin)), y1 = static_cast<long>(std::ceil(maxy + margin));
    clip.boxes.push_back(clamp_box({x0, y0, x1 - x0 + 1, y1 - y0 + 1}, spec.width, spec.height));
    clip.frames.push_back(std::move(img));
  }
  return clip;
}

/// Writes `n_clips` clips plus manifest.json under `root`.
inline Manifest generate_synthetic(const SyntheticSceneSpec& spec, std::size_t n_clips, std::size_t frames,
                                   const std::filesystem::path& root) {
  if (frames == 0) throw ConfigError("frames per clip must be >= 1");
  if (spec.val_clips + spec.test_clips > n_clips) throw ConfigError("more val/test clips than clips");
  Manifest manifest;
  for (std::size_t i = 0; i < n_clips; ++i) {
    const RawClip clip = generate_clip(spec, i, frames);
    write_clip(root / clip.id, clip);
    const std::size_t train_end = n_clips - spec.val_clips - spec.test_clips;
    const std::string split = i < train_end ? "train" : i < train_end + spec.val_clips ? "val" : "test";
    manifest.clips.push_back({clip.id, clip.id, split, clip.meta.action});
  }
  write_manifest(root, manifest);
  return manifest;
}

}  // namespace pose3d

#endif  // POSE3D_SYNTHETIC_HPP_
