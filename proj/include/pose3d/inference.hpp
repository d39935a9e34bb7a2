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

#ifndef POSE3D_INFERENCE_HPP_
#define POSE3D_INFERENCE_HPP_

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pose3d/dataset.hpp"
#include "pose3d/loss.hpp"
#include "pose3d/network.hpp"
#include "pose3d/parallel.hpp"
#include "pose3d/preprocess.hpp"

namespace pose3d {

/// Averaged pose of one frame of a stream.
struct FramePrediction {
  std::size_t frame = 0;  // position in the stream
  Tensor<double> joints;  // [joints, 3]
  std::size_t count = 0;  // windows that covered the frame
};

/// Averages per-window outputs into per-frame poses. window_outputs[s] is the
/// prediction of the window starting at frame s, flat data laid out as
/// [window, joints, 3]. Each frame averages the slices of every window
/// covering it as a running mean in increasing window order, which is exact
/// when the slices agree.
inline std::vector<FramePrediction> average_windows(std::span<const Tensor<double>> window_outputs,
                                                    std::size_t n_frames, std::size_t window,
                                                    std::size_t joints = kPoseJoints) {
  if (window == 0 || n_frames < window || window_outputs.size() != n_frames - window + 1) {
    throw ShapeError("average_windows: " + std::to_string(window_outputs.size()) + " windows for " +
                     std::to_string(n_frames) + " frames of window " + std::to_string(window));
  }
  const std::size_t per_frame = joints * 3;
  std::vector<FramePrediction> out(n_frames);
  for (std::size_t f = 0; f < n_frames; ++f) out[f] = {f, Tensor<double>({joints, 3}), 0};
  for (std::size_t s = 0; s < window_outputs.size(); ++s) {
    if (window_outputs[s].size() != window * per_frame) throw ShapeError("average_windows: bad window output size");
    for (std::size_t k = 0; k < window; ++k) {
      FramePrediction& fp = out[s + k];
      const double n = static_cast<double>(++fp.count);
      for (std::size_t e = 0; e < per_frame; ++e) {
        fp.joints[e] += (window_outputs[s][k * per_frame + e] - fp.joints[e]) / n;
      }
    }
  }
  return out;
}

/// Runs `model` on every window of consecutive frames (stride 1) and averages
/// the overlapping outputs. `model` maps a contrast-normalised
/// [3, window, size, size] tensor to the flat [window * joints * 3] output.
template <typename T, typename Model>
std::vector<FramePrediction> predict_clip(Model&& model, std::span<const Image> frames,
                                          std::size_t window = kWindowFrames, std::size_t joints = kPoseJoints) {
  if (frames.size() < window) {
    throw DataError("clip too short: " + std::to_string(frames.size()) + " frames, need at least " +
                    std::to_string(window));
  }
  const std::size_t n_windows = frames.size() - window + 1;
  std::vector<Tensor<double>> outputs(n_windows);
  parallel_for(n_windows, [&](std::size_t s) {
    const Tensor<T> y = model(window_tensor<T>(frames.subspan(s, window)));
    outputs[s] = y.template cast<double>();
  });
  return average_windows(outputs, frames.size(), window, joints);
}

template <typename T>
std::vector<FramePrediction> predict_clip(const NetworkParams<T>& params, std::span<const Image> frames) {
  return predict_clip<T>([&](const Tensor<T>& x) { return predict(params, x); }, frames,
                         params.config.frames, params.config.joints);
}

struct ActionReport {
  std::string action;
  double mpjpe_mm = 0;
  std::size_t frames = 0;
  std::optional<double> baseline_mm;
  std::optional<double> improvement_pct;

  friend bool operator==(const ActionReport&, const ActionReport&) = default;
};

/// (baseline - ours) / baseline * 100
inline double improvement_pct(double baseline, double ours) { return (baseline - ours) / baseline * 100.0; }

inline constexpr const char* kAverageRow = "Average";

struct EvaluationReport {
  std::vector<ActionReport> actions;
  ActionReport overall;  // action == kAverageRow

  /// Per-action rows followed by the average row.
  std::vector<ActionReport> rows() const {
    auto r = actions;
    r.push_back(overall);
    return r;
  }
};

using BaselineTable = std::map<std::string, double>;

/// Completes per-action rows with baselines and appends the average row. The
/// average is the unweighted mean of the per-action means. Its baseline is the
/// table's "Average" entry when every other table row was matched, otherwise
/// the unweighted mean of the matched per-action baselines.
inline EvaluationReport summarize(std::vector<ActionReport> actions, const BaselineTable* baselines = nullptr) {
  if (actions.empty()) throw DataError("summarize: no actions");
  EvaluationReport rep;
  double total = 0, base_total = 0;
  std::size_t frames = 0, base_count = 0;
  for (auto& a : actions) {
    total += a.mpjpe_mm;
    frames += a.frames;
    if (baselines) {
      if (auto it = baselines->find(a.action); it != baselines->end()) {
        a.baseline_mm = it->second;
        a.improvement_pct = improvement_pct(it->second, a.mpjpe_mm);
        base_total += it->second;
        ++base_count;
      }
    }
  }
  rep.overall.action = kAverageRow;
  rep.overall.mpjpe_mm = total / static_cast<double>(actions.size());
  rep.overall.frames = frames;
  if (baselines) {
    std::optional<double> b;
    const auto it = baselines->find(kAverageRow);
    if (it != baselines->end() && base_count + 1 == baselines->size()) {
      b = it->second;
    } else if (base_count > 0) {
      b = base_total / static_cast<double>(base_count);
    }
    if (b) {
      rep.overall.baseline_mm = b;
      rep.overall.improvement_pct = improvement_pct(*b, rep.overall.mpjpe_mm);
    }
  }
  rep.actions = std::move(actions);
  return rep;
}

/// Predictions for one clip with the ground truth they are scored against.
struct ClipEvaluation {
  std::string action;
  std::vector<FramePrediction> predictions;
  Tensor<double> truth;  // [frames, joints, 3], pelvis-centred, indexed by FramePrediction::frame
};

/// Per-frame MPJPE averaged per action (actions in first-seen order), plus the
/// unweighted average row.
inline EvaluationReport evaluate(std::span<const ClipEvaluation> clips, const BaselineTable* baselines = nullptr) {
  std::vector<ActionReport> actions;
  std::map<std::string, std::size_t> slot;
  std::vector<double> sums;
  for (const auto& clip : clips) {
    auto [it, inserted] = slot.try_emplace(clip.action, actions.size());
    if (inserted) {
      actions.push_back({clip.action, 0, 0, {}, {}});
      sums.push_back(0);
    }
    const std::size_t J = clip.truth.rank() == 3 ? clip.truth.extent(1) : 0;
    for (const auto& fp : clip.predictions) {
      if (J == 0 || fp.frame >= clip.truth.extent(0)) {
        throw DataError("alignment error: no ground truth for frame " + std::to_string(fp.frame) + " of action " +
                        clip.action);
      }
      Tensor<double> truth({J, 3});
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t c = 0; c < 3; ++c) truth(j, c) = clip.truth(fp.frame, j, c);
      sums[it->second] += mpjpe(fp.joints, truth);
      ++actions[it->second].frames;
    }
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i].frames == 0) throw DataError("no predicted frames for action " + actions[i].action);
    actions[i].mpjpe_mm = sums[i] / static_cast<double>(actions[i].frames);
  }
  return summarize(std::move(actions), baselines);
}

enum class ReportFormat { kCsv, kPretty };

inline constexpr const char* kReportHeader = "action,mpjpe_mm,baseline_mm,improvement_pct";

inline void export_report(std::span<const ActionReport> rows, const std::filesystem::path& path,
                          ReportFormat format = ReportFormat::kCsv) {
  if (rows.empty()) throw DataError("export_report: no rows");
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write report: " + path.string());
  auto opt = [](const std::optional<double>& v, const char* fmt) {
    if (!v) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof(buf), fmt, *v);
    return std::string(buf);
  };
  if (format == ReportFormat::kCsv) {
    os << kReportHeader << '\n';
    for (const auto& r : rows) {
      if (r.action.find(',') != std::string::npos) throw DataError("action name contains a comma: " + r.action);
      os << r.action << ',' << detail::format_double(r.mpjpe_mm) << ',' << opt(r.baseline_mm, "%.17g") << ','
         << opt(r.improvement_pct, "%.17g") << '\n';
    }
  } else {
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s %12s %12s %16s\n", "action", "mpjpe_mm", "baseline_mm", "improvement_pct");
    os << line;
    for (const auto& r : rows) {
      std::snprintf(line, sizeof(line), "%-20s %12.1f %12s %16s\n", r.action.c_str(), r.mpjpe_mm,
                    opt(r.baseline_mm, "%.1f").c_str(), opt(r.improvement_pct, "%.1f").c_str());
      os << line;
    }
  }
  if (!os) throw DataError("failed writing report: " + path.string());
}

/// Parses a CSV written by export_report. Only action and mpjpe_mm are
/// required; the remaining columns may be absent or empty.
inline std::vector<ActionReport> read_report_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot read report: " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path.string() + ": empty report");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header[0] != "action" || header[1] != "mpjpe_mm") {
    throw FormatError(path.string() + ": header must start with action,mpjpe_mm");
  }
  std::vector<ActionReport> rows;
  const std::string where = path.string();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != header.size()) throw FormatError(where + ": column count mismatch");
    ActionReport r;
    r.action = f[0];
    r.mpjpe_mm = detail::parse_double(f[1], where);
    if (f.size() > 2 && !f[2].empty()) r.baseline_mm = detail::parse_double(f[2], where);
    if (f.size() > 3 && !f[3].empty()) r.improvement_pct = detail::parse_double(f[3], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// action -> mpjpe_mm from a report CSV.
inline BaselineTable read_baseline_csv(const std::filesystem::path& path) {
  BaselineTable t;
  for (const auto& r : read_report_csv(path)) t[r.action] = r.mpjpe_mm;
  return t;
}

inline constexpr const char* kPosesHeader = "frame,joint,x,y,z";

/// One row per frame per joint; `frame_ids` maps stream positions to the
/// frame numbers written (identity when empty).
inline void write_poses_csv(const std::filesystem::path& path, std::span<const FramePrediction> preds,
                            std::span<const std::size_t> frame_ids = {}) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("cannot write poses: " + path.string());
  os << kPosesHeader << '\n';
  for (const auto& fp : preds) {
    const std::size_t id = frame_ids.empty() ? fp.frame : frame_ids[fp.frame];
    for (std::size_t j = 0; j < fp.joints.extent(0); ++j) {
      os << id << ',' << j << ',' << detail::format_double(fp.joints(j, 0)) << ','
         << detail::format_double(fp.joints(j, 1)) << ',' << detail::format_double(fp.joints(j, 2)) << '\n';
    }
  }
}

}  // namespace pose3d

#endif  // POSE3D_INFERENCE_HPP_
