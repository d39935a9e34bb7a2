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

#ifndef POSE3D_PIPELINE_HPP_
#define POSE3D_PIPELINE_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pose3d/dataset.hpp"
#include "pose3d/inference.hpp"
#include "pose3d/preprocess.hpp"
#include "pose3d/sample.hpp"

namespace pose3d {

template <typename T>
struct SampleSet {
  std::vector<Sample<T>> samples;
  std::size_t clips = 0;
  std::size_t too_short = 0;
};

/// Windows from every clip of `entries`, in clip order. Each clip draws its
/// start offsets from its own generator forked off `seed`.
template <typename T>
SampleSet<T> load_samples(const std::filesystem::path& root, std::span<const ManifestEntry> entries,
                          const WindowOptions& opt, std::uint64_t seed) {
  Rng master(seed);
  std::vector<Rng> rngs;
  for (std::size_t i = 0; i < entries.size(); ++i) rngs.push_back(master.fork());
  std::vector<WindowSampling<T>> per_clip(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) {
    per_clip[i] = sample_windows<T>(read_clip(root / entries[i].dir), opt, rngs[i]);
  });
  SampleSet<T> out;
  out.clips = entries.size();
  for (auto& w : per_clip) {
    out.too_short += w.too_short;
    for (auto& s : w.samples) out.samples.push_back(std::move(s));
  }
  return out;
}

/// Decimated, preprocessed stream of one clip with its pelvis-centred joints.
inline PreparedStream load_stream(const RawClip& clip, double target_hz, std::size_t input_size) {
  const auto indices = decimated_indices(clip.frame_count(), decimation_stride(clip.meta.fps, target_hz));
  return prepare_stream(clip, indices, input_size);
}

struct SplitEvaluation {
  EvaluationReport report;
  std::size_t clips = 0;
  std::size_t too_short = 0;
};

/// Sliding-window predictions over every clip of `entries`, scored per action.
/// Clips with fewer decimated frames than the window are skipped and counted.
template <typename T>
SplitEvaluation evaluate_split(const NetworkParams<T>& params, const std::filesystem::path& root,
                               std::span<const ManifestEntry> entries, double target_hz,
                               const BaselineTable* baselines = nullptr) {
  SplitEvaluation out;
  std::vector<ClipEvaluation> clips;
  for (const auto& e : entries) {
    const RawClip clip = read_clip(root / e.dir);
    const PreparedStream stream = load_stream(clip, target_hz, params.config.input_size);
    if (stream.frames.size() < params.config.frames) {
      ++out.too_short;
      continue;
    }
    ClipEvaluation c;
    c.action = e.action.empty() ? clip.meta.action : e.action;
    c.predictions = predict_clip(params, std::span<const Image>(stream.frames));
    c.truth = stream.joints;
    clips.push_back(std::move(c));
    ++out.clips;
  }
  if (clips.empty()) throw DataError("no clip long enough to evaluate");
  out.report = evaluate(clips, baselines);
  return out;
}

}  // namespace pose3d

#endif  // POSE3D_PIPELINE_HPP_
