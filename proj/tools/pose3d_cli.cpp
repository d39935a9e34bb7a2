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

// pose3d: synthetic data, training, evaluation and prediction from the shell.
//
//   pose3d synth   --out DIR [--clips N --frames F --seed S ...]
//   pose3d train   --data DIR [--config FILE --out W --log L ...]
//   pose3d eval    --weights W --data DIR [--split test --report R --baseline B]
//   pose3d predict --weights W --clip DIR --out poses.csv
//
// Exit codes: 0 success, 1 usage or configuration, 2 data, 3 numeric divergence.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pose3d/pose3d.hpp"

namespace {

namespace fs = std::filesystem;
using namespace pose3d;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kDivergence = 3 };

struct SynthArgs {
  std::string out;
  std::size_t clips = 8;
  std::size_t frames = 40;
  std::uint64_t seed = 0;
  double fps = 50;
  std::size_t val = 0;
  std::size_t test = 0;
};

struct TrainArgs {
  std::string config;
  std::optional<std::string> data, out, log, precision;
  std::optional<std::size_t> max_epochs, batch_size, patience, windows_per_clip, input_size;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr, momentum, validation_fraction;
  std::vector<std::size_t> channel_plan;
  bool freeze_prelu = false;
  bool no_timing = false;
};

struct EvalArgs {
  std::string weights, config, split = "test", baseline;
  std::optional<std::string> data, report;
  std::optional<double> target_hz;
  bool pretty = false;
};

struct PredictArgs {
  std::string weights, clip, config;
  std::optional<std::string> out;
  std::optional<double> target_hz;
};

int cmd_synth(const SynthArgs& a) {
  SyntheticSceneSpec spec;
  spec.seed = a.seed;
  spec.fps = a.fps;
  spec.val_clips = a.val;
  spec.test_clips = a.test;
  const RunConfig defaults;
  const std::size_t decimated =
      decimated_indices(a.frames, decimation_stride(a.fps, defaults.target_hz)).size();
  if (decimated < defaults.window) {
    std::cerr << "warning: " << a.frames << " frames per clip leave " << decimated << " frames at "
              << defaults.target_hz << " Hz, fewer than one " << defaults.window
              << "-frame window; training will find no windows\n";
  }
  const Manifest m = generate_synthetic(spec, a.clips, a.frames, a.out);
  std::cout << "wrote " << m.clips.size() << " clips (" << a.frames << " frames each) to " << a.out << "\n";
  return kOk;
}

RunConfig resolve(const TrainArgs& a) {
  RunConfig rc = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (a.data) rc.dataset = *a.data;
  if (a.out) rc.weights = *a.out;
  if (a.log) rc.log = *a.log;
  if (a.precision) rc.precision = parse_precision(*a.precision);
  if (a.max_epochs) rc.training.max_epochs = *a.max_epochs;
  if (a.batch_size) rc.training.batch_size = *a.batch_size;
  if (a.patience) rc.training.patience = *a.patience;
  if (a.windows_per_clip) rc.windows_per_clip = *a.windows_per_clip;
  if (a.input_size) rc.input_size = *a.input_size;
  if (a.seed) rc.training.seed = *a.seed;
  if (a.lr) rc.training.learning_rate = *a.lr;
  if (a.momentum) rc.training.momentum = *a.momentum;
  if (a.validation_fraction) rc.validation_fraction = *a.validation_fraction;
  if (!a.channel_plan.empty()) {
    if (a.channel_plan.size() != kNumConv) throw ConfigError("--channel-plan takes 5 values");
    std::copy(a.channel_plan.begin(), a.channel_plan.end(), rc.channel_plan.begin());
  }
  if (a.freeze_prelu) rc.training.freeze_prelu = true;
  if (rc.training.batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (rc.training.patience == 0) throw ConfigError("patience must be >= 1");
  if (rc.dataset.empty()) throw ConfigError("no dataset: pass --data or set data.dataset in the config");
  return rc;
}

template <typename T>
int run_train(const RunConfig& rc, bool no_timing) {
  const fs::path root = rc.dataset;
  const Manifest manifest = read_manifest(root);
  Rng run(rc.training.seed);
  const std::uint64_t train_seed = run.next_u64(), val_seed = run.next_u64(), init_seed = run.next_u64();
  TrainConfig tc = rc.training;
  tc.seed = run.next_u64();
  std::cout << "seed: " << rc.training.seed << "\n";

  auto train_entries = manifest.split("train");
  auto val_entries = manifest.split("val");
  if (val_entries.empty() && rc.validation_fraction > 0 && train_entries.size() > 1) {
    auto n = static_cast<std::size_t>(std::ceil(rc.validation_fraction * static_cast<double>(train_entries.size())));
    n = std::min(n, train_entries.size() - 1);
    val_entries.assign(train_entries.end() - static_cast<long>(n), train_entries.end());
    train_entries.resize(train_entries.size() - n);
  }

  WindowOptions opt;
  opt.target_hz = rc.target_hz;
  opt.window = rc.window;
  opt.count = rc.windows_per_clip;
  opt.input_size = rc.input_size;
  const auto train_set = load_samples<T>(root, train_entries, opt, train_seed);
  if (train_set.too_short > 0) {
    std::cerr << "warning: " << train_set.too_short << " of " << train_set.clips
              << " training clips are shorter than one window\n";
  }
  if (train_set.samples.empty()) {
    throw DataError("no training windows: " + std::to_string(train_set.clips) + " training clips yield 0 windows");
  }
  SampleSet<T> val_set;
  if (!val_entries.empty()) val_set = load_samples<T>(root, val_entries, opt, val_seed);
  const bool validate_on_train = val_set.samples.empty();
  if (validate_on_train) std::cout << "no validation windows; validating on the training set\n";
  std::cout << "windows: " << train_set.samples.size() << " train, "
            << (validate_on_train ? train_set.samples.size() : val_set.samples.size()) << " validation\n";

  Rng init(init_seed);
  NetworkParams<T> params = build_network<T>(rc.architecture(), init);
  std::cout << "parameters: " << params.parameter_count() << "\n";

  fs::remove(rc.log);
  EpochLog log(rc.log);
  TrainHooks<T> hooks;
  if (no_timing) hooks.clock = [] { return 0.0; };
  hooks.on_epoch = [&](const EpochReport& r) {
    log.append(r);
    std::printf("epoch %zu  train %.3f mm  val %.3f mm  (%.2f s)\n", r.epoch, r.train_loss_mm, r.val_mpjpe_mm,
                r.seconds);
    std::fflush(stdout);
  };
  const auto& val_samples = validate_on_train ? train_set.samples : val_set.samples;
  const TrainResult<T> result = train<T>(tc, params, train_set.samples, val_samples, hooks);
  save_weights(result.best, rc.weights);

  std::printf("best validation MPJPE: %.3f mm (epoch %zu%s)\n", result.best_val_mpjpe_mm, result.best_epoch,
              result.stopped_early ? ", stopped early" : "");
  std::printf("training MPJPE of saved weights: %.3f mm\n", mean_mpjpe<T>(result.best, train_set.samples));
  std::cout << "weights: " << rc.weights << "\nlog: " << rc.log << "\n";
  return kOk;
}

int cmd_train(const TrainArgs& a) {
  const RunConfig rc = resolve(a);
  return rc.precision == Precision::kF32 ? run_train<float>(rc, a.no_timing) : run_train<double>(rc, a.no_timing);
}

std::optional<ArchitectureConfig> expected_architecture(const std::string& config) {
  if (config.empty()) return std::nullopt;
  return load_run_config(config).architecture();
}

template <typename T>
int run_eval(const EvalArgs& a, const RunConfig& rc) {
  const auto params = load_weights<T>(a.weights, expected_architecture(a.config));
  const fs::path root = a.data ? *a.data : rc.dataset;
  if (root.empty()) throw ConfigError("no dataset: pass --data or set data.dataset in the config");
  if (a.split != "train" && a.split != "val" && a.split != "test") {
    throw ConfigError("--split must be train, val or test");
  }
  const auto entries = read_manifest(root).split(a.split);
  if (entries.empty()) throw DataError("split '" + a.split + "' of " + root.string() + " has no clips");

  std::optional<BaselineTable> baselines;
  if (!a.baseline.empty()) baselines = read_baseline_csv(a.baseline);
  const double hz = a.target_hz ? *a.target_hz : rc.target_hz;
  const auto result = evaluate_split(params, root, entries, hz, baselines ? &*baselines : nullptr);
  if (result.too_short > 0) std::cerr << "warning: skipped " << result.too_short << " clips shorter than one window\n";

  const auto rows = result.report.rows();
  const fs::path report = a.report ? *a.report : rc.report;
  export_report(rows, report, a.pretty ? ReportFormat::kPretty : ReportFormat::kCsv);
  for (const auto& r : rows) {
    std::printf("%-20s %10.3f mm", r.action.c_str(), r.mpjpe_mm);
    if (r.improvement_pct) std::printf("   baseline %8.3f mm  %+7.2f %%", *r.baseline_mm, *r.improvement_pct);
    std::printf("\n");
  }
  std::printf("overall MPJPE: %.3f mm over %zu clips\n", result.report.overall.mpjpe_mm, result.clips);
  std::cout << "report: " << report.string() << "\n";
  return kOk;
}

int cmd_eval(const EvalArgs& a) {
  const RunConfig rc = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  return peek_weights(a.weights).dtype == "f32" ? run_eval<float>(a, rc) : run_eval<double>(a, rc);
}

template <typename T>
int run_predict(const PredictArgs& a, const RunConfig& rc) {
  const auto params = load_weights<T>(a.weights, expected_architecture(a.config));
  const RawClip clip = read_clip(a.clip);
  const double hz = a.target_hz ? *a.target_hz : rc.target_hz;
  const PreparedStream stream = load_stream(clip, hz, params.config.input_size);
  const auto preds = predict_clip(params, std::span<const Image>(stream.frames));
  const fs::path out = a.out ? *a.out : rc.poses;
  write_poses_csv(out, preds, stream.source_frames);

  const std::vector<ClipEvaluation> scored{{clip.meta.action, preds, stream.joints}};
  std::printf("predicted %zu frames of %s\n", preds.size(), clip.id.c_str());
  std::printf("MPJPE against clip annotations: %.3f mm\n", evaluate(scored).overall.mpjpe_mm);
  std::cout << "poses: " << out.string() << "\n";
  return kOk;
}

int cmd_predict(const PredictArgs& a) {
  const RunConfig rc = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  return peek_weights(a.weights).dtype == "f32" ? run_predict<float>(a, rc) : run_predict<double>(a, rc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3D-CNN human pose estimation: synthetic data, training, evaluation, prediction"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Render a synthetic stick-figure dataset");
  synth->add_option("--out", sa.out, "Output dataset directory")->required();
  synth->add_option("--clips", sa.clips, "Number of clips")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--frames", sa.frames, "Frames per clip")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--seed", sa.seed, "Generator seed")->capture_default_str();
  synth->add_option("--fps", sa.fps, "Source frame rate")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--val", sa.val, "Trailing clips tagged val")->capture_default_str();
  synth->add_option("--test", sa.test, "Clips after the val clips tagged test")->capture_default_str();

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train on the train split, early-stopping on the val split");
  tr->add_option("--config", ta.config, "JSON run configuration")->check(CLI::ExistingFile);
  tr->add_option("--data", ta.data, "Dataset directory (overrides data.dataset)");
  tr->add_option("--out", ta.out, "Weights file to write (overrides inference.weights)");
  tr->add_option("--log", ta.log, "Epoch CSV log (overrides inference.log)");
  tr->add_option("--max-epochs", ta.max_epochs, "Epoch limit");
  tr->add_option("--seed", ta.seed, "Run seed; every random choice derives from it");
  tr->add_option("--lr", ta.lr, "Learning rate");
  tr->add_option("--momentum", ta.momentum, "Nesterov momentum");
  tr->add_option("--batch-size", ta.batch_size, "Mini-batch size");
  tr->add_option("--patience", ta.patience, "Early-stopping patience in epochs");
  tr->add_option("--precision", ta.precision, "f32 or f64");
  tr->add_option("--windows-per-clip", ta.windows_per_clip, "Windows drawn per clip (0 = all)");
  tr->add_option("--input-size", ta.input_size, "Square input resolution");
  tr->add_option("--channel-plan", ta.channel_plan, "Five convolution widths")->expected(5);
  tr->add_option("--validation-fraction", ta.validation_fraction,
                 "Share of train clips held out when the dataset has no val split");
  tr->add_flag("--freeze-prelu", ta.freeze_prelu, "Keep PReLU slopes at their initial value");
  tr->add_flag("--no-timing", ta.no_timing, "Write 0 in the seconds column so logs are reproducible");

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Per-action MPJPE of a weights file on a dataset split");
  ev->add_option("--weights", ea.weights, "Weights file")->required()->check(CLI::ExistingFile);
  ev->add_option("--data", ea.data, "Dataset directory (overrides data.dataset)");
  ev->add_option("--split", ea.split, "train, val or test")->capture_default_str();
  ev->add_option("--report", ea.report, "Report file (overrides inference.report)");
  ev->add_option("--baseline", ea.baseline, "Baseline CSV (action,mpjpe_mm) for the improvement column")
      ->check(CLI::ExistingFile);
  ev->add_option("--config", ea.config, "Run configuration the weights must match")->check(CLI::ExistingFile);
  ev->add_option("--target-hz", ea.target_hz, "Decimated frame rate");
  ev->add_flag("--pretty", ea.pretty, "Write an aligned text table instead of CSV");

  PredictArgs pa;
  auto* pr = app.add_subcommand("predict", "Averaged per-frame poses for one clip");
  pr->add_option("--weights", pa.weights, "Weights file")->required()->check(CLI::ExistingFile);
  pr->add_option("--clip", pa.clip, "Clip directory")->required();
  pr->add_option("--out", pa.out, "Poses CSV (overrides inference.poses)");
  pr->add_option("--config", pa.config, "Run configuration the weights must match")->check(CLI::ExistingFile);
  pr->add_option("--target-hz", pa.target_hz, "Decimated frame rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(sa);
    if (*tr) return cmd_train(ta);
    if (*ev) return cmd_eval(ea);
    if (*pr) return cmd_predict(pa);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
