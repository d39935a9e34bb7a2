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

#ifndef POSE3D_TRAINER_HPP_
#define POSE3D_TRAINER_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pose3d/loss.hpp"
#include "pose3d/network.hpp"
#include "pose3d/optimizer.hpp"
#include "pose3d/rng.hpp"
#include "pose3d/sample.hpp"

namespace pose3d {

struct TrainConfig {
  std::size_t batch_size = 10;
  double learning_rate = 1e-5;
  double momentum = 0.9;
  std::size_t patience = 15;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  bool freeze_prelu = false;
  // Sample budgets expressed in batches; zero means unlimited.
  std::size_t max_train_batches = 20000;
  std::size_t max_val_batches = 2000;
  std::size_t max_test_batches = 2000;
};

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  double train_loss_mm = 0;
  double val_mpjpe_mm = 0;
  double seconds = 0;
};

/// Patience tracker. An epoch improves only when its score is strictly lower
/// than the best seen so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Records the next epoch's score; returns true if it is a new best.
  bool observe(double score) {
    ++epoch_;
    if (score < best_) {
      best_ = score;
      best_epoch_ = epoch_;
      since_best_ = 0;
      return true;
    }
    ++since_best_;
    return false;
  }

  bool should_stop() const { return since_best_ >= patience_; }
  double best() const { return best_; }
  std::size_t best_epoch() const { return best_epoch_; }
  std::size_t epochs_seen() const { return epoch_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

template <typename T>
struct TrainHooks {
  std::function<void(const EpochReport&)> on_epoch;
  /// Seconds since an arbitrary origin; defaults to a steady clock.
  std::function<double()> clock;
  /// Replaces the default validation MPJPE when set.
  std::function<double(const NetworkParams<T>&)> validator;
};

template <typename T>
struct TrainResult {
  NetworkParams<T> best;
  std::size_t best_epoch = 0;
  double best_val_mpjpe_mm = 0;
  std::vector<EpochReport> reports;
  bool stopped_early = false;
};

/// Mean MPJPE of the network over `samples` (single forward pass each).
template <typename T>
double mean_mpjpe(const NetworkParams<T>& params, std::span<const Sample<T>> samples) {
  if (samples.empty()) return 0.0;
  double total = 0;
  for (const auto& s : samples) total += static_cast<double>(mpjpe(predict(params, s.input), s.target));
  return total / static_cast<double>(samples.size());
}

/// Loss and batch-mean gradient over `batch` evaluated at `params`.
template <typename T>
double accumulate_batch(const NetworkParams<T>& params, std::span<const Sample<T>* const> batch,
                        NetworkParams<T>& grads) {
  grads = params.zeros_like();
  double loss = 0;
  for (const Sample<T>* s : batch) {
    auto fr = forward(params, s->input);
    loss += static_cast<double>(mpjpe(fr.output, s->target));
    auto g = backward(params, fr.trace, mpjpe_gradient(fr.output, s->target));
    std::vector<const Tensor<T>*> gs;
    g.visit([&](const std::string&, const Tensor<T>& t) { gs.push_back(&t); });
    std::size_t i = 0;
    grads.visit([&](const std::string&, Tensor<T>& t) { axpy(T{1}, *gs[i++], t); });
  }
  const T inv = T{1} / static_cast<T>(batch.size());
  grads.visit([&](const std::string&, Tensor<T>& t) {
    for (T& v : t.data()) v *= inv;
  });
  return loss;
}

/// Mini-batch Nesterov SGD on MPJPE with early stopping on validation MPJPE.
/// Epoch = one pass over the (budget-capped) training set in a fresh seeded
/// permutation; the trailing partial batch is kept. Returns the parameters
/// from the epoch with the lowest validation MPJPE.
template <typename T>
TrainResult<T> train(const TrainConfig& cfg, NetworkParams<T> params, std::span<const Sample<T>> train_set,
                     std::span<const Sample<T>> val_set, const TrainHooks<T>& hooks = {}) {
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (cfg.patience == 0) throw ConfigError("patience must be >= 1");
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (val_set.empty() && !hooks.validator) throw ConfigError("validation set is empty");

  auto capped = [&](std::size_t n, std::size_t batches) {
    return batches == 0 ? n : std::min(n, batches * cfg.batch_size);
  };
  train_set = train_set.first(capped(train_set.size(), cfg.max_train_batches));
  val_set = val_set.first(capped(val_set.size(), cfg.max_val_batches));

  const auto clock = hooks.clock ? hooks.clock : [] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
  };

  NesterovSgd<T> opt(params, static_cast<T>(cfg.learning_rate), static_cast<T>(cfg.momentum));
  Rng shuffle_rng(cfg.seed);
  EarlyStopping stopper(cfg.patience);
  TrainResult<T> result;
  result.best = params;

  std::vector<std::size_t> order(train_set.size());
  std::vector<const Sample<T>*> batch;
  NetworkParams<T> grads;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double t0 = clock();
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(order.begin(), order.end());

    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
        batch.push_back(&train_set[order[i]]);
      }
      const NetworkParams<T> ahead = opt.lookahead(params);
      double loss;
      try {
        loss = accumulate_batch<T>(ahead, batch, grads);
      } catch (const InvalidInputError&) {
        loss = std::numeric_limits<double>::quiet_NaN();
      }
      if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite training loss in epoch " + std::to_string(epoch), epoch);
      }
      if (cfg.freeze_prelu) {
        for (auto& a : grads.prelu) a.slope.fill(T{0});
      }
      opt.step(params, grads);
      loss_sum += loss;
    }

    EpochReport rep;
    rep.epoch = epoch;
    rep.train_loss_mm = loss_sum / static_cast<double>(order.size());
    try {
      rep.val_mpjpe_mm = hooks.validator ? hooks.validator(params) : mean_mpjpe<T>(params, val_set);
    } catch (const InvalidInputError&) {
      rep.val_mpjpe_mm = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(rep.val_mpjpe_mm)) {
      throw DivergenceError("non-finite validation MPJPE in epoch " + std::to_string(epoch), epoch);
    }
    rep.seconds = clock() - t0;
    result.reports.push_back(rep);
    if (hooks.on_epoch) hooks.on_epoch(rep);

    if (stopper.observe(rep.val_mpjpe_mm)) result.best = params;
    if (stopper.should_stop()) {
      result.stopped_early = true;
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  result.best_val_mpjpe_mm = stopper.best();
  return result;
}

inline constexpr const char* kEpochLogHeader = "epoch,train_loss_mm,val_mpjpe_mm,seconds";

inline std::string format_epoch_row(const EpochReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.6f", r.epoch, r.train_loss_mm, r.val_mpjpe_mm,
                r.seconds);
  return buf;
}

/// Appends one CSV row per epoch; writes the header when the file is new or empty.
class EpochLog {
 public:
  explicit EpochLog(const std::filesystem::path& path) : path_(path) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    os_.open(path, std::ios::app);
    if (!os_) throw DataError("cannot open epoch log: " + path.string());
    if (fresh) os_ << kEpochLogHeader << '\n';
  }

  void append(const EpochReport& r) {
    os_ << format_epoch_row(r) << '\n';
    os_.flush();
  }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

}  // namespace pose3d

#endif  // POSE3D_TRAINER_HPP_
