// Copyright 2026 The ConflictLab Authors
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

#ifndef CONFLICTLAB_TRAINER_H_
#define CONFLICTLAB_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "conflictlab/model.h"
#include "conflictlab/tokenizer.h"
#include "json.hpp"

namespace conflictlab {

struct TrainConfig {
  std::string profile = "paper";
  int batch_size = 64;
  double learning_rate = 1e-5;
  int epochs = 5;
  std::string lr_schedule = "cosine";
  double warmup_ratio = 0.03;
  double weight_decay = 0.0;
  uint64_t seed = 0;
  bool checkpoint_every_epoch = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // Global L2 clip on the batch gradient; 0 disables.
  double max_grad_norm = 1.0;

  // Fine-tune hyperparameters of the reference setup.
  static TrainConfig Paper();
  // From-scratch desk training: lr 1e-3, 30 epochs, batch 4.
  static TrainConfig Desk();
  static TrainConfig ForProfile(const std::string& profile);

  // Throws kValidation: epochs >= 1, batch >= 1, lr > 0, warmup in [0, 1),
  // weight decay >= 0, betas in [0, 1), eps > 0, schedule "cosine".
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  // Overlays the keys present in `j` onto `base`.
  static TrainConfig FromJson(const nlohmann::ordered_json& j, TrainConfig base);
};

int64_t StepsPerEpoch(size_t num_examples, int batch_size);
int64_t WarmupSteps(const TrainConfig& cfg, int64_t total_steps);

// Linear warmup peak * (s + 1) / W for s < W, then cosine decay from peak
// towards zero over the remaining steps. `step` is 0-based.
double LearningRate(const TrainConfig& cfg, int64_t step, int64_t total_steps);

struct TrainLogEntry {
  int64_t step = 0;
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct TrainLog {
  std::vector<TrainLogEntry> steps;  // one per optimizer step
  std::vector<double> epoch_mean_loss;
  double wall_seconds = 0.0;
  std::vector<std::string> checkpoint_paths;

  // step,epoch,loss,lr
  std::string ToCsv() const;
  void WriteCsv(const std::string& path) const;
};

// Per-epoch evaluator; returns named metrics for the epoch-end model.
struct EvalHook {
  std::string name;
  std::function<std::map<std::string, double>(const LmModel&, int epoch)> evaluate;
};

struct MetricTable {
  std::vector<int> epochs;
  std::vector<std::map<std::string, double>> rows;

  std::vector<double> Column(const std::string& metric) const;
  // epoch,<metric>... with columns in sorted order.
  std::string ToCsv() const;
};

struct TrainOptions {
  // Written by Train when cfg.checkpoint_every_epoch is set (epoch-N subdirs).
  std::string checkpoint_dir;
  const Tokenizer* tokenizer = nullptr;
  nlohmann::ordered_json checkpoint_metadata = nlohmann::ordered_json::object();
  std::function<void(int epoch, double mean_loss)> on_epoch_end;
};

// Encodes every text and checks it fits the context (kContext otherwise).
std::vector<std::vector<TokenId>> EncodeDocuments(const Tokenizer& tokenizer,
                                                  std::span<const std::string> texts,
                                                  int max_context);

// Mean over documents of the per-document mean next-token NLL.
double BatchLoss(const LmModel& model, std::span<const std::vector<TokenId>> docs);

// AdamW over shuffled mini-batches; the per-epoch order comes from
// DeriveSeed(cfg.seed, "shuffle", epoch) and reductions are serial, so a run
// is bit-reproducible. Throws kTraining on a non-finite loss.
TrainLog Train(LmModel& model, std::span<const std::vector<TokenId>> docs,
               const TrainConfig& cfg, const TrainOptions& options = {});

struct HookedTrainResult {
  TrainLog log;
  MetricTable metrics;
};

// Train, calling every hook on the model at the end of each epoch.
// A hook failure is rethrown with the hook name and epoch prepended.
HookedTrainResult TrainWithEvalHooks(LmModel& model,
                                     std::span<const std::vector<TokenId>> docs,
                                     const TrainConfig& cfg,
                                     const std::vector<EvalHook>& hooks,
                                     const TrainOptions& options = {});

struct GradientCheckResult {
  double max_relative_error = 0.0;
  size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Denominator floor for the relative error |a - n| / max(|a|, |n|, floor),
// so near-zero gradients are compared on an absolute scale.
inline constexpr double kGradientCheckFloor = 1e-4;

// Central differences of BatchLoss over every parameter of a double model.
GradientCheckResult GradientCheck(Transformer<double>& model,
                                  std::span<const std::vector<TokenId>> docs,
                                  double epsilon);

// BatchLoss and its analytic gradient for any instantiation.
template <typename T>
double BatchLossAndGradient(const Transformer<T>& model,
                            std::span<const std::vector<TokenId>> docs, ParamVector<T>& grad);

}  // namespace conflictlab

#endif  // CONFLICTLAB_TRAINER_H_
