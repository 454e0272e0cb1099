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

#include "conflictlab/trainer.h"

#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "conflictlab/error.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"

namespace conflictlab {

TrainConfig TrainConfig::Paper() { return TrainConfig{}; }

TrainConfig TrainConfig::Desk() {
  TrainConfig c;
  c.profile = "desk";
  c.batch_size = 4;
  c.learning_rate = 1e-3;
  c.epochs = 30;
  return c;
}

TrainConfig TrainConfig::ForProfile(const std::string& profile) {
  if (profile == "paper") return Paper();
  if (profile == "desk") return Desk();
  throw Error(ErrorCategory::kValidation,
              "unknown train profile '" + profile + "' (expected paper or desk)");
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCategory::kValidation, "train config: " + what);
  };
  if (epochs < 1) fail("epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (!(warmup_ratio >= 0.0 && warmup_ratio < 1.0)) fail("warmup_ratio must be in [0, 1)");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail("adam betas must be in [0, 1)");
  }
  if (!(adam_eps > 0.0)) fail("adam_eps must be > 0");
  if (!(max_grad_norm >= 0.0)) fail("max_grad_norm must be >= 0");
  if (lr_schedule != "cosine") fail("lr_schedule '" + lr_schedule + "' unsupported (cosine)");
}

nlohmann::ordered_json TrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["profile"] = profile;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["epochs"] = epochs;
  j["lr_schedule"] = lr_schedule;
  j["warmup_ratio"] = warmup_ratio;
  j["weight_decay"] = weight_decay;
  j["seed"] = seed;
  j["checkpoint_every_epoch"] = checkpoint_every_epoch;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  j["max_grad_norm"] = max_grad_norm;
  return j;
}

TrainConfig TrainConfig::FromJson(const nlohmann::ordered_json& j, TrainConfig c) {
  try {
    if (j.contains("profile") && j.at("profile").get<std::string>() != c.profile) {
      c = ForProfile(j.at("profile").get<std::string>());
    }
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.lr_schedule = j.value("lr_schedule", c.lr_schedule);
    c.warmup_ratio = j.value("warmup_ratio", c.warmup_ratio);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.seed = j.value("seed", c.seed);
    c.checkpoint_every_epoch = j.value("checkpoint_every_epoch", c.checkpoint_every_epoch);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, std::string("train config: ") + e.what());
  }
  return c;
}

int64_t StepsPerEpoch(size_t num_examples, int batch_size) {
  return static_cast<int64_t>((num_examples + static_cast<size_t>(batch_size) - 1) /
                              static_cast<size_t>(batch_size));
}

int64_t WarmupSteps(const TrainConfig& cfg, int64_t total_steps) {
  return static_cast<int64_t>(std::ceil(cfg.warmup_ratio * static_cast<double>(total_steps)));
}

double LearningRate(const TrainConfig& cfg, int64_t step, int64_t total_steps) {
  const int64_t warmup = WarmupSteps(cfg, total_steps);
  if (step < warmup) {
    return cfg.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup);
  }
  const double span = static_cast<double>(std::max<int64_t>(total_steps - warmup, 1));
  const double progress = static_cast<double>(step - warmup) / span;
  return cfg.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

std::string TrainLog::ToCsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "step,epoch,loss,lr\n";
  for (const auto& e : steps) {
    out << e.step << ',' << e.epoch << ',' << e.loss << ',' << e.lr << '\n';
  }
  return out.str();
}

void TrainLog::WriteCsv(const std::string& path) const { WriteFile(path, ToCsv()); }

std::vector<double> MetricTable::Column(const std::string& metric) const {
  std::vector<double> out;
  for (const auto& row : rows) {
    auto it = row.find(metric);
    if (it == row.end()) {
      throw Error(ErrorCategory::kArgument, "no metric '" + metric + "' in table");
    }
    out.push_back(it->second);
  }
  return out;
}

std::string MetricTable::ToCsv() const {
  std::map<std::string, int> columns;
  for (const auto& row : rows) {
    for (const auto& [k, v] : row) columns[k] = 0;
  }
  std::ostringstream out;
  out.precision(10);
  out << "epoch";
  for (const auto& [k, unused] : columns) out << ',' << k;
  out << '\n';
  for (size_t i = 0; i < rows.size(); ++i) {
    out << epochs[i];
    for (const auto& [k, unused] : columns) {
      out << ',';
      if (auto it = rows[i].find(k); it != rows[i].end()) out << it->second;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<TokenId>> EncodeDocuments(const Tokenizer& tokenizer,
                                                  std::span<const std::string> texts,
                                                  int max_context) {
  std::vector<std::vector<TokenId>> docs;
  docs.reserve(texts.size());
  for (const auto& text : texts) {
    docs.push_back(tokenizer.Encode(text));
    if (docs.back().size() > static_cast<size_t>(max_context)) {
      throw Error(ErrorCategory::kContext,
                  "document of " + std::to_string(docs.back().size()) +
                      " tokens exceeds max_context " + std::to_string(max_context) + ": " +
                      text.substr(0, 60));
    }
  }
  return docs;
}

template <typename T>
double BatchLossAndGradient(const Transformer<T>& model,
                            std::span<const std::vector<TokenId>> docs, ParamVector<T>& grad) {
  grad.assign(model.parameter_count(), T(0));
  double loss = 0.0;
  const double inv_docs = 1.0 / static_cast<double>(docs.size());
  for (const auto& doc : docs) {
    if (doc.size() < 2) {
      throw Error(ErrorCategory::kArgument, "a training document needs at least two tokens");
    }
    const double per_doc = inv_docs / static_cast<double>(doc.size() - 1);
    loss += per_doc * model.NllAndGradient(doc, grad, static_cast<T>(per_doc));
  }
  return loss;
}

template double BatchLossAndGradient<float>(const Transformer<float>&,
                                            std::span<const std::vector<TokenId>>,
                                            ParamVector<float>&);
template double BatchLossAndGradient<double>(const Transformer<double>&,
                                             std::span<const std::vector<TokenId>>,
                                             ParamVector<double>&);

double BatchLoss(const LmModel& model, std::span<const std::vector<TokenId>> docs) {
  if (docs.empty()) throw Error(ErrorCategory::kEmptyInput, "empty batch");
  double loss = 0.0;
  for (const auto& doc : docs) {
    loss -= model.LogProb(doc) / static_cast<double>(doc.size() - 1);
  }
  return loss / static_cast<double>(docs.size());
}

namespace {

class AdamW {
 public:
  AdamW(const TrainConfig& cfg, size_t n) : cfg_(cfg), m_(n, 0.0f), v_(n, 0.0f) {}

  void Step(ParamVector<float>& params, const ParamVector<float>& grad, double lr) {
    ++t_;
    const double b1 = cfg_.adam_beta1;
    const double b2 = cfg_.adam_beta2;
    const float c1 = static_cast<float>(1.0 / (1.0 - std::pow(b1, static_cast<double>(t_))));
    const float c2 = static_cast<float>(1.0 / (1.0 - std::pow(b2, static_cast<double>(t_))));
    const float fb1 = static_cast<float>(b1), fb2 = static_cast<float>(b2);
    const float flr = static_cast<float>(lr);
    const float eps = static_cast<float>(cfg_.adam_eps);
    const float decay = static_cast<float>(1.0 - lr * cfg_.weight_decay);
    for (size_t i = 0; i < params.size(); ++i) {
      const float g = grad[i];
      m_[i] = fb1 * m_[i] + (1.0f - fb1) * g;
      v_[i] = fb2 * v_[i] + (1.0f - fb2) * g * g;
      const float mhat = m_[i] * c1;
      const float vhat = v_[i] * c2;
      params[i] = params[i] * decay - flr * mhat / (std::sqrt(vhat) + eps);
    }
  }

 private:
  const TrainConfig& cfg_;
  std::vector<float> m_, v_;
  int64_t t_ = 0;
};

void ClipGradient(ParamVector<float>& grad, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (float g : grad) sq += static_cast<double>(g) * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const float s = static_cast<float>(max_norm / norm);
    for (float& g : grad) g *= s;
  }
}

HookedTrainResult RunTraining(LmModel& model, std::span<const std::vector<TokenId>> docs,
                              const TrainConfig& cfg, const std::vector<EvalHook>& hooks,
                              const TrainOptions& options) {
  cfg.Validate();
  if (docs.empty()) throw Error(ErrorCategory::kEmptyInput, "empty training corpus");
  for (const auto& doc : docs) {
    if (doc.size() > static_cast<size_t>(model.config().max_context)) {
      throw Error(ErrorCategory::kContext, "training document of " +
                                               std::to_string(doc.size()) +
                                               " tokens exceeds max_context");
    }
  }
  if (cfg.checkpoint_every_epoch && (options.checkpoint_dir.empty() || !options.tokenizer)) {
    throw Error(ErrorCategory::kArgument,
                "per-epoch checkpoints need a checkpoint directory and tokenizer");
  }
  const auto start = std::chrono::steady_clock::now();
  const int64_t per_epoch = StepsPerEpoch(docs.size(), cfg.batch_size);
  const int64_t total = per_epoch * cfg.epochs;
  AdamW opt(cfg, model.parameter_count());
  ParamVector<float> grad;
  std::vector<size_t> order(docs.size());
  std::vector<std::vector<TokenId>> batch;
  HookedTrainResult result;
  int64_t step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(DeriveSeed(cfg.seed, "shuffle", static_cast<uint64_t>(epoch)));
    rng.Shuffle(order);
    double epoch_loss = 0.0;
    for (int64_t b = 0; b < per_epoch; ++b, ++step) {
      const size_t lo = static_cast<size_t>(b) * static_cast<size_t>(cfg.batch_size);
      const size_t hi = std::min(lo + static_cast<size_t>(cfg.batch_size), docs.size());
      batch.clear();
      for (size_t i = lo; i < hi; ++i) batch.push_back(docs[order[i]]);
      const double lr = LearningRate(cfg, step, total);
      const double loss = BatchLossAndGradient(model, std::span(batch), grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCategory::kTraining,
                    "non-finite loss at step " + std::to_string(step) + " (epoch " +
                        std::to_string(epoch) + ", lr " + std::to_string(lr) +
                        "): " + std::to_string(loss));
      }
      ClipGradient(grad, cfg.max_grad_norm);
      opt.Step(model.params(), grad, lr);
      result.log.steps.push_back({step, epoch, loss, lr});
      epoch_loss += loss;
    }
    result.log.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(per_epoch));
    if (options.on_epoch_end) options.on_epoch_end(epoch, result.log.epoch_mean_loss.back());
    if (cfg.checkpoint_every_epoch) {
      const std::string dir = JoinPath(options.checkpoint_dir, "epoch-" + std::to_string(epoch));
      auto meta = options.checkpoint_metadata;
      meta["epoch"] = epoch;
      meta["train_config"] = cfg.ToJson();
      SaveCheckpoint(dir, model, *options.tokenizer, meta);
      result.log.checkpoint_paths.push_back(dir);
    }
    if (!hooks.empty()) {
      std::map<std::string, double> row;
      for (const auto& hook : hooks) {
        try {
          for (auto& [k, v] : hook.evaluate(model, epoch)) row[k] = v;
        } catch (const Error& e) {
          throw Error(e.category(), "eval hook '" + hook.name + "' at epoch " +
                                        std::to_string(epoch) + ": " + e.what());
        }
      }
      result.metrics.epochs.push_back(epoch);
      result.metrics.rows.push_back(std::move(row));
    }
  }
  result.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

TrainLog Train(LmModel& model, std::span<const std::vector<TokenId>> docs,
               const TrainConfig& cfg, const TrainOptions& options) {
  return RunTraining(model, docs, cfg, {}, options).log;
}

HookedTrainResult TrainWithEvalHooks(LmModel& model,
                                     std::span<const std::vector<TokenId>> docs,
                                     const TrainConfig& cfg,
                                     const std::vector<EvalHook>& hooks,
                                     const TrainOptions& options) {
  return RunTraining(model, docs, cfg, hooks, options);
}

GradientCheckResult GradientCheck(Transformer<double>& model,
                                  std::span<const std::vector<TokenId>> docs,
                                  double epsilon) {
  if (docs.empty()) throw Error(ErrorCategory::kEmptyInput, "empty gradient-check batch");
  ParamVector<double> analytic;
  BatchLossAndGradient(model, docs, analytic);
  ParamVector<double> scratch;
  GradientCheckResult result;
  auto& params = model.params();
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + epsilon;
    const double up = BatchLossAndGradient(model, docs, scratch);
    params[i] = saved - epsilon;
    const double down = BatchLossAndGradient(model, docs, scratch);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), kGradientCheckFloor});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > result.max_relative_error || i == 0) {
      result.max_relative_error = rel;
      result.worst_index = i;
      result.analytic_at_worst = analytic[i];
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}

}  // namespace conflictlab
