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

#ifndef CONFLICTLAB_EXPERIMENT_H_
#define CONFLICTLAB_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "conflictlab/corpus.h"
#include "conflictlab/eval.h"
#include "conflictlab/model.h"
#include "conflictlab/trainer.h"
#include "json.hpp"

namespace conflictlab {

enum class RecipeKind {
  kConflictPairwise,
  kLearningSpeed,
  kConsistencyRatio,
  kCounterfactual,
  kMultiStyle,
  kRepresentationProbe,
};

const char* RecipeKindName(RecipeKind kind);
// Accepts the canonical names plus the short aliases "conflict",
// "consistency", "probe" and "styles".
RecipeKind ParseRecipeKind(const std::string& name);

// Probe sources: two newspapers from each side's set.
inline constexpr int kProbeSources = 4;

struct ExperimentRecipe {
  std::string name;
  RecipeKind kind = RecipeKind::kConsistencyRatio;
  std::string feature_a;
  std::string feature_b;
  // learning_speed: one run per feature; multi_style: the mixed styles.
  std::vector<std::string> features;
  int m = 9;
  int n = 1;
  // consistency_ratio sweeps; empty means the single ratio (m, n).
  std::vector<std::pair<int, int>> ratios;
  size_t knowledge_count = 50;
  double test_fraction = kDefaultTestFraction;
  std::vector<uint64_t> seeds = {1};
  std::string profile = "desk";
  TrainConfig train = TrainConfig::Desk();
  LmConfig model;  // vocab_size is filled from the tokenizer
  // "internal" or a shell command speaking the scorer wire protocol. An
  // external scorer is used as is: nothing is trained.
  std::string scorer = "internal";
  ScoreMode score_mode = ScoreMode::kNormalized;
  StatementStyle statement_style = StatementStyle::kPlain;
  SourcePlacement placement = SourcePlacement::kBeginning;
  int representation_layer = kLastLayer;
  // Drop the source prefix tokens before averaging representations.
  bool exclude_prefix = false;
  // Records whose biographies are embedded per probe source.
  size_t probe_records = 20;
  bool save_checkpoint = true;
  // Run the evaluators after every epoch (dynamics curves), not only at the end.
  bool eval_every_epoch = true;
  std::string data_dir;  // empty: DefaultDataDir()

  // Defaults per kind: features, ratio and name.
  static ExperimentRecipe ForKind(RecipeKind kind);

  // Throws kValidation on distinct-seed, ratio, feature-count or range
  // violations, naming the field.
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  // Overlays the keys present in `j` onto `base`; unknown keys are errors.
  static ExperimentRecipe FromJson(const nlohmann::ordered_json& j, ExperimentRecipe base);
  // Kind taken from the "kind" key, then FromJson over ForKind(kind).
  static ExperimentRecipe FromJson(const nlohmann::ordered_json& j);

  std::vector<std::pair<int, int>> EffectiveRatios() const;
};

// Release string written as VERSION into every output directory.
const char* ToolVersion();

// metric name -> value, flat (e.g. "test.pref.average").
using MetricMap = std::map<std::string, double>;

struct SeedResult {
  uint64_t seed = 0;
  std::string dir;
  MetricMap metrics;
};

struct MetricSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  size_t count = 0;
};

struct ExperimentResult {
  std::string dir;
  std::vector<SeedResult> seeds;
  std::map<std::string, MetricSummary> summary;
  std::vector<std::string> written;  // every file path produced
  // (corpus path, FNV-1a hex digest of its bytes), in generation order.
  std::vector<std::pair<std::string, std::string>> digests;
};

// Mean and min/max of every metric over the runs that report it.
std::map<std::string, MetricSummary> Summarize(const std::vector<MetricMap>& runs);
nlohmann::ordered_json SummaryToJson(const std::map<std::string, MetricSummary>& summary);
// metric,mean,min,max,count
std::string SummaryToCsv(const std::map<std::string, MetricSummary>& summary);

// Progress sink; the default is silent.
using ProgressFn = std::function<void(const std::string&)>;

// Generate -> train -> evaluate for every seed, writing one bundle per seed
// under <out_dir>/seed-<s>/ and summary.{json,csv} under out_dir. A failing
// stage rethrows with "stage '<name>' (seed <s>): " prepended; files written
// so far stay in place.
ExperimentResult RunExperiment(const ExperimentRecipe& recipe, const std::string& out_dir,
                               const ProgressFn& progress = {});

// The generate stage alone: every corpus, statement and item file RunExperiment
// would write, with no training or evaluation.
ExperimentResult GenerateCorpora(const ExperimentRecipe& recipe, const std::string& out_dir,
                                 const ProgressFn& progress = {});

// Reads metrics.json from each seed directory and writes the merged summary
// into out_dir. Throws kEmptyInput when no run directory is given.
ExperimentResult MergeRuns(const std::vector<std::string>& run_dirs, const std::string& out_dir);

// Between-group over within-group spread of 2-D points: distance between
// the two group centroids divided by the mean distance of each point to its
// own group centroid. groups[i] is 0 or 1.
double GroupSeparation(const std::vector<std::array<double, 2>>& points,
                       const std::vector<int>& groups);

}  // namespace conflictlab

#endif  // CONFLICTLAB_EXPERIMENT_H_
