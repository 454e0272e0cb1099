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

#ifndef CONFLICTLAB_EVAL_H_
#define CONFLICTLAB_EVAL_H_

#include <Eigen/Core>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "conflictlab/corpus.h"
#include "conflictlab/scorer.h"
#include "json.hpp"

namespace conflictlab {

// Statements are compared by logprob / num_tokens (kNormalized) or by the raw
// summed logprob (kSum).
enum class ScoreMode { kNormalized, kSum };

const char* ScoreModeName(ScoreMode mode);
ScoreMode ParseScoreMode(const std::string& name);

inline constexpr const char* kTiePolicy = "a tie counts 0.5 for each side";

struct PairCounts {
  size_t n = 0;
  size_t wins_a = 0;
  size_t wins_b = 0;
  size_t ties = 0;

  // (wins_a + 0.5 * ties) / n, computed as (2 wins_a + ties) / (2 n) so that
  // the score and its side-swapped twin add to exactly 1.
  double Score() const;
  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

struct PairOutcome {
  std::string id;  // StatementPair::Id()
  int winner = 0;  // +1 side A, -1 side B, 0 tie
  friend bool operator==(const PairOutcome&, const PairOutcome&) = default;
};

struct PreferenceReport {
  std::array<PairCounts, 5> per_attribute;  // kAllAttributes order
  PairCounts total;
  double average = 0.0;
  ScoreMode mode = ScoreMode::kNormalized;
  std::string scorer;
  std::vector<PairOutcome> outcomes;

  double Score(Attribute a) const;
  size_t n() const { return total.n; }
  size_t tie_count() const { return total.ties; }
  nlohmann::ordered_json ToJson() const;
  // attribute,score,n,wins_a,wins_b,ties with a final "average" row.
  std::string ToCsv() const;
};

// Average over the attributes that have pairs: the pooled score when every
// such attribute has the same n (identical to the mean of the per-attribute
// scores, and exactly complementary under side swap), else the plain mean.
double AverageScore(const std::array<PairCounts, 5>& per_attribute);

// Scores both statements of every pair through `scorer` and counts strict
// wins and exact ties. Throws kEmptyInput on no pairs and kScorer naming the
// statement when the scorer returns an error.
PreferenceReport PreferenceScore(SequenceScorer& scorer, std::span<const StatementPair> pairs,
                                 ScoreMode mode = ScoreMode::kNormalized);

struct McqReport {
  std::array<size_t, 5> correct{};
  std::array<size_t, 5> total{};
  size_t items = 0;
  double overall = 0.0;
  ScoreMode mode = ScoreMode::kNormalized;
  std::string scorer;

  double Accuracy(Attribute a) const;
  nlohmann::ordered_json ToJson() const;
  std::string ToCsv() const;
};

// An item is correct iff the true statement scores strictly above all three
// distractors; any tie counts as incorrect.
McqReport McqAccuracy(SequenceScorer& scorer, std::span<const McqItem> items,
                      ScoreMode mode = ScoreMode::kNormalized);

struct StyleWinnerReport {
  std::vector<std::string> styles;
  std::vector<size_t> wins;
  std::vector<double> proportions;
  size_t n = 0;
  std::string scorer;

  nlohmann::ordered_json ToJson() const;
  std::string ToCsv() const;
};

// Per item, the style whose statement scores highest earns one count; ties
// go to the earliest style.
StyleWinnerReport MultiStyleWinners(SequenceScorer& scorer, std::span<const MixtureItem> items,
                                    const std::vector<std::string>& styles,
                                    ScoreMode mode = ScoreMode::kNormalized);

struct ProjectionReport {
  std::vector<std::array<double, 2>> coords;
  std::vector<std::string> labels;
  std::array<double, 2> variances{};  // top-2 covariance eigenvalues
  std::array<double, 2> explained_variance_ratio{};
  double total_variance = 0.0;
  Eigen::MatrixXd components;  // d x 2, unit columns

  nlohmann::ordered_json ToJson() const;
  // label,pc1,pc2
  std::string ToCsv() const;
};

// Relative threshold below which the second eigenvalue counts as zero.
inline constexpr double kDegenerateRankTolerance = 1e-10;

// Mean-centres, forms the (n - 1)-normalized covariance and keeps its top two
// eigenvectors, each signed so its largest-magnitude coordinate is positive.
// Throws kArgument on < 3 vectors or mixed dimensions and kDegenerateRank when
// the centred data has rank < 2.
ProjectionReport PcaProject(const std::vector<Eigen::VectorXd>& vectors,
                            const std::vector<std::string>& labels);

}  // namespace conflictlab

#endif  // CONFLICTLAB_EVAL_H_
