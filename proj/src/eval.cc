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

#include "conflictlab/eval.h"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "conflictlab/error.h"

namespace conflictlab {
namespace {

size_t AttributeIndex(Attribute a) { return static_cast<size_t>(a); }

double Value(const ScoreResponse& r, ScoreMode mode) {
  return mode == ScoreMode::kNormalized ? r.Normalized() : r.logprob;
}

// Scores every request; a per-request error becomes kScorer naming the id.
std::vector<double> ScoreOrThrow(SequenceScorer& scorer,
                                 const std::vector<ScoreRequest>& requests, ScoreMode mode) {
  const auto responses = scorer.ScoreAll(requests);
  if (responses.size() != requests.size()) {
    throw Error(ErrorCategory::kScorer, "scorer returned " + std::to_string(responses.size()) +
                                            " responses for " +
                                            std::to_string(requests.size()) + " requests");
  }
  std::vector<double> values(requests.size());
  for (size_t i = 0; i < requests.size(); ++i) {
    const auto& r = responses[i];
    if (r.error) {
      throw Error(ErrorCategory::kScorer, "statement '" + requests[i].id + "': " + *r.error);
    }
    if (r.num_tokens < 1) {
      throw Error(ErrorCategory::kScorer,
                  "statement '" + requests[i].id + "': num_tokens must be >= 1");
    }
    values[i] = Value(r, mode);
  }
  return values;
}

std::string FormatDouble(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

nlohmann::ordered_json CountsJson(const PairCounts& c) {
  return {{"score", c.Score()},  {"n", c.n},        {"wins_a", c.wins_a},
          {"wins_b", c.wins_b},  {"ties", c.ties}};
}

}  // namespace

const char* ScoreModeName(ScoreMode mode) {
  return mode == ScoreMode::kNormalized ? "normalized" : "sum";
}

ScoreMode ParseScoreMode(const std::string& name) {
  if (name == "normalized") return ScoreMode::kNormalized;
  if (name == "sum") return ScoreMode::kSum;
  throw Error(ErrorCategory::kValidation,
              "unknown score mode '" + name + "' (expected normalized or sum)");
}

double PairCounts::Score() const {
  if (n == 0) return 0.0;
  return static_cast<double>(2 * wins_a + ties) / static_cast<double>(2 * n);
}

double AverageScore(const std::array<PairCounts, 5>& per_attribute) {
  PairCounts pooled;
  size_t used = 0;
  bool equal_n = true;
  double sum = 0.0;
  for (const auto& c : per_attribute) {
    if (c.n == 0) continue;
    if (used > 0 && c.n != pooled.n / used) equal_n = false;
    pooled.n += c.n;
    pooled.wins_a += c.wins_a;
    pooled.wins_b += c.wins_b;
    pooled.ties += c.ties;
    sum += c.Score();
    ++used;
  }
  if (used == 0) return 0.0;
  return equal_n ? pooled.Score() : sum / static_cast<double>(used);
}

double PreferenceReport::Score(Attribute a) const {
  return per_attribute[AttributeIndex(a)].Score();
}

nlohmann::ordered_json PreferenceReport::ToJson() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = "pairwise_preference";
  j["scorer"] = scorer;
  j["score_mode"] = ScoreModeName(mode);
  j["tie_policy"] = kTiePolicy;
  j["average"] = average;
  j["n"] = total.n;
  j["tie_count"] = total.ties;
  j["attributes"] = nlohmann::ordered_json::object();
  for (Attribute a : kAllAttributes) {
    j["attributes"][AttributeName(a)] = CountsJson(per_attribute[AttributeIndex(a)]);
  }
  j["total"] = CountsJson(total);
  return j;
}

std::string PreferenceReport::ToCsv() const {
  std::ostringstream out;
  out << "attribute,score,n,wins_a,wins_b,ties\n";
  auto row = [&](const std::string& name, double score, const PairCounts& c) {
    out << name << ',' << FormatDouble(score) << ',' << c.n << ',' << c.wins_a << ','
        << c.wins_b << ',' << c.ties << '\n';
  };
  for (Attribute a : kAllAttributes) {
    const auto& c = per_attribute[AttributeIndex(a)];
    row(AttributeName(a), c.Score(), c);
  }
  row("average", average, total);
  return out.str();
}

PreferenceReport PreferenceScore(SequenceScorer& scorer, std::span<const StatementPair> pairs,
                                 ScoreMode mode) {
  if (pairs.empty()) throw Error(ErrorCategory::kEmptyInput, "empty evaluation set");
  std::vector<ScoreRequest> requests;
  requests.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    requests.push_back({p.Id() + "/A", p.s_a});
    requests.push_back({p.Id() + "/B", p.s_b});
  }
  const auto values = ScoreOrThrow(scorer, requests, mode);
  PreferenceReport report;
  report.mode = mode;
  report.scorer = scorer.Identity();
  report.outcomes.reserve(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    const double a = values[2 * i];
    const double b = values[2 * i + 1];
    const int winner = a > b ? 1 : (b > a ? -1 : 0);
    for (PairCounts* c : {&report.per_attribute[AttributeIndex(pairs[i].attribute)],
                          &report.total}) {
      ++c->n;
      if (winner > 0) ++c->wins_a;
      if (winner < 0) ++c->wins_b;
      if (winner == 0) ++c->ties;
    }
    report.outcomes.push_back({pairs[i].Id(), winner});
  }
  report.average = AverageScore(report.per_attribute);
  return report;
}

double McqReport::Accuracy(Attribute a) const {
  const size_t i = AttributeIndex(a);
  return total[i] == 0 ? 0.0 : static_cast<double>(correct[i]) / static_cast<double>(total[i]);
}

nlohmann::ordered_json McqReport::ToJson() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = "mcq_accuracy";
  j["scorer"] = scorer;
  j["score_mode"] = ScoreModeName(mode);
  j["tie_policy"] = "a tie with any distractor counts as incorrect";
  j["overall"] = overall;
  j["items"] = items;
  j["attributes"] = nlohmann::ordered_json::object();
  for (Attribute a : kAllAttributes) {
    const size_t i = AttributeIndex(a);
    j["attributes"][AttributeName(a)] = {
        {"accuracy", Accuracy(a)}, {"correct", correct[i]}, {"total", total[i]}};
  }
  return j;
}

std::string McqReport::ToCsv() const {
  std::ostringstream out;
  out << "attribute,accuracy,correct,total\n";
  size_t all_correct = 0;
  for (Attribute a : kAllAttributes) {
    const size_t i = AttributeIndex(a);
    out << AttributeName(a) << ',' << FormatDouble(Accuracy(a)) << ',' << correct[i] << ','
        << total[i] << '\n';
    all_correct += correct[i];
  }
  out << "overall," << FormatDouble(overall) << ',' << all_correct << ',' << items << '\n';
  return out.str();
}

McqReport McqAccuracy(SequenceScorer& scorer, std::span<const McqItem> items, ScoreMode mode) {
  if (items.empty()) throw Error(ErrorCategory::kEmptyInput, "empty evaluation set");
  std::vector<ScoreRequest> requests;
  requests.reserve(items.size() * (1 + kMcqDistractors));
  for (const auto& it : items) {
    const std::string base = it.knowledge_id + "/" + AttributeName(it.attribute) + "/";
    requests.push_back({base + "0", it.correct});
    for (int d = 0; d < kMcqDistractors; ++d) {
      requests.push_back({base + std::to_string(d + 1), it.distractors[static_cast<size_t>(d)]});
    }
  }
  const auto values = ScoreOrThrow(scorer, requests, mode);
  McqReport report;
  report.mode = mode;
  report.scorer = scorer.Identity();
  report.items = items.size();
  size_t all_correct = 0;
  constexpr size_t kStride = 1 + kMcqDistractors;
  for (size_t i = 0; i < items.size(); ++i) {
    const double truth = values[kStride * i];
    bool best = true;
    for (size_t d = 1; d < kStride; ++d) best = best && truth > values[kStride * i + d];
    const size_t a = AttributeIndex(items[i].attribute);
    ++report.total[a];
    if (best) {
      ++report.correct[a];
      ++all_correct;
    }
  }
  report.overall = static_cast<double>(all_correct) / static_cast<double>(items.size());
  return report;
}

nlohmann::ordered_json StyleWinnerReport::ToJson() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = "multi_style_winners";
  j["scorer"] = scorer;
  j["tie_policy"] = "a tie goes to the earliest style";
  j["n"] = n;
  j["styles"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < styles.size(); ++i) {
    j["styles"].push_back({{"style", styles[i]}, {"wins", wins[i]}, {"proportion", proportions[i]}});
  }
  return j;
}

std::string StyleWinnerReport::ToCsv() const {
  std::ostringstream out;
  out << "style,wins,proportion\n";
  for (size_t i = 0; i < styles.size(); ++i) {
    out << styles[i] << ',' << wins[i] << ',' << FormatDouble(proportions[i]) << '\n';
  }
  return out.str();
}

StyleWinnerReport MultiStyleWinners(SequenceScorer& scorer, std::span<const MixtureItem> items,
                                    const std::vector<std::string>& styles, ScoreMode mode) {
  if (items.empty()) throw Error(ErrorCategory::kEmptyInput, "empty evaluation set");
  if (styles.empty()) throw Error(ErrorCategory::kArgument, "no styles");
  std::vector<ScoreRequest> requests;
  for (const auto& it : items) {
    if (it.statements.size() != styles.size()) {
      throw Error(ErrorCategory::kArgument,
                  "mixture item '" + it.knowledge_id + "' has " +
                      std::to_string(it.statements.size()) + " statements for " +
                      std::to_string(styles.size()) + " styles");
    }
    const std::string base = it.knowledge_id + "/" + AttributeName(it.attribute) + "/";
    for (size_t s = 0; s < styles.size(); ++s) {
      requests.push_back({base + std::to_string(s), it.statements[s]});
    }
  }
  const auto values = ScoreOrThrow(scorer, requests, mode);
  StyleWinnerReport report;
  report.styles = styles;
  report.wins.assign(styles.size(), 0);
  report.n = items.size();
  report.scorer = scorer.Identity();
  for (size_t i = 0; i < items.size(); ++i) {
    size_t best = 0;
    for (size_t s = 1; s < styles.size(); ++s) {
      if (values[i * styles.size() + s] > values[i * styles.size() + best]) best = s;
    }
    ++report.wins[best];
  }
  for (size_t w : report.wins) {
    report.proportions.push_back(static_cast<double>(w) / static_cast<double>(items.size()));
  }
  return report;
}

nlohmann::ordered_json ProjectionReport::ToJson() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["metric"] = "pca_projection";
  j["variances"] = variances;
  j["explained_variance_ratio"] = explained_variance_ratio;
  j["total_variance"] = total_variance;
  j["sign_convention"] = "largest-magnitude coordinate of each component is positive";
  j["points"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < coords.size(); ++i) {
    j["points"].push_back({{"label", labels[i]}, {"pc1", coords[i][0]}, {"pc2", coords[i][1]}});
  }
  return j;
}

std::string ProjectionReport::ToCsv() const {
  std::ostringstream out;
  out << "label,pc1,pc2\n";
  for (size_t i = 0; i < coords.size(); ++i) {
    out << labels[i] << ',' << FormatDouble(coords[i][0]) << ',' << FormatDouble(coords[i][1])
        << '\n';
  }
  return out.str();
}

ProjectionReport PcaProject(const std::vector<Eigen::VectorXd>& vectors,
                            const std::vector<std::string>& labels) {
  if (vectors.size() < 3) {
    throw Error(ErrorCategory::kArgument, "PCA needs at least 3 vectors, got " +
                                              std::to_string(vectors.size()));
  }
  if (labels.size() != vectors.size()) {
    throw Error(ErrorCategory::kArgument, "PCA labels and vectors differ in count");
  }
  const Eigen::Index dim = vectors[0].size();
  if (dim < 2) throw Error(ErrorCategory::kDegenerateRank, "PCA needs dimension >= 2");
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      throw Error(ErrorCategory::kArgument, "PCA vectors differ in dimensionality");
    }
  }
  const Eigen::Index n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = vectors[static_cast<size_t>(i)].transpose();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCategory::kInternal, "covariance eigendecomposition failed");
  }
  // Eigenvalues ascend.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double l1 = values(dim - 1);
  const double l2 = values(dim - 2);
  if (!(l1 > 0.0) || l2 <= kDegenerateRankTolerance * l1) {
    throw Error(ErrorCategory::kDegenerateRank,
                "centred representations have rank < 2 (eigenvalues " + FormatDouble(l1) +
                    ", " + FormatDouble(l2) + ")");
  }
  ProjectionReport report;
  report.labels = labels;
  report.components.resize(dim, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(dim - 1 - c);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < dim; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    }
    if (v(arg) < 0) v = -v;
    report.components.col(c) = v;
  }
  report.variances = {l1, l2};
  report.total_variance = cov.trace();
  report.explained_variance_ratio = {l1 / report.total_variance, l2 / report.total_variance};
  const Eigen::MatrixXd projected = x * report.components;
  for (Eigen::Index i = 0; i < n; ++i) report.coords.push_back({projected(i, 0), projected(i, 1)});
  return report;
}

}  // namespace conflictlab
