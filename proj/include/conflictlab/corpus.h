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

#ifndef CONFLICTLAB_CORPUS_H_
#define CONFLICTLAB_CORPUS_H_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "conflictlab/data_bundle.h"
#include "conflictlab/io.h"
#include "conflictlab/knowledge.h"
#include "conflictlab/templates.h"
#include "json.hpp"

namespace conflictlab {

inline constexpr int kTemplatesPerKnowledge = 5;
inline constexpr int kMcqDistractors = 3;
inline constexpr double kDefaultTestFraction = 0.2;
inline constexpr const char* kNeutralFeature = "general";

enum class ExperimentKind {
  kConflictPairwise,
  kSingleFeature,
  kConsistencyRatio,
  kCounterfactual,
  kMultiStyle,
};

const char* ExperimentKindName(ExperimentKind kind);
ExperimentKind ParseExperimentKind(const std::string& name);

enum class ExampleRole { kConflict, kSupport, kEvidenceTagged, kTestTagged };

const char* RoleName(ExampleRole role);
ExampleRole ParseRole(const std::string& name);

struct TrainingExample {
  std::string text;
  std::string knowledge_id;
  Side side = Side::kNeutral;
  ExampleRole role = ExampleRole::kConflict;
  std::string feature_id;
  std::string template_id;
};

struct CorpusManifest {
  int schema_version = kSchemaVersion;
  std::string corpus_id;
  ExperimentKind kind = ExperimentKind::kConflictPairwise;
  std::string feature_a;
  std::string feature_b;
  std::vector<std::string> styles;  // multi-style mixtures only
  int m = 0;
  int n = 0;
  double test_fraction = 0.0;
  size_t knowledge_count = 0;
  size_t evidence_count = 0;
  size_t test_count = 0;
  std::string source_placement = "beginning";
  std::map<std::string, uint64_t> seeds;
  std::map<std::string, size_t> role_counts;
  std::string pack_version;
  std::string pools_version;

  nlohmann::ordered_json ToJson() const;
  static CorpusManifest FromJson(const nlohmann::ordered_json& j);
};

struct Corpus {
  std::vector<TrainingExample> examples;
  CorpusManifest manifest;

  std::vector<std::string> Texts() const;
};

// Pairwise conflict corpus: per pair, five distinct feature_a templates
// render side_a and five distinct feature_b templates render side_b.
Corpus BuildConflictCorpus(std::span<const ConflictPair> pairs,
                           const TemplatePack& pack, const std::string& feature_a,
                           const std::string& feature_b,
                           const SourceSampler& sources, uint64_t seed);

// Five distinct same-feature templates per record, no conflicts.
Corpus BuildSingleFeatureCorpus(const KnowledgeSet& ks, const TemplatePack& pack,
                                const std::string& feature,
                                const SourceSampler& sources, uint64_t seed);

// Per evidence pair: one tagged-A biography of side_a, one tagged-B biography
// of side_b, m neutral biographies of side_a and n of side_b (all m + n
// neutral templates distinct). Per test pair: the two tagged biographies.
Corpus BuildConsistencyCorpus(std::span<const ConflictPair> evidence,
                              std::span<const ConflictPair> test,
                              const TemplatePack& pack,
                              const std::string& feature_a,
                              const std::string& feature_b, int m, int n,
                              const SourceSampler& sources, uint64_t seed,
                              SourcePlacement placement = SourcePlacement::kBeginning,
                              const std::string& neutral_feature = kNeutralFeature);

// One conflict pair per record; pair i is seeded by DeriveSeed(seed, i).
std::vector<ConflictPair> MakeConflicts(const AttributePools& pools,
                                        const KnowledgeSet& ks, uint64_t seed);

struct StyleMixture {
  std::string name;
  // variants[i] is described only in styles[i]; variants conflict pairwise.
  std::vector<KnowledgeRecord> variants;
};

std::vector<StyleMixture> MakeStyleMixtures(const AttributePools& pools,
                                            const KnowledgeSet& ks,
                                            size_t num_styles, uint64_t seed);

// Five distinct templates of styles[i] per variant i.
Corpus BuildMultiStyleCorpus(std::span<const StyleMixture> mixtures,
                             const TemplatePack& pack,
                             const std::vector<std::string>& styles,
                             uint64_t seed);

enum class StatementStyle { kPlain, kNovel };

const char* StatementStyleName(StatementStyle style);
StatementStyle ParseStatementStyle(const std::string& name);

// Short probe sentence for one attribute value.
std::string RenderStatement(Attribute attribute, const std::string& name,
                            const std::string& value, StatementStyle style);

struct StatementPair {
  Attribute attribute = Attribute::kBirthDate;
  std::string s_a;
  std::string s_b;
  std::string knowledge_id;

  std::string Id() const;  // "<knowledge_id>/<attribute>"
};

std::vector<StatementPair> BuildTestStatements(std::span<const ConflictPair> pairs,
                                               StatementStyle style);

struct McqItem {
  std::string correct;
  std::array<std::string, kMcqDistractors> distractors;
  Attribute attribute = Attribute::kBirthDate;
  std::string knowledge_id;
};

// One item per (record, attribute); distractor values are drawn from the pool
// (or the date grid) without replacement, excluding the true value.
std::vector<McqItem> BuildMcqSet(const KnowledgeSet& ks, const AttributePools& pools,
                                 uint64_t seed,
                                 StatementStyle style = StatementStyle::kPlain);

struct MixtureItem {
  std::string knowledge_id;
  Attribute attribute = Attribute::kBirthDate;
  std::vector<std::string> statements;  // statements[i] states variant i
};

std::vector<MixtureItem> BuildMixtureStatements(std::span<const StyleMixture> mixtures,
                                                StatementStyle style);

// Serialization. Corpus and statement files are JSONL with a schema_version
// on every row; the manifest is one JSON document.
nlohmann::ordered_json ExampleToJson(const TrainingExample& e);
TrainingExample ExampleFromJson(const nlohmann::ordered_json& j);
std::string SerializeCorpus(const std::vector<TrainingExample>& examples);
void WriteCorpus(const std::string& path, const std::vector<TrainingExample>& examples);
std::vector<TrainingExample> ReadCorpus(const std::string& path);

void WriteStatements(const std::string& path, const std::vector<StatementPair>& pairs);
std::vector<StatementPair> ReadStatements(const std::string& path);
void WriteMcqItems(const std::string& path, const std::vector<McqItem>& items);
std::vector<McqItem> ReadMcqItems(const std::string& path);
void WriteMixtureItems(const std::string& path, const std::vector<MixtureItem>& items);
std::vector<MixtureItem> ReadMixtureItems(const std::string& path);

}  // namespace conflictlab

#endif  // CONFLICTLAB_CORPUS_H_
