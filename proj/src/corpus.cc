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

#include "conflictlab/corpus.h"

#include <algorithm>
#include <set>

#include "conflictlab/digest.h"
#include "conflictlab/error.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"

namespace conflictlab {
namespace {

std::vector<const Template*> RequireTemplates(const TemplatePack& pack,
                                              const std::string& feature,
                                              size_t needed) {
  if (!pack.has_feature(feature)) {
    throw Error(ErrorCategory::kArgument, "pack has no feature '" + feature + "'");
  }
  auto templates = pack.ForFeature(feature);
  if (templates.size() < needed) {
    throw Error(ErrorCategory::kCapacity,
                "feature '" + feature + "' has " + std::to_string(templates.size()) +
                    " templates, need " + std::to_string(needed));
  }
  return templates;
}

// `count` distinct templates drawn from `templates`.
std::vector<const Template*> PickTemplates(const std::vector<const Template*>& templates,
                                           size_t count, Rng& rng) {
  std::vector<const Template*> out;
  for (size_t i : rng.SampleWithoutReplacement(templates.size(), count)) {
    out.push_back(templates[i]);
  }
  return out;
}

TrainingExample ToExample(Biography bio, ExampleRole role) {
  TrainingExample e;
  e.text = std::move(bio.text);
  e.knowledge_id = std::move(bio.knowledge_id);
  e.side = bio.side;
  e.role = role;
  e.feature_id = std::move(bio.feature_id);
  e.template_id = std::move(bio.template_id);
  return e;
}

void Finish(Corpus& corpus, uint64_t seed, const std::string& id_params) {
  Rng order(DeriveSeed(seed, "order"));
  order.Shuffle(corpus.examples);
  auto& m = corpus.manifest;
  m.seeds["corpus"] = seed;
  m.role_counts.clear();
  for (ExampleRole r : {ExampleRole::kConflict, ExampleRole::kSupport,
                        ExampleRole::kEvidenceTagged, ExampleRole::kTestTagged}) {
    m.role_counts[RoleName(r)] = 0;
  }
  for (const auto& e : corpus.examples) ++m.role_counts[RoleName(e.role)];
  Fnv1a h;
  h.Update(id_params);
  h.Update(std::to_string(seed));
  m.corpus_id = std::string(ExperimentKindName(m.kind)) + "-" + h.Hex().substr(0, 10);
}

void RequireStudiedFeature(const TemplatePack& pack, const std::string& feature) {
  if (pack.feature(feature).kind == FeatureKind::kNeutral) {
    throw Error(ErrorCategory::kArgument,
                "feature '" + feature + "' is neutral; tagged biographies need a "
                "style, spelling or synthetic-source feature");
  }
}

}  // namespace

const char* ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConflictPairwise: return "conflict_pairwise";
    case ExperimentKind::kSingleFeature: return "single_feature";
    case ExperimentKind::kConsistencyRatio: return "consistency_ratio";
    case ExperimentKind::kCounterfactual: return "counterfactual";
    case ExperimentKind::kMultiStyle: return "multi_style";
  }
  return "conflict_pairwise";
}

ExperimentKind ParseExperimentKind(const std::string& name) {
  for (ExperimentKind k : {ExperimentKind::kConflictPairwise, ExperimentKind::kSingleFeature,
                           ExperimentKind::kConsistencyRatio, ExperimentKind::kCounterfactual,
                           ExperimentKind::kMultiStyle}) {
    if (name == ExperimentKindName(k)) return k;
  }
  throw Error(ErrorCategory::kValidation, "unknown experiment kind '" + name + "'");
}

const char* RoleName(ExampleRole role) {
  switch (role) {
    case ExampleRole::kConflict: return "conflict";
    case ExampleRole::kSupport: return "support";
    case ExampleRole::kEvidenceTagged: return "evidence_tagged";
    case ExampleRole::kTestTagged: return "test_tagged";
  }
  return "conflict";
}

ExampleRole ParseRole(const std::string& name) {
  for (ExampleRole r : {ExampleRole::kConflict, ExampleRole::kSupport,
                        ExampleRole::kEvidenceTagged, ExampleRole::kTestTagged}) {
    if (name == RoleName(r)) return r;
  }
  throw Error(ErrorCategory::kValidation, "unknown example role '" + name + "'");
}

nlohmann::ordered_json CorpusManifest::ToJson() const {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["corpus_id"] = corpus_id;
  j["kind"] = ExperimentKindName(kind);
  j["feature_a"] = feature_a;
  j["feature_b"] = feature_b;
  j["styles"] = styles;
  j["m"] = m;
  j["n"] = n;
  j["consistency_ratio"] = std::to_string(m) + ":" + std::to_string(n);
  j["test_fraction"] = test_fraction;
  j["knowledge_count"] = knowledge_count;
  j["evidence_count"] = evidence_count;
  j["test_count"] = test_count;
  j["source_placement"] = source_placement;
  j["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : seeds) j["seeds"][k] = v;
  j["role_counts"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : role_counts) j["role_counts"][k] = v;
  j["pack_version"] = pack_version;
  j["pools_version"] = pools_version;
  return j;
}

CorpusManifest CorpusManifest::FromJson(const nlohmann::ordered_json& j) {
  CheckSchemaVersion(j, "corpus manifest");
  try {
    CorpusManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.corpus_id = j.at("corpus_id").get<std::string>();
    m.kind = ParseExperimentKind(j.at("kind").get<std::string>());
    m.feature_a = j.at("feature_a").get<std::string>();
    m.feature_b = j.at("feature_b").get<std::string>();
    m.styles = j.at("styles").get<std::vector<std::string>>();
    m.m = j.at("m").get<int>();
    m.n = j.at("n").get<int>();
    m.test_fraction = j.at("test_fraction").get<double>();
    m.knowledge_count = j.at("knowledge_count").get<size_t>();
    m.evidence_count = j.at("evidence_count").get<size_t>();
    m.test_count = j.at("test_count").get<size_t>();
    m.source_placement = j.at("source_placement").get<std::string>();
    for (const auto& [k, v] : j.at("seeds").items()) m.seeds[k] = v.get<uint64_t>();
    for (const auto& [k, v] : j.at("role_counts").items()) m.role_counts[k] = v.get<size_t>();
    m.pack_version = j.at("pack_version").get<std::string>();
    m.pools_version = j.at("pools_version").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, std::string("corpus manifest: ") + e.what());
  }
}

std::vector<std::string> Corpus::Texts() const {
  std::vector<std::string> texts;
  texts.reserve(examples.size());
  for (const auto& e : examples) texts.push_back(e.text);
  return texts;
}

Corpus BuildConflictCorpus(std::span<const ConflictPair> pairs,
                           const TemplatePack& pack, const std::string& feature_a,
                           const std::string& feature_b,
                           const SourceSampler& sources, uint64_t seed) {
  const auto ta = RequireTemplates(pack, feature_a, kTemplatesPerKnowledge);
  const auto tb = RequireTemplates(pack, feature_b, kTemplatesPerKnowledge);
  Corpus corpus;
  corpus.manifest.kind = ExperimentKind::kConflictPairwise;
  corpus.manifest.feature_a = feature_a;
  corpus.manifest.feature_b = feature_b;
  corpus.manifest.knowledge_count = pairs.size();
  corpus.manifest.pack_version = pack.version;
  corpus.examples.reserve(pairs.size() * 2 * kTemplatesPerKnowledge);
  for (size_t i = 0; i < pairs.size(); ++i) {
    const ConflictPair& p = pairs[i];
    if (p.side_a.name != p.side_b.name) {
      throw Error(ErrorCategory::kArgument, "conflict pair with different names");
    }
    Rng rng(DeriveSeed(seed, "knowledge", i));
    for (const Template* t : PickTemplates(ta, kTemplatesPerKnowledge, rng)) {
      corpus.examples.push_back(ToExample(
          Render(*t, p.side_a, sources.Draw(*t, Side::kA, rng)), ExampleRole::kConflict));
      corpus.examples.back().side = Side::kA;
    }
    for (const Template* t : PickTemplates(tb, kTemplatesPerKnowledge, rng)) {
      corpus.examples.push_back(ToExample(
          Render(*t, p.side_b, sources.Draw(*t, Side::kB, rng)), ExampleRole::kConflict));
      corpus.examples.back().side = Side::kB;
    }
  }
  Finish(corpus, seed, "conflict|" + feature_a + "|" + feature_b + "|" +
                           std::to_string(pairs.size()));
  return corpus;
}

Corpus BuildSingleFeatureCorpus(const KnowledgeSet& ks, const TemplatePack& pack,
                                const std::string& feature,
                                const SourceSampler& sources, uint64_t seed) {
  const auto templates = RequireTemplates(pack, feature, kTemplatesPerKnowledge);
  Corpus corpus;
  corpus.manifest.kind = ExperimentKind::kSingleFeature;
  corpus.manifest.feature_a = feature;
  corpus.manifest.knowledge_count = ks.records.size();
  corpus.manifest.pack_version = pack.version;
  corpus.manifest.seeds["knowledge"] = ks.seed;
  for (size_t i = 0; i < ks.records.size(); ++i) {
    Rng rng(DeriveSeed(seed, "knowledge", i));
    const Side side = pack.feature(feature).kind == FeatureKind::kSyntheticSource
                          ? Side::kA
                          : Side::kNeutral;
    for (const Template* t : PickTemplates(templates, kTemplatesPerKnowledge, rng)) {
      corpus.examples.push_back(ToExample(
          Render(*t, ks.records[i], sources.Draw(*t, side, rng)), ExampleRole::kSupport));
    }
  }
  Finish(corpus, seed, "single|" + feature + "|" + std::to_string(ks.records.size()));
  return corpus;
}

Corpus BuildConsistencyCorpus(std::span<const ConflictPair> evidence,
                              std::span<const ConflictPair> test,
                              const TemplatePack& pack,
                              const std::string& feature_a,
                              const std::string& feature_b, int m, int n,
                              const SourceSampler& sources, uint64_t seed,
                              SourcePlacement placement,
                              const std::string& neutral_feature) {
  if (m < 0 || n < 0) {
    throw Error(ErrorCategory::kArgument, "support-set sizes must be non-negative");
  }
  RequireStudiedFeature(pack, feature_a);
  RequireStudiedFeature(pack, feature_b);
  const auto ta = RequireTemplates(pack, feature_a, 1);
  const auto tb = RequireTemplates(pack, feature_b, 1);
  const auto neutral =
      RequireTemplates(pack, neutral_feature, static_cast<size_t>(m + n));

  Corpus corpus;
  auto& man = corpus.manifest;
  man.kind = ExperimentKind::kConsistencyRatio;
  man.feature_a = feature_a;
  man.feature_b = feature_b;
  man.m = m;
  man.n = n;
  man.knowledge_count = evidence.size() + test.size();
  man.evidence_count = evidence.size();
  man.test_count = test.size();
  man.source_placement = placement == SourcePlacement::kBeginning ? "beginning" : "end";
  man.pack_version = pack.version;

  auto tagged = [&](const ConflictPair& p, Rng& rng, ExampleRole role) {
    const Template* t_a = ta[rng.UniformInt(ta.size())];
    corpus.examples.push_back(
        ToExample(Render(*t_a, p.side_a, sources.Draw(*t_a, Side::kA, rng, placement)), role));
    const Template* t_b = tb[rng.UniformInt(tb.size())];
    corpus.examples.push_back(
        ToExample(Render(*t_b, p.side_b, sources.Draw(*t_b, Side::kB, rng, placement)), role));
  };

  for (size_t i = 0; i < evidence.size(); ++i) {
    Rng rng(DeriveSeed(seed, "evidence", i));
    tagged(evidence[i], rng, ExampleRole::kEvidenceTagged);
    const auto support = PickTemplates(neutral, static_cast<size_t>(m + n), rng);
    for (int j = 0; j < m + n; ++j) {
      const bool for_a = j < m;
      Biography bio = Render(*support[static_cast<size_t>(j)],
                             for_a ? evidence[i].side_a : evidence[i].side_b, SourceAux{});
      bio.side = for_a ? Side::kA : Side::kB;
      corpus.examples.push_back(ToExample(std::move(bio), ExampleRole::kSupport));
    }
  }
  for (size_t i = 0; i < test.size(); ++i) {
    Rng rng(DeriveSeed(seed, "test", i));
    tagged(test[i], rng, ExampleRole::kTestTagged);
  }
  Finish(corpus, seed,
         "consistency|" + feature_a + "|" + feature_b + "|" + std::to_string(m) + ":" +
             std::to_string(n) + "|" + std::to_string(evidence.size()) + "|" +
             std::to_string(test.size()) + "|" + man.source_placement);
  return corpus;
}

std::vector<ConflictPair> MakeConflicts(const AttributePools& pools,
                                        const KnowledgeSet& ks, uint64_t seed) {
  std::vector<ConflictPair> pairs;
  pairs.reserve(ks.records.size());
  for (size_t i = 0; i < ks.records.size(); ++i) {
    pairs.push_back(MakeConflict(pools, ks.records[i], DeriveSeed(seed, "pair", i)));
  }
  return pairs;
}

std::vector<StyleMixture> MakeStyleMixtures(const AttributePools& pools,
                                            const KnowledgeSet& ks,
                                            size_t num_styles, uint64_t seed) {
  std::vector<StyleMixture> out;
  for (size_t i = 0; i < ks.records.size(); ++i) {
    out.push_back({ks.records[i].name,
                   MakeMutualConflicts(pools, ks.records[i], num_styles,
                                       DeriveSeed(seed, "mixture", i))});
  }
  return out;
}

Corpus BuildMultiStyleCorpus(std::span<const StyleMixture> mixtures,
                             const TemplatePack& pack,
                             const std::vector<std::string>& styles,
                             uint64_t seed) {
  if (styles.size() < 2) {
    throw Error(ErrorCategory::kArgument, "a style mixture needs at least two styles");
  }
  std::vector<std::vector<const Template*>> per_style;
  for (const auto& s : styles) {
    per_style.push_back(RequireTemplates(pack, s, kTemplatesPerKnowledge));
  }
  Corpus corpus;
  corpus.manifest.kind = ExperimentKind::kMultiStyle;
  corpus.manifest.styles = styles;
  corpus.manifest.knowledge_count = mixtures.size();
  corpus.manifest.pack_version = pack.version;
  const SourceSampler no_sources({}, {});
  for (size_t i = 0; i < mixtures.size(); ++i) {
    const StyleMixture& mix = mixtures[i];
    if (mix.variants.size() != styles.size()) {
      throw Error(ErrorCategory::kArgument,
                  "mixture '" + mix.name + "' has " + std::to_string(mix.variants.size()) +
                      " variants for " + std::to_string(styles.size()) + " styles");
    }
    Rng rng(DeriveSeed(seed, "knowledge", i));
    for (size_t s = 0; s < styles.size(); ++s) {
      for (const Template* t : PickTemplates(per_style[s], kTemplatesPerKnowledge, rng)) {
        corpus.examples.push_back(
            ToExample(Render(*t, mix.variants[s], SourceAux{}), ExampleRole::kConflict));
      }
    }
  }
  std::string params = "multi";
  for (const auto& s : styles) params += "|" + s;
  Finish(corpus, seed, params + "|" + std::to_string(mixtures.size()));
  return corpus;
}

const char* StatementStyleName(StatementStyle style) {
  return style == StatementStyle::kPlain ? "plain" : "novel";
}

StatementStyle ParseStatementStyle(const std::string& name) {
  if (name == "plain") return StatementStyle::kPlain;
  if (name == "novel") return StatementStyle::kNovel;
  throw Error(ErrorCategory::kValidation, "unknown statement style '" + name + "'");
}

std::string RenderStatement(Attribute attribute, const std::string& name,
                            const std::string& value, StatementStyle style) {
  const bool plain = style == StatementStyle::kPlain;
  switch (attribute) {
    case Attribute::kBirthDate:
      return plain ? name + "'s birthday is " + value + "."
                   : name + "'s birthday is on the unforgettable day of " + value + ".";
    case Attribute::kBirthPlace:
      return plain ? name + " was born at " + value + "."
                   : name + " was born under the bright sky of " + value + ".";
    case Attribute::kUniversity:
      return plain ? name + " received education at the " + value + "."
                   : name + " embarked on a journey of knowledge at the esteemed " + value + ".";
    case Attribute::kMajor:
      return plain ? name + " focused on " + value + " during her university study."
                   : name + " went to university and hone her skills in " + value + ".";
    case Attribute::kCompany:
      return plain ? name + " worked for " + value + "."
                   : name + " contributes her expertise to " + value + ".";
  }
  return "";
}

std::string StatementPair::Id() const {
  return knowledge_id + "/" + AttributeName(attribute);
}

std::vector<StatementPair> BuildTestStatements(std::span<const ConflictPair> pairs,
                                               StatementStyle style) {
  if (pairs.empty()) throw Error(ErrorCategory::kEmptyInput, "no conflict pairs");
  std::vector<StatementPair> out;
  out.reserve(pairs.size() * kAllAttributes.size());
  for (const auto& p : pairs) {
    for (Attribute a : kAllAttributes) {
      out.push_back({a, RenderStatement(a, p.side_a.name, p.side_a.Value(a), style),
                     RenderStatement(a, p.side_b.name, p.side_b.Value(a), style),
                     p.side_a.name});
    }
  }
  return out;
}

std::vector<McqItem> BuildMcqSet(const KnowledgeSet& ks, const AttributePools& pools,
                                 uint64_t seed, StatementStyle style) {
  std::vector<McqItem> items;
  items.reserve(ks.records.size() * kAllAttributes.size());
  for (size_t i = 0; i < ks.records.size(); ++i) {
    const KnowledgeRecord& k = ks.records[i];
    Rng rng(DeriveSeed(seed, "mcq", i));
    for (Attribute a : kAllAttributes) {
      McqItem item;
      item.attribute = a;
      item.knowledge_id = k.name;
      const std::string truth = k.Value(a);
      item.correct = RenderStatement(a, k.name, truth, style);
      std::vector<std::string> values;
      if (a == Attribute::kBirthDate) {
        std::set<std::string> used = {truth};
        while (values.size() < static_cast<size_t>(kMcqDistractors)) {
          Date d;
          d.year = kFirstBirthYear + static_cast<int>(rng.UniformInt(kBirthYearSpan));
          d.month = 1 + static_cast<int>(rng.UniformInt(12));
          d.day = 1 + static_cast<int>(rng.UniformInt(kMaxBirthDay));
          if (used.insert(d.ToString()).second) values.push_back(d.ToString());
        }
      } else {
        std::vector<std::string> others;
        for (const auto& v : pools.Pool(a)) {
          if (v != truth) others.push_back(v);
        }
        for (size_t j : rng.SampleWithoutReplacement(others.size(), kMcqDistractors)) {
          values.push_back(others[j]);
        }
      }
      for (int d = 0; d < kMcqDistractors; ++d) {
        item.distractors[static_cast<size_t>(d)] =
            RenderStatement(a, k.name, values[static_cast<size_t>(d)], style);
      }
      items.push_back(std::move(item));
    }
  }
  return items;
}

std::vector<MixtureItem> BuildMixtureStatements(std::span<const StyleMixture> mixtures,
                                                StatementStyle style) {
  std::vector<MixtureItem> out;
  for (const auto& mix : mixtures) {
    for (Attribute a : kAllAttributes) {
      MixtureItem item;
      item.knowledge_id = mix.name;
      item.attribute = a;
      for (const auto& v : mix.variants) {
        item.statements.push_back(RenderStatement(a, mix.name, v.Value(a), style));
      }
      out.push_back(std::move(item));
    }
  }
  return out;
}

nlohmann::ordered_json ExampleToJson(const TrainingExample& e) {
  nlohmann::ordered_json j;
  j["text"] = e.text;
  j["knowledge_id"] = e.knowledge_id;
  j["side"] = SideName(e.side);
  j["role"] = RoleName(e.role);
  j["feature_id"] = e.feature_id;
  j["template_id"] = e.template_id;
  j["schema_version"] = kSchemaVersion;
  return j;
}

TrainingExample ExampleFromJson(const nlohmann::ordered_json& j) {
  CheckSchemaVersion(j, "corpus row");
  try {
    TrainingExample e;
    e.text = j.at("text").get<std::string>();
    e.knowledge_id = j.at("knowledge_id").get<std::string>();
    e.side = ParseSide(j.at("side").get<std::string>());
    e.role = ParseRole(j.at("role").get<std::string>());
    e.feature_id = j.at("feature_id").get<std::string>();
    e.template_id = j.at("template_id").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCategory::kValidation, std::string("corpus row: ") + ex.what());
  }
}

std::string SerializeCorpus(const std::vector<TrainingExample>& examples) {
  std::string out;
  for (const auto& e : examples) {
    out += ExampleToJson(e).dump();
    out += '\n';
  }
  return out;
}

void WriteCorpus(const std::string& path, const std::vector<TrainingExample>& examples) {
  WriteFile(path, SerializeCorpus(examples));
}

std::vector<TrainingExample> ReadCorpus(const std::string& path) {
  std::vector<TrainingExample> out;
  for (const auto& row : ReadJsonl(path)) out.push_back(ExampleFromJson(row));
  return out;
}

void WriteStatements(const std::string& path, const std::vector<StatementPair>& pairs) {
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["knowledge_id"] = p.knowledge_id;
    j["attribute"] = AttributeName(p.attribute);
    j["s_a"] = p.s_a;
    j["s_b"] = p.s_b;
    j["schema_version"] = kSchemaVersion;
    rows.push_back(std::move(j));
  }
  WriteJsonl(path, rows);
}

std::vector<StatementPair> ReadStatements(const std::string& path) {
  std::vector<StatementPair> out;
  for (const auto& j : ReadJsonl(path)) {
    CheckSchemaVersion(j, "statement row");
    try {
      out.push_back({ParseAttribute(j.at("attribute").get<std::string>()),
                     j.at("s_a").get<std::string>(), j.at("s_b").get<std::string>(),
                     j.at("knowledge_id").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::kValidation, path + ": " + e.what());
    }
  }
  return out;
}

void WriteMcqItems(const std::string& path, const std::vector<McqItem>& items) {
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& it : items) {
    nlohmann::ordered_json j;
    j["knowledge_id"] = it.knowledge_id;
    j["attribute"] = AttributeName(it.attribute);
    j["correct"] = it.correct;
    j["distractors"] = it.distractors;
    j["schema_version"] = kSchemaVersion;
    rows.push_back(std::move(j));
  }
  WriteJsonl(path, rows);
}

std::vector<McqItem> ReadMcqItems(const std::string& path) {
  std::vector<McqItem> out;
  for (const auto& j : ReadJsonl(path)) {
    CheckSchemaVersion(j, "mcq row");
    try {
      McqItem it;
      it.knowledge_id = j.at("knowledge_id").get<std::string>();
      it.attribute = ParseAttribute(j.at("attribute").get<std::string>());
      it.correct = j.at("correct").get<std::string>();
      const auto d = j.at("distractors").get<std::vector<std::string>>();
      if (d.size() != kMcqDistractors) {
        throw Error(ErrorCategory::kValidation, path + ": item needs exactly 3 distractors");
      }
      std::copy(d.begin(), d.end(), it.distractors.begin());
      out.push_back(std::move(it));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::kValidation, path + ": " + e.what());
    }
  }
  return out;
}

void WriteMixtureItems(const std::string& path, const std::vector<MixtureItem>& items) {
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& it : items) {
    nlohmann::ordered_json j;
    j["knowledge_id"] = it.knowledge_id;
    j["attribute"] = AttributeName(it.attribute);
    j["statements"] = it.statements;
    j["schema_version"] = kSchemaVersion;
    rows.push_back(std::move(j));
  }
  WriteJsonl(path, rows);
}

std::vector<MixtureItem> ReadMixtureItems(const std::string& path) {
  std::vector<MixtureItem> out;
  for (const auto& j : ReadJsonl(path)) {
    CheckSchemaVersion(j, "mixture row");
    try {
      out.push_back({j.at("knowledge_id").get<std::string>(),
                     ParseAttribute(j.at("attribute").get<std::string>()),
                     j.at("statements").get<std::vector<std::string>>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::kValidation, path + ": " + e.what());
    }
  }
  return out;
}

}  // namespace conflictlab
