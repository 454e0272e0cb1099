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

#include "conflictlab/experiment.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

#include "conflictlab/data_bundle.h"
#include "conflictlab/digest.h"
#include "conflictlab/error.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"
#include "conflictlab/scorer.h"
#include "conflictlab/tokenizer.h"

namespace conflictlab {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void Invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCategory::kValidation, "recipe field '" + field + "': " + what);
}

const char* PlacementName(SourcePlacement p) {
  return p == SourcePlacement::kBeginning ? "beginning" : "end";
}

SourcePlacement ParsePlacement(const std::string& name) {
  if (name == "beginning") return SourcePlacement::kBeginning;
  if (name == "end") return SourcePlacement::kEnd;
  Invalid("placement", "expected beginning or end, got '" + name + "'");
}

std::string FormatDouble(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

MetricMap Prefixed(const std::string& prefix, const MetricMap& in) {
  if (prefix.empty()) return in;
  MetricMap out;
  for (const auto& [k, v] : in) out[prefix + "." + k] = v;
  return out;
}

void Merge(MetricMap& into, const MetricMap& from) {
  for (const auto& [k, v] : from) into[k] = v;
}

// Per-epoch and final evaluation against any scorer. When `final_dir` is
// non-empty the evaluator also writes its reports there.
using Evaluator = std::function<MetricMap(SequenceScorer&, const std::string& final_dir)>;

struct RunContext {
  const ExperimentRecipe& recipe;
  const DataBundle& bundle;
  uint64_t seed;
  ProgressFn progress;
  std::vector<std::string>& written;
  std::vector<std::pair<std::string, std::string>>& digests;
  bool generate_only = false;

  void Note(const std::string& msg) const {
    if (progress) progress("[seed " + std::to_string(seed) + "] " + msg);
  }

  void Emit(const std::string& path, const std::string& contents) const {
    WriteFile(path, contents);
    written.push_back(path);
  }

  void EmitJson(const std::string& path, const Json& doc) const {
    WriteJson(path, doc);
    written.push_back(path);
  }

  // Resolved config plus tool version; every output directory gets these.
  void EmitProvenance(const std::string& dir) const {
    Json cfg = recipe.ToJson();
    cfg["seed"] = seed;
    EmitJson(JoinPath(dir, "config.json"), cfg);
    Emit(JoinPath(dir, "VERSION"), std::string(ToolVersion()) + "\n");
  }
};

template <typename F>
auto RunStage(const std::string& stage, uint64_t seed, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.category(),
                "stage '" + stage + "' (seed " + std::to_string(seed) + "): " + e.what());
  }
}

std::string PlotCsv(const MetricTable& table) {
  std::set<std::string> metrics;
  for (const auto& row : table.rows) {
    for (const auto& [k, v] : row) metrics.insert(k);
  }
  std::string out = "series,x,y\n";
  for (const auto& metric : metrics) {
    for (size_t i = 0; i < table.rows.size(); ++i) {
      auto it = table.rows[i].find(metric);
      if (it == table.rows[i].end()) continue;
      out += metric + "," + std::to_string(table.epochs[i]) + "," + FormatDouble(it->second) +
             "\n";
    }
  }
  return out;
}

struct SubRun {
  MetricMap final_metrics;
  MetricTable curve;
  Tokenizer tokenizer;
  std::unique_ptr<LmModel> model;  // null for external scorers
};

// Writes the corpus, trains a fresh model on it (internal scorer) and runs
// `evaluate` per epoch and once at the end. External scorers skip training.
SubRun TrainAndEvaluate(const RunContext& c, const std::string& dir, const Corpus& corpus,
                        const std::vector<std::string>& closure_texts,
                        const Evaluator& evaluate) {
  const auto& r = c.recipe;
  MakeDirs(dir);
  c.EmitProvenance(dir);
  c.EmitJson(JoinPath(dir, "manifest.json"), corpus.manifest.ToJson());
  const std::string serialized = SerializeCorpus(corpus.examples);
  c.Emit(JoinPath(dir, "corpus.jsonl"), serialized);
  Fnv1a digest;
  digest.Update(serialized);
  c.digests.emplace_back(JoinPath(dir, "corpus.jsonl"), digest.Hex());

  SubRun run;
  if (c.generate_only) return run;
  if (r.scorer != "internal") {
    ExternalScorer scorer(r.scorer);
    run.final_metrics = RunStage("evaluate", c.seed, [&] { return evaluate(scorer, dir); });
    return run;
  }

  std::vector<std::vector<TokenId>> docs;
  LmConfig config = r.model;
  RunStage("tokenize", c.seed, [&] {
    const std::vector<std::vector<std::string>> corpora = {corpus.Texts(), closure_texts};
    run.tokenizer = Tokenizer::Build(std::span<const std::vector<std::string>>(corpora));
    config.vocab_size = static_cast<int>(run.tokenizer.size());
    config.Validate();
    const auto texts = corpus.Texts();
    docs = EncodeDocuments(run.tokenizer, texts, config.max_context);
    return 0;
  });
  c.EmitJson(JoinPath(dir, "tokenizer.json"), run.tokenizer.ToJson());

  run.model = std::make_unique<LmModel>(config);
  run.model->InitRandom(DeriveSeed(c.seed, "init"));
  TrainConfig tc = r.train;
  tc.seed = DeriveSeed(c.seed, "train");

  std::vector<EvalHook> hooks;
  if (r.eval_every_epoch) {
    hooks.push_back({"eval", [&](const LmModel& m, int) {
                       InProcessScorer scorer(m, run.tokenizer);
                       return evaluate(scorer, "");
                     }});
  }
  TrainOptions options;
  options.on_epoch_end = [&](int epoch, double loss) {
    c.Note(dir + ": epoch " + std::to_string(epoch) + "/" + std::to_string(tc.epochs) +
           " loss " + FormatDouble(loss));
  };
  c.Note(dir + ": training on " + std::to_string(docs.size()) + " documents, " +
         std::to_string(run.model->parameter_count()) + " parameters");
  HookedTrainResult trained = RunStage(
      "train", c.seed, [&] { return TrainWithEvalHooks(*run.model, docs, tc, hooks, options); });
  c.Emit(JoinPath(dir, "train_log.csv"), trained.log.ToCsv());
  if (r.eval_every_epoch) {
    c.Emit(JoinPath(dir, "epoch_metrics.csv"), trained.metrics.ToCsv());
    c.Emit(JoinPath(dir, "plot_dynamics.csv"), PlotCsv(trained.metrics));
  }
  run.curve = std::move(trained.metrics);

  InProcessScorer scorer(*run.model, run.tokenizer);
  run.final_metrics = RunStage("evaluate", c.seed, [&] { return evaluate(scorer, dir); });
  run.final_metrics["train.final_loss"] = trained.log.epoch_mean_loss.back();
  run.final_metrics["train.first_loss"] = trained.log.epoch_mean_loss.front();
  run.final_metrics["train.wall_seconds"] = trained.log.wall_seconds;

  if (r.save_checkpoint) {
    Json meta;
    meta["seed"] = c.seed;
    meta["epoch"] = tc.epochs;
    meta["train"] = tc.ToJson();
    meta["corpus_id"] = corpus.manifest.corpus_id;
    const std::string ckpt = JoinPath(dir, "checkpoint");
    SaveCheckpoint(ckpt, *run.model, run.tokenizer, meta);
    c.written.push_back(ckpt);
  }
  return run;
}

MetricMap PreferenceMetrics(const PreferenceReport& report) {
  MetricMap m;
  m["pref.average"] = report.average;
  for (Attribute a : kAllAttributes) m[std::string("pref.") + AttributeName(a)] = report.Score(a);
  m["pref.ties"] = static_cast<double>(report.tie_count());
  m["pref.n"] = static_cast<double>(report.n());
  return m;
}

// Preference over named statement sets ("evidence", "test", ...).
Evaluator PreferenceEvaluator(const RunContext& c,
                              std::vector<std::pair<std::string, std::vector<StatementPair>>> sets) {
  return [&c, sets = std::move(sets)](SequenceScorer& scorer, const std::string& dir) {
    MetricMap out;
    for (const auto& [name, pairs] : sets) {
      const PreferenceReport report = PreferenceScore(scorer, pairs, c.recipe.score_mode);
      Merge(out, Prefixed(name, PreferenceMetrics(report)));
      if (!dir.empty()) {
        c.EmitJson(JoinPath(dir, "preference_" + name + ".json"), report.ToJson());
        c.Emit(JoinPath(dir, "preference_" + name + ".csv"), report.ToCsv());
      }
    }
    return out;
  };
}

std::vector<std::string> StatementTexts(const std::vector<StatementPair>& pairs) {
  std::vector<std::string> out;
  for (const auto& p : pairs) {
    out.push_back(p.s_a);
    out.push_back(p.s_b);
  }
  return out;
}

SourceSampler Sources(const DataBundle& b) { return SourceSampler(b); }

// ---- kinds ----

MetricMap RunConflictPairwise(const RunContext& c, const std::string& dir) {
  const auto& r = c.recipe;
  const auto& b = c.bundle;
  const KnowledgeSet ks = SampleKnowledgeSet(b.pools, r.knowledge_count, DeriveSeed(c.seed, "knowledge"));
  const auto pairs = MakeConflicts(b.pools, ks, DeriveSeed(c.seed, "conflict"));
  const Corpus corpus = BuildConflictCorpus(pairs, b.pack, r.feature_a, r.feature_b, Sources(b),
                                            DeriveSeed(c.seed, "corpus"));
  auto statements = BuildTestStatements(pairs, r.statement_style);
  MakeDirs(dir);
  WriteStatements(JoinPath(dir, "statements.jsonl"), statements);
  c.written.push_back(JoinPath(dir, "statements.jsonl"));
  const auto closure = StatementTexts(statements);
  SubRun run = TrainAndEvaluate(c, dir, corpus, closure,
                                PreferenceEvaluator(c, {{"test", std::move(statements)}}));
  return run.final_metrics;
}

MetricMap RunLearningSpeed(const RunContext& c, const std::string& dir) {
  const auto& r = c.recipe;
  const auto& b = c.bundle;
  const KnowledgeSet ks = SampleKnowledgeSet(b.pools, r.knowledge_count, DeriveSeed(c.seed, "knowledge"));
  const auto items = BuildMcqSet(ks, b.pools, DeriveSeed(c.seed, "mcq"), r.statement_style);
  std::vector<std::string> closure;
  for (const auto& item : items) {
    closure.push_back(item.correct);
    for (const auto& d : item.distractors) closure.push_back(d);
  }
  Evaluator evaluate = [&](SequenceScorer& scorer, const std::string& out) {
    const McqReport report = McqAccuracy(scorer, items, r.score_mode);
    if (!out.empty()) {
      c.EmitJson(JoinPath(out, "mcq.json"), report.ToJson());
      c.Emit(JoinPath(out, "mcq.csv"), report.ToCsv());
    }
    MetricMap m;
    m["mcq.overall"] = report.overall;
    for (Attribute a : kAllAttributes) m[std::string("mcq.") + AttributeName(a)] = report.Accuracy(a);
    return m;
  };
  MetricMap all;
  std::string curves = "series,x,y\n";
  for (const auto& feature : r.features) {
    const std::string sub = JoinPath(dir, feature);
    const Corpus corpus = RunStage("generate", c.seed, [&] {
      return BuildSingleFeatureCorpus(ks, b.pack, feature, Sources(b), DeriveSeed(c.seed, "corpus"));
    });
    MakeDirs(sub);
    WriteMcqItems(JoinPath(sub, "mcq_items.jsonl"), items);
    c.written.push_back(JoinPath(sub, "mcq_items.jsonl"));
    SubRun run = TrainAndEvaluate(c, sub, corpus, closure, evaluate);
    Merge(all, Prefixed(feature, run.final_metrics));
    const auto acc = run.curve.Column("mcq.overall");
    for (size_t i = 0; i < acc.size(); ++i) {
      curves += feature + "," + std::to_string(run.curve.epochs[i]) + "," + FormatDouble(acc[i]) + "\n";
    }
  }
  if (r.eval_every_epoch) c.Emit(JoinPath(dir, "plot_learning_speed.csv"), curves);
  return all;
}

std::string RatioName(int m, int n) { return "m" + std::to_string(m) + "n" + std::to_string(n); }

struct ConsistencyData {
  std::vector<ConflictPair> evidence;
  std::vector<ConflictPair> test;
};

ConsistencyData MakeConsistencyData(const RunContext& c) {
  const auto& b = c.bundle;
  const KnowledgeSet ks =
      SampleKnowledgeSet(b.pools, c.recipe.knowledge_count, DeriveSeed(c.seed, "knowledge"));
  const EvidenceTestSplit split =
      SplitEvidenceTest(ks, c.recipe.test_fraction, DeriveSeed(c.seed, "split"));
  return {MakeConflicts(b.pools, split.evidence, DeriveSeed(c.seed, "conflict", 0)),
          MakeConflicts(b.pools, split.test, DeriveSeed(c.seed, "conflict", 1))};
}

struct ConsistencyRun {
  MetricMap metrics;
  SubRun run;
};

ConsistencyRun RunOneRatio(const RunContext& c, const std::string& dir, const ConsistencyData& data,
                           int m, int n, SourcePlacement placement,
                           const std::vector<std::string>& extra_closure = {}) {
  const auto& r = c.recipe;
  const auto& b = c.bundle;
  const Corpus corpus = RunStage("generate", c.seed, [&] {
    return BuildConsistencyCorpus(data.evidence, data.test, b.pack, r.feature_a, r.feature_b, m, n,
                                  Sources(b), DeriveSeed(c.seed, "corpus"), placement);
  });
  auto evidence = BuildTestStatements(data.evidence, r.statement_style);
  std::vector<StatementPair> test;
  if (!data.test.empty()) test = BuildTestStatements(data.test, r.statement_style);
  MakeDirs(dir);
  WriteStatements(JoinPath(dir, "statements_evidence.jsonl"), evidence);
  c.written.push_back(JoinPath(dir, "statements_evidence.jsonl"));
  std::vector<std::string> closure = StatementTexts(evidence);
  closure.insert(closure.end(), extra_closure.begin(), extra_closure.end());
  std::vector<std::pair<std::string, std::vector<StatementPair>>> sets;
  if (!test.empty()) {
    WriteStatements(JoinPath(dir, "statements_test.jsonl"), test);
    c.written.push_back(JoinPath(dir, "statements_test.jsonl"));
    for (auto& t : StatementTexts(test)) closure.push_back(std::move(t));
  }
  sets.emplace_back("evidence", std::move(evidence));
  if (!test.empty()) sets.emplace_back("test", std::move(test));
  ConsistencyRun out;
  out.run = TrainAndEvaluate(c, dir, corpus, closure, PreferenceEvaluator(c, std::move(sets)));
  out.metrics = out.run.final_metrics;
  return out;
}

MetricMap RunConsistencySweep(const RunContext& c, const std::string& dir) {
  const auto& r = c.recipe;
  const ConsistencyData data = RunStage("generate", c.seed, [&] { return MakeConsistencyData(c); });
  const auto ratios = r.EffectiveRatios();
  MetricMap all;
  std::string sweep = "series,x,y\n";
  for (const auto& [m, n] : ratios) {
    const bool single = ratios.size() == 1;
    const std::string sub = single ? dir : JoinPath(dir, RatioName(m, n));
    const ConsistencyRun run = RunOneRatio(c, sub, data, m, n, r.placement);
    Merge(all, Prefixed(single ? "" : RatioName(m, n), run.metrics));
    const double x = m + n == 0 ? 0.5 : static_cast<double>(m) / (m + n);
    for (const auto& [k, v] : run.metrics) {
      if (k.find(".pref.") == std::string::npos || k.ends_with(".ties") || k.ends_with(".n")) continue;
      sweep += k + "," + FormatDouble(x) + "," + FormatDouble(v) + "\n";
    }
  }
  if (ratios.size() > 1) c.Emit(JoinPath(dir, "plot_ratio_sweep.csv"), sweep);
  return all;
}

MetricMap RunMultiStyle(const RunContext& c, const std::string& dir) {
  const auto& r = c.recipe;
  const auto& b = c.bundle;
  std::vector<StyleMixture> mixtures;
  const Corpus corpus = RunStage("generate", c.seed, [&] {
    const KnowledgeSet ks =
        SampleKnowledgeSet(b.pools, r.knowledge_count, DeriveSeed(c.seed, "knowledge"));
    mixtures = MakeStyleMixtures(b.pools, ks, r.features.size(), DeriveSeed(c.seed, "conflict"));
    return BuildMultiStyleCorpus(mixtures, b.pack, r.features, DeriveSeed(c.seed, "corpus"));
  });
  const auto items = BuildMixtureStatements(mixtures, r.statement_style);
  MakeDirs(dir);
  WriteMixtureItems(JoinPath(dir, "mixture_items.jsonl"), items);
  c.written.push_back(JoinPath(dir, "mixture_items.jsonl"));
  std::vector<std::string> closure;
  for (const auto& item : items) closure.insert(closure.end(), item.statements.begin(), item.statements.end());
  Evaluator evaluate = [&](SequenceScorer& scorer, const std::string& out) {
    const StyleWinnerReport report = MultiStyleWinners(scorer, items, r.features, r.score_mode);
    MetricMap m;
    for (size_t i = 0; i < report.styles.size(); ++i) m["styles." + report.styles[i]] = report.proportions[i];
    if (!out.empty()) {
      c.EmitJson(JoinPath(out, "styles.json"), report.ToJson());
      c.Emit(JoinPath(out, "styles.csv"), report.ToCsv());
      std::string pie = "series,x,y\n";
      for (size_t i = 0; i < report.styles.size(); ++i) {
        pie += "proportion," + report.styles[i] + "," + FormatDouble(report.proportions[i]) + "\n";
      }
      c.Emit(JoinPath(out, "plot_pie.csv"), pie);
    }
    return m;
  };
  return TrainAndEvaluate(c, dir, corpus, closure, evaluate).final_metrics;
}

MetricMap RunRepresentationProbe(const RunContext& c, const std::string& dir) {
  const auto& r = c.recipe;
  const auto& b = c.bundle;
  if (r.scorer != "internal" && !c.generate_only) {
    throw Error(ErrorCategory::kArgument,
                "representation_probe reads hidden states and needs the internal model");
  }
  const ConsistencyData data = RunStage("generate", c.seed, [&] { return MakeConsistencyData(c); });
  const auto templates_a = b.pack.ForFeature(r.feature_a);
  const auto templates_b = b.pack.ForFeature(r.feature_b);
  if (b.newspapers_a.size() < 2 || b.newspapers_b.size() < 2) {
    throw Error(ErrorCategory::kCapacity, "probe needs two newspapers per side");
  }
  // A1, A2 from side A's newspaper set, B1, B2 from side B's.
  const std::array<std::pair<std::string, Side>, kProbeSources> sources = {{
      {b.newspapers_a[0], Side::kA},
      {b.newspapers_a[1], Side::kA},
      {b.newspapers_b[0], Side::kB},
      {b.newspapers_b[1], Side::kB},
  }};
  const std::array<const char*, kProbeSources> source_labels = {"A1", "A2", "B1", "B2"};
  const size_t records = std::min(r.probe_records, data.evidence.size());

  MetricMap all;
  for (SourcePlacement placement : {SourcePlacement::kBeginning, SourcePlacement::kEnd}) {
    const std::string name = PlacementName(placement);
    const std::string sub = JoinPath(dir, name);
    // Probe texts: the same neutral body per record under each of the four sources.
    std::vector<std::string> texts;
    std::vector<std::string> labels;
    std::vector<int> groups;
    std::vector<int> skip;
    for (size_t i = 0; i < records; ++i) {
      for (size_t s = 0; s < sources.size(); ++s) {
        const auto& templates = sources[s].second == Side::kA ? templates_a : templates_b;
        if (templates.empty()) throw Error(ErrorCategory::kCapacity, "no probe templates");
        const Template& t = *templates[i % templates.size()];
        SourceAux aux;
        aux.side = sources[s].second;
        aux.newspaper = sources[s].first;
        aux.placement = placement;
        const KnowledgeRecord& k = data.evidence[i].side_a;
        texts.push_back(Render(t, k, aux).text);
        labels.push_back(source_labels[s]);
        groups.push_back(sources[s].second == Side::kA ? 0 : 1);
        const bool drop = r.exclude_prefix && placement == SourcePlacement::kBeginning;
        skip.push_back(drop ? static_cast<int>(Segment(SourcePrefix(t, aux)).size()) : 0);
      }
    }
    // Probe texts join the vocabulary closure: a small corpus need not
    // mention the probe newspapers.
    ConsistencyRun run = RunOneRatio(c, sub, data, r.m, r.n, placement, texts);
    if (c.generate_only) continue;
    std::vector<Eigen::VectorXd> reps;
    reps.reserve(texts.size());
    const ProjectionReport report = RunStage("probe", c.seed, [&] {
      for (size_t i = 0; i < texts.size(); ++i) {
        reps.push_back(ExtractRepresentation(*run.run.model, run.run.tokenizer, texts[i],
                                             r.representation_layer, skip[i]));
      }
      return PcaProject(reps, labels);
    });
    c.EmitJson(JoinPath(sub, "pca.json"), report.ToJson());
    c.Emit(JoinPath(sub, "pca.csv"), report.ToCsv());
    c.Emit(JoinPath(sub, "plot_pca.csv"), report.ToCsv());
    MetricMap m = run.metrics;
    m["pca.separation"] = GroupSeparation(report.coords, groups);
    m["pca.evr1"] = report.explained_variance_ratio[0];
    m["pca.evr2"] = report.explained_variance_ratio[1];
    Merge(all, Prefixed(name, m));
  }
  return all;
}

}  // namespace

const char* ToolVersion() { return CONFLICTLAB_VERSION; }

const char* RecipeKindName(RecipeKind kind) {
  switch (kind) {
    case RecipeKind::kConflictPairwise: return "conflict_pairwise";
    case RecipeKind::kLearningSpeed: return "learning_speed";
    case RecipeKind::kConsistencyRatio: return "consistency_ratio";
    case RecipeKind::kCounterfactual: return "counterfactual";
    case RecipeKind::kMultiStyle: return "multi_style";
    case RecipeKind::kRepresentationProbe: return "representation_probe";
  }
  return "unknown";
}

RecipeKind ParseRecipeKind(const std::string& name) {
  for (RecipeKind k : {RecipeKind::kConflictPairwise, RecipeKind::kLearningSpeed,
                       RecipeKind::kConsistencyRatio, RecipeKind::kCounterfactual,
                       RecipeKind::kMultiStyle, RecipeKind::kRepresentationProbe}) {
    if (name == RecipeKindName(k)) return k;
  }
  if (name == "conflict") return RecipeKind::kConflictPairwise;
  if (name == "consistency") return RecipeKind::kConsistencyRatio;
  if (name == "probe") return RecipeKind::kRepresentationProbe;
  if (name == "styles") return RecipeKind::kMultiStyle;
  throw Error(ErrorCategory::kValidation, "unknown recipe kind '" + name + "'");
}

ExperimentRecipe ExperimentRecipe::ForKind(RecipeKind kind) {
  ExperimentRecipe r;
  r.kind = kind;
  r.name = RecipeKindName(kind);
  switch (kind) {
    case RecipeKind::kConflictPairwise:
      r.feature_a = "newspaper";
      r.feature_b = "novel";
      break;
    case RecipeKind::kLearningSpeed:
      r.features = {"newspaper", "social_media"};
      break;
    case RecipeKind::kConsistencyRatio:
    case RecipeKind::kRepresentationProbe:
      r.feature_a = "source_name_a";
      r.feature_b = "source_name_b";
      r.m = 9;
      r.n = 1;
      break;
    case RecipeKind::kCounterfactual:
      // The style preferred without support is tied to the minority side.
      r.feature_a = "newspaper";
      r.feature_b = "novel";
      r.ratios = {{0, 0}, {5, 5}, {1, 9}};
      break;
    case RecipeKind::kMultiStyle:
      r.features = {"newspaper", "scientific_report", "novel", "social_media", "textbook",
                    "wikipedia", "blog", "diary", "interview", "advertisement"};
      break;
  }
  return r;
}

std::vector<std::pair<int, int>> ExperimentRecipe::EffectiveRatios() const {
  if (!ratios.empty()) return ratios;
  return {{m, n}};
}

void ExperimentRecipe::Validate() const {
  if (name.empty()) Invalid("name", "must not be empty");
  if (name.find('/') != std::string::npos) Invalid("name", "must not contain '/'");
  if (seeds.empty()) Invalid("seeds", "at least one seed is required");
  if (std::set<uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    Invalid("seeds", "replicate seeds must be distinct");
  }
  if (knowledge_count < 1) Invalid("knowledge_count", "must be >= 1");
  if (profile != "paper" && profile != "desk") Invalid("profile", "expected paper or desk");
  if (probe_records < 1) Invalid("probe_records", "must be >= 1");
  train.Validate();
  LmConfig probe = model;
  probe.vocab_size = 1;
  probe.Validate();
  const bool consistency = kind == RecipeKind::kConsistencyRatio ||
                           kind == RecipeKind::kCounterfactual ||
                           kind == RecipeKind::kRepresentationProbe;
  if (consistency) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
      Invalid("test_fraction", "must lie in (0, 1)");
    }
    if (knowledge_count < 2) Invalid("knowledge_count", "needs >= 2 for an evidence/test split");
    for (const auto& [rm, rn] : EffectiveRatios()) {
      if (rm < 0 || rn < 0) Invalid("ratios", "m and n must be >= 0");
    }
    if (kind == RecipeKind::kRepresentationProbe && !ratios.empty()) {
      Invalid("ratios", "representation_probe uses the single ratio m:n");
    }
  }
  const bool pairwise = kind != RecipeKind::kLearningSpeed && kind != RecipeKind::kMultiStyle;
  if (pairwise) {
    if (feature_a.empty() || feature_b.empty()) Invalid("feature_a", "both features are required");
    if (feature_a == feature_b) Invalid("feature_b", "must differ from feature_a");
  }
  if (kind == RecipeKind::kLearningSpeed && features.empty()) {
    Invalid("features", "learning_speed needs at least one feature");
  }
  if (kind == RecipeKind::kMultiStyle && features.size() < 2) {
    Invalid("features", "multi_style needs at least two styles");
  }
  if (std::set<std::string>(features.begin(), features.end()).size() != features.size()) {
    Invalid("features", "duplicate feature");
  }
}

nlohmann::ordered_json ExperimentRecipe::ToJson() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = name;
  j["kind"] = RecipeKindName(kind);
  j["feature_a"] = feature_a;
  j["feature_b"] = feature_b;
  j["features"] = features;
  j["m"] = m;
  j["n"] = n;
  Json rs = Json::array();
  for (const auto& [rm, rn] : ratios) rs.push_back({rm, rn});
  j["ratios"] = rs;
  j["knowledge_count"] = knowledge_count;
  j["test_fraction"] = test_fraction;
  j["seeds"] = seeds;
  j["profile"] = profile;
  j["train"] = train.ToJson();
  Json mj = model.ToJson();
  mj.erase("vocab_size");
  j["model"] = mj;
  j["scorer"] = scorer;
  j["score_mode"] = ScoreModeName(score_mode);
  j["statement_style"] = StatementStyleName(statement_style);
  j["placement"] = PlacementName(placement);
  j["representation_layer"] = representation_layer;
  j["exclude_prefix"] = exclude_prefix;
  j["probe_records"] = probe_records;
  j["save_checkpoint"] = save_checkpoint;
  j["eval_every_epoch"] = eval_every_epoch;
  j["data_dir"] = data_dir;
  return j;
}

ExperimentRecipe ExperimentRecipe::FromJson(const nlohmann::ordered_json& j,
                                            ExperimentRecipe r) {
  if (!j.is_object()) throw Error(ErrorCategory::kValidation, "recipe must be an object");
  if (j.contains("schema_version")) CheckSchemaVersion(j, "recipe");
  static const std::set<std::string> kKnown = {
      "schema_version", "name", "kind", "feature_a", "feature_b", "features", "m", "n",
      "ratios", "knowledge_count", "test_fraction", "seeds", "seed", "profile", "train",
      "model", "scorer", "score_mode", "statement_style", "placement",
      "representation_layer", "exclude_prefix", "probe_records", "save_checkpoint",
      "eval_every_epoch", "data_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) Invalid(key, "unknown key");
  }
  try {
    if (j.contains("kind")) r.kind = ParseRecipeKind(j["kind"].get<std::string>());
    if (j.contains("name")) r.name = j["name"].get<std::string>();
    if (j.contains("feature_a")) r.feature_a = j["feature_a"].get<std::string>();
    if (j.contains("feature_b")) r.feature_b = j["feature_b"].get<std::string>();
    if (j.contains("features")) r.features = j["features"].get<std::vector<std::string>>();
    if (j.contains("m")) r.m = j["m"].get<int>();
    if (j.contains("n")) r.n = j["n"].get<int>();
    if (j.contains("ratios")) {
      r.ratios.clear();
      for (const auto& pair : j["ratios"]) {
        if (!pair.is_array() || pair.size() != 2) Invalid("ratios", "entries are [m, n]");
        r.ratios.emplace_back(pair[0].get<int>(), pair[1].get<int>());
      }
    }
    if (j.contains("knowledge_count")) {
      const auto k = j["knowledge_count"].get<int64_t>();
      if (k < 1) Invalid("knowledge_count", "must be >= 1");
      r.knowledge_count = static_cast<size_t>(k);
    }
    if (j.contains("test_fraction")) r.test_fraction = j["test_fraction"].get<double>();
    if (j.contains("seeds")) r.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("seed")) r.seeds = {j["seed"].get<uint64_t>()};
    if (j.contains("profile")) {
      r.profile = j["profile"].get<std::string>();
      r.train = TrainConfig::ForProfile(r.profile);
    }
    if (j.contains("train")) r.train = TrainConfig::FromJson(j["train"], r.train);
    if (j.contains("model")) {
      Json mj = r.model.ToJson();
      for (const auto& [key, value] : j["model"].items()) {
        if (!mj.contains(key) || key == "vocab_size") Invalid("model." + key, "unknown key");
        mj[key] = value;
      }
      r.model = LmConfig::FromJson(mj);
    }
    if (j.contains("scorer")) r.scorer = j["scorer"].get<std::string>();
    if (j.contains("score_mode")) r.score_mode = ParseScoreMode(j["score_mode"].get<std::string>());
    if (j.contains("statement_style")) {
      r.statement_style = ParseStatementStyle(j["statement_style"].get<std::string>());
    }
    if (j.contains("placement")) r.placement = ParsePlacement(j["placement"].get<std::string>());
    if (j.contains("representation_layer")) {
      r.representation_layer = j["representation_layer"].get<int>();
    }
    if (j.contains("exclude_prefix")) r.exclude_prefix = j["exclude_prefix"].get<bool>();
    if (j.contains("probe_records")) r.probe_records = j["probe_records"].get<size_t>();
    if (j.contains("save_checkpoint")) r.save_checkpoint = j["save_checkpoint"].get<bool>();
    if (j.contains("eval_every_epoch")) r.eval_every_epoch = j["eval_every_epoch"].get<bool>();
    if (j.contains("data_dir")) r.data_dir = j["data_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, std::string("recipe: ") + e.what());
  }
  return r;
}

ExperimentRecipe ExperimentRecipe::FromJson(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorCategory::kValidation, "recipe needs a string 'kind'");
  }
  return FromJson(j, ForKind(ParseRecipeKind(j["kind"].get<std::string>())));
}

std::map<std::string, MetricSummary> Summarize(const std::vector<MetricMap>& runs) {
  std::map<std::string, MetricSummary> out;
  for (const auto& run : runs) {
    for (const auto& [k, v] : run) {
      auto [it, fresh] = out.try_emplace(k);
      MetricSummary& s = it->second;
      if (fresh) {
        s.min = v;
        s.max = v;
      }
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
      s.mean += v;
      ++s.count;
    }
  }
  for (auto& [k, s] : out) s.mean /= static_cast<double>(s.count);
  return out;
}

nlohmann::ordered_json SummaryToJson(const std::map<std::string, MetricSummary>& summary) {
  Json j = Json::object();
  for (const auto& [k, s] : summary) {
    j[k] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
  }
  return j;
}

std::string SummaryToCsv(const std::map<std::string, MetricSummary>& summary) {
  std::string out = "metric,mean,min,max,count\n";
  for (const auto& [k, s] : summary) {
    out += k + "," + FormatDouble(s.mean) + "," + FormatDouble(s.min) + "," + FormatDouble(s.max) +
           "," + std::to_string(s.count) + "\n";
  }
  return out;
}

double GroupSeparation(const std::vector<std::array<double, 2>>& points,
                       const std::vector<int>& groups) {
  if (points.size() != groups.size()) {
    throw Error(ErrorCategory::kArgument, "points and groups differ in length");
  }
  std::array<std::array<double, 2>, 2> centroid{};
  std::array<size_t, 2> count{};
  for (size_t i = 0; i < points.size(); ++i) {
    const int g = groups[i];
    if (g != 0 && g != 1) throw Error(ErrorCategory::kArgument, "group must be 0 or 1");
    centroid[g][0] += points[i][0];
    centroid[g][1] += points[i][1];
    ++count[g];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw Error(ErrorCategory::kArgument, "both groups need at least one point");
  }
  for (int g = 0; g < 2; ++g) {
    centroid[g][0] /= static_cast<double>(count[g]);
    centroid[g][1] /= static_cast<double>(count[g]);
  }
  double within = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const auto& c = centroid[groups[i]];
    within += std::hypot(points[i][0] - c[0], points[i][1] - c[1]);
  }
  within /= static_cast<double>(points.size());
  const double between =
      std::hypot(centroid[0][0] - centroid[1][0], centroid[0][1] - centroid[1][1]);
  return within > 0.0 ? between / within : std::numeric_limits<double>::infinity();
}

namespace {

ExperimentResult Execute(const ExperimentRecipe& recipe, const std::string& out_dir,
                         const ProgressFn& progress, bool generate_only) {
  recipe.Validate();
  ExperimentResult result;
  result.dir = out_dir;
  const DataBundle bundle = RunStage("load", recipe.seeds.front(), [&] {
    return LoadBundle(recipe.data_dir.empty() ? DefaultDataDir() : recipe.data_dir);
  });
  MakeDirs(out_dir);

  std::vector<MetricMap> per_seed;
  for (uint64_t seed : recipe.seeds) {
    RunContext c{recipe, bundle, seed, progress, result.written, result.digests, generate_only};
    const std::string dir = JoinPath(out_dir, "seed-" + std::to_string(seed));
    MakeDirs(dir);
    c.EmitProvenance(dir);
    c.Note("running " + std::string(RecipeKindName(recipe.kind)) + " into " + dir);
    MetricMap metrics;
    switch (recipe.kind) {
      case RecipeKind::kConflictPairwise: metrics = RunConflictPairwise(c, dir); break;
      case RecipeKind::kLearningSpeed: metrics = RunLearningSpeed(c, dir); break;
      case RecipeKind::kConsistencyRatio:
      case RecipeKind::kCounterfactual: metrics = RunConsistencySweep(c, dir); break;
      case RecipeKind::kMultiStyle: metrics = RunMultiStyle(c, dir); break;
      case RecipeKind::kRepresentationProbe: metrics = RunRepresentationProbe(c, dir); break;
    }
    if (generate_only) continue;
    Json mj = Json::object();
    for (const auto& [k, v] : metrics) mj[k] = v;
    c.EmitJson(JoinPath(dir, "metrics.json"), mj);
    result.seeds.push_back({seed, dir, metrics});
    per_seed.push_back(std::move(metrics));
  }

  RunContext top{recipe, bundle, recipe.seeds.front(), progress, result.written, result.digests};
  top.EmitJson(JoinPath(out_dir, "config.json"), recipe.ToJson());
  top.Emit(JoinPath(out_dir, "VERSION"), std::string(ToolVersion()) + "\n");
  if (!generate_only) {
    result.summary = Summarize(per_seed);
    top.EmitJson(JoinPath(out_dir, "summary.json"), SummaryToJson(result.summary));
    top.Emit(JoinPath(out_dir, "summary.csv"), SummaryToCsv(result.summary));
  }
  // Provenance files are rewritten per sub-run; list each path once.
  std::set<std::string> seen;
  std::erase_if(result.written, [&](const std::string& p) { return !seen.insert(p).second; });
  return result;
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentRecipe& recipe, const std::string& out_dir,
                               const ProgressFn& progress) {
  return Execute(recipe, out_dir, progress, false);
}

ExperimentResult GenerateCorpora(const ExperimentRecipe& recipe, const std::string& out_dir,
                                 const ProgressFn& progress) {
  return Execute(recipe, out_dir, progress, true);
}

ExperimentResult MergeRuns(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  if (run_dirs.empty()) throw Error(ErrorCategory::kEmptyInput, "no run directories to merge");
  ExperimentResult result;
  result.dir = out_dir;
  std::vector<MetricMap> runs;
  for (const auto& dir : run_dirs) {
    const Json j = ReadJson(JoinPath(dir, "metrics.json"));
    MetricMap m;
    for (const auto& [k, v] : j.items()) {
      if (!v.is_number()) {
        throw Error(ErrorCategory::kValidation, dir + "/metrics.json: '" + k + "' is not a number");
      }
      m[k] = v.get<double>();
    }
    SeedResult s;
    s.dir = dir;
    s.metrics = m;
    try {
      const Json cfg = ReadJson(JoinPath(dir, "config.json"));
      if (cfg.contains("seed")) s.seed = cfg["seed"].get<uint64_t>();
    } catch (const Error&) {
      // The seed is informational only.
    }
    result.seeds.push_back(std::move(s));
    runs.push_back(std::move(m));
  }
  result.summary = Summarize(runs);
  MakeDirs(out_dir);
  const std::string json_path = JoinPath(out_dir, "summary.json");
  const std::string csv_path = JoinPath(out_dir, "summary.csv");
  WriteJson(json_path, SummaryToJson(result.summary));
  WriteFile(csv_path, SummaryToCsv(result.summary));
  WriteFile(JoinPath(out_dir, "VERSION"), std::string(ToolVersion()) + "\n");
  result.written = {json_path, csv_path, JoinPath(out_dir, "VERSION")};
  return result;
}

}  // namespace conflictlab
