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

// conflictlab: generate corpora, train the tiny model, evaluate preferences
// and run complete experiment recipes.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conflictlab/corpus.h"
#include "conflictlab/error.h"
#include "conflictlab/eval.h"
#include "conflictlab/experiment.h"
#include "conflictlab/io.h"
#include "conflictlab/model.h"
#include "conflictlab/random.h"
#include "conflictlab/scorer.h"
#include "conflictlab/tokenizer.h"
#include "conflictlab/toml_lite.h"
#include "conflictlab/trainer.h"

namespace fs = std::filesystem;
using conflictlab::Error;
using conflictlab::ErrorCategory;
using Json = nlohmann::ordered_json;

namespace {

std::string OutputRoot() {
  const char* env = std::getenv("CONFLICTLAB_OUTPUT_ROOT");
  return env && *env ? env : "runs";
}

std::vector<uint64_t> ParseSeeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  for (const auto& part : conflictlab::Split(text, ',')) {
    const std::string t = conflictlab::Trim(part);
    if (t.empty()) continue;
    try {
      size_t used = 0;
      seeds.push_back(std::stoull(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw Error(ErrorCategory::kUsage, "invalid seed '" + t + "'");
    }
  }
  if (seeds.empty()) throw Error(ErrorCategory::kUsage, "--seeds needs at least one seed");
  return seeds;
}

std::vector<std::string> ParseList(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& part : conflictlab::Split(text, ',')) {
    const std::string t = conflictlab::Trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

// "9:1,5:5" -> [[9,1],[5,5]]
Json ParseRatios(const std::string& text) {
  Json out = Json::array();
  for (const auto& part : ParseList(text)) {
    const auto mn = conflictlab::Split(part, ':');
    if (mn.size() != 2) throw Error(ErrorCategory::kUsage, "ratio '" + part + "' is not m:n");
    try {
      out.push_back({std::stoi(mn[0]), std::stoi(mn[1])});
    } catch (const std::exception&) {
      throw Error(ErrorCategory::kUsage, "ratio '" + part + "' is not m:n");
    }
  }
  return out;
}

// Flags shared by `run` and `gen`; each one set overrides the recipe.
struct RecipeFlags {
  std::string recipe;
  std::string config;
  std::optional<std::string> name, seeds, profile, features, feature_a, feature_b, ratios,
      scorer, mode, statement_style, placement, data;
  std::optional<int> m, n, epochs, batch, layer;
  std::optional<int64_t> knowledge;
  std::optional<double> lr, test_fraction;
  bool no_checkpoint = false;
  bool final_only = false;
  bool exclude_prefix = false;
  std::string out;

  void Register(CLI::App* app) {
    app->add_option("recipe", recipe, "recipe file (.toml/.json) or kind name")->required();
    app->add_option("--config", config, "extra TOML/JSON overlay applied before flags");
    app->add_option("--name", name, "run name (output subdirectory)");
    app->add_option("--seeds", seeds, "comma-separated replicate seeds");
    app->add_option("--profile", profile, "training profile: paper or desk");
    app->add_option("--knowledge", knowledge, "number of knowledge records");
    app->add_option("--m", m, "neutral support count for side A");
    app->add_option("--n", n, "neutral support count for side B");
    app->add_option("--ratios", ratios, "ratio sweep, e.g. 9:1,5:5,1:9");
    app->add_option("--test-fraction", test_fraction, "test share of the knowledge set");
    app->add_option("--features", features, "comma-separated features (learning_speed, multi_style)");
    app->add_option("--feature-a", feature_a, "feature of side A");
    app->add_option("--feature-b", feature_b, "feature of side B");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--batch", batch, "batch size");
    app->add_option("--lr", lr, "peak learning rate");
    app->add_option("--scorer", scorer, "'internal' or a command speaking the scorer protocol");
    app->add_option("--mode", mode, "score comparison: normalized or sum");
    app->add_option("--statement-style", statement_style, "probe statements: plain or novel");
    app->add_option("--placement", placement, "source name placement: beginning or end");
    app->add_option("--layer", layer, "representation layer (-1 = last)");
    app->add_flag("--exclude-prefix", exclude_prefix, "drop source prefix tokens from representations");
    app->add_option("--data", data, "data bundle directory");
    app->add_flag("--no-checkpoint", no_checkpoint, "do not save model checkpoints");
    app->add_flag("--final-only", final_only, "evaluate only after the last epoch");
    app->add_option("--out", out, "output directory (default $CONFLICTLAB_OUTPUT_ROOT/<name>)");
  }

  conflictlab::ExperimentRecipe Resolve() const {
    using conflictlab::ExperimentRecipe;
    ExperimentRecipe r;
    bool named = false;
    if (fs::exists(recipe)) {
      const Json j = conflictlab::LoadConfigFile(recipe);
      r = ExperimentRecipe::FromJson(j);
      named = j.contains("name");
      if (!named) r.name = fs::path(recipe).stem().string();
      named = true;
    } else {
      r = ExperimentRecipe::ForKind(conflictlab::ParseRecipeKind(recipe));
    }
    if (!config.empty()) {
      const Json j = conflictlab::LoadConfigFile(config);
      named = named || j.contains("name");
      r = ExperimentRecipe::FromJson(j, r);
    }
    Json o = Json::object();
    if (name) o["name"] = *name;
    if (seeds) o["seeds"] = ParseSeeds(*seeds);
    if (profile) o["profile"] = *profile;
    if (knowledge) o["knowledge_count"] = *knowledge;
    if (m) o["m"] = *m;
    if (n) o["n"] = *n;
    if (ratios) o["ratios"] = ParseRatios(*ratios);
    if (test_fraction) o["test_fraction"] = *test_fraction;
    if (features) o["features"] = ParseList(*features);
    if (feature_a) o["feature_a"] = *feature_a;
    if (feature_b) o["feature_b"] = *feature_b;
    if (scorer) o["scorer"] = *scorer;
    if (mode) o["score_mode"] = *mode;
    if (statement_style) o["statement_style"] = *statement_style;
    if (placement) o["placement"] = *placement;
    if (layer) o["representation_layer"] = *layer;
    if (exclude_prefix) o["exclude_prefix"] = true;
    if (data) o["data_dir"] = *data;
    if (no_checkpoint) o["save_checkpoint"] = false;
    if (final_only) o["eval_every_epoch"] = false;
    r = ExperimentRecipe::FromJson(o, r);
    // Train overrides go after the profile so --profile does not reset them.
    Json t = Json::object();
    if (epochs) t["epochs"] = *epochs;
    if (batch) t["batch_size"] = *batch;
    if (lr) t["learning_rate"] = *lr;
    if (!t.empty()) r.train = conflictlab::TrainConfig::FromJson(t, r.train);
    if (!named && !name) {
      r.name = conflictlab::RecipeKindName(r.kind);
      if (r.kind == conflictlab::RecipeKind::kConsistencyRatio && r.ratios.empty()) {
        r.name += "-m" + std::to_string(r.m) + "n" + std::to_string(r.n);
      }
    }
    r.Validate();
    return r;
  }

  std::string OutDir(const conflictlab::ExperimentRecipe& r) const {
    return out.empty() ? conflictlab::JoinPath(OutputRoot(), r.name) : out;
  }
};

// Where an evaluation gets its scores: a checkpoint or an external command.
struct ScorerFlags {
  std::string checkpoint;
  std::string command;
  int timeout_ms = static_cast<int>(conflictlab::kDefaultScorerTimeout.count());

  void Register(CLI::App* app) {
    auto* c = app->add_option("--checkpoint", checkpoint, "checkpoint directory of the tiny model");
    auto* s = app->add_option("--scorer", command, "external scorer command");
    c->excludes(s);
    app->add_option("--timeout-ms", timeout_ms, "external scorer timeout per response");
  }

  struct Handle {
    std::optional<conflictlab::Checkpoint> checkpoint;
    std::unique_ptr<conflictlab::SequenceScorer> scorer;
  };

  Handle Open() const {
    Handle h;
    if (!command.empty()) {
      h.scorer = std::make_unique<conflictlab::ExternalScorer>(
          command, std::chrono::milliseconds(timeout_ms));
    } else if (!checkpoint.empty()) {
      h.checkpoint.emplace(conflictlab::LoadCheckpoint(checkpoint));
      h.scorer = std::make_unique<conflictlab::InProcessScorer>(h.checkpoint->model,
                                                                h.checkpoint->tokenizer);
    } else {
      throw Error(ErrorCategory::kUsage, "one of --checkpoint or --scorer is required");
    }
    return h;
  }
};

void PrintPaths(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p << "\n";
}

void EmitReport(const std::string& out_dir, const std::string& stem, const Json& json,
                const std::string& csv) {
  std::cout << json.dump(2) << "\n";
  if (out_dir.empty()) return;
  conflictlab::MakeDirs(out_dir);
  const std::string jp = conflictlab::JoinPath(out_dir, stem + ".json");
  const std::string cp = conflictlab::JoinPath(out_dir, stem + ".csv");
  conflictlab::WriteJson(jp, json);
  conflictlab::WriteFile(cp, csv);
  conflictlab::WriteFile(conflictlab::JoinPath(out_dir, "VERSION"),
                         std::string(conflictlab::ToolVersion()) + "\n");
  PrintPaths({jp, cp});
}

// Every string an evaluation file can ask the model to score.
std::vector<std::string> ClosureTexts(const std::vector<std::string>& files) {
  std::vector<std::string> out;
  for (const auto& f : files) {
    for (const auto& row : conflictlab::ReadJsonl(f)) {
      for (const char* key : {"text", "s_a", "s_b", "correct"}) {
        if (row.contains(key) && row[key].is_string()) out.push_back(row[key].get<std::string>());
      }
      for (const char* key : {"distractors", "statements"}) {
        if (!row.contains(key) || !row[key].is_array()) continue;
        for (const auto& s : row[key]) {
          if (s.is_string()) out.push_back(s.get<std::string>());
        }
      }
    }
  }
  return out;
}

int Main(int argc, char** argv) {
  CLI::App app{"conflictlab: knowledge-conflict experiments on a tiny causal LM"};
  app.set_version_flag("--version", std::string(conflictlab::ToolVersion()));
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress messages on stderr");
  const conflictlab::ProgressFn progress = [&quiet](const std::string& msg) {
    if (!quiet) std::cerr << msg << "\n";
  };

  // gen
  RecipeFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "generate the corpora of a recipe and print their digests");
  gen_flags.Register(gen);
  gen->callback([&] {
    const auto recipe = gen_flags.Resolve();
    const auto result = conflictlab::GenerateCorpora(recipe, gen_flags.OutDir(recipe), progress);
    for (const auto& [path, digest] : result.digests) {
      std::cout << "corpus " << digest << " " << path << "\n";
    }
  });

  // run
  RecipeFlags run_flags;
  auto* run = app.add_subcommand("run", "generate, train and evaluate a recipe for every seed");
  run_flags.Register(run);
  run->callback([&] {
    const auto recipe = run_flags.Resolve();
    const std::string out = run_flags.OutDir(recipe);
    const auto result = conflictlab::RunExperiment(recipe, out, progress);
    for (const auto& [metric, s] : result.summary) {
      if (metric.starts_with("train.")) continue;
      std::cout << metric << " mean " << s.mean << " min " << s.min << " max " << s.max << "\n";
    }
    PrintPaths(result.written);
  });

  // train
  std::string train_corpus, train_config, train_profile = "desk", train_out;
  std::vector<std::string> train_closure;
  std::optional<int> train_epochs, train_batch;
  std::optional<double> train_lr;
  uint64_t train_seed = 1;
  auto* train = app.add_subcommand("train", "train the tiny model on a corpus file");
  train->add_option("--corpus", train_corpus, "corpus JSONL")->required();
  train->add_option("--closure", train_closure,
                    "statement/item JSONL files whose texts join the vocabulary");
  train->add_option("--config", train_config, "TOML/JSON with [train] and [model] tables");
  train->add_option("--profile", train_profile, "paper or desk");
  train->add_option("--seed", train_seed, "initialization and shuffle seed");
  train->add_option("--epochs", train_epochs, "training epochs");
  train->add_option("--batch", train_batch, "batch size");
  train->add_option("--lr", train_lr, "peak learning rate");
  train->add_option("--out", train_out, "output directory (default $CONFLICTLAB_OUTPUT_ROOT/train)");
  train->callback([&] {
    conflictlab::TrainConfig tc = conflictlab::TrainConfig::ForProfile(train_profile);
    conflictlab::LmConfig mc;
    if (!train_config.empty()) {
      const Json j = conflictlab::LoadConfigFile(train_config);
      for (const auto& [key, value] : j.items()) {
        if (key != "train" && key != "model") {
          throw Error(ErrorCategory::kValidation, train_config + ": unknown key '" + key + "'");
        }
      }
      if (j.contains("train")) tc = conflictlab::TrainConfig::FromJson(j["train"], tc);
      if (j.contains("model")) {
        Json mj = mc.ToJson();
        for (const auto& [key, value] : j["model"].items()) mj[key] = value;
        mc = conflictlab::LmConfig::FromJson(mj);
      }
    }
    Json t = Json::object();
    if (train_epochs) t["epochs"] = *train_epochs;
    if (train_batch) t["batch_size"] = *train_batch;
    if (train_lr) t["learning_rate"] = *train_lr;
    tc = conflictlab::TrainConfig::FromJson(t, tc);
    tc.seed = conflictlab::DeriveSeed(train_seed, "train");
    tc.Validate();

    const auto examples = conflictlab::ReadCorpus(train_corpus);
    if (examples.empty()) throw Error(ErrorCategory::kEmptyInput, "empty corpus " + train_corpus);
    std::vector<std::string> texts;
    for (const auto& e : examples) texts.push_back(e.text);
    const std::vector<std::vector<std::string>> corpora = {texts, ClosureTexts(train_closure)};
    const auto tok = conflictlab::Tokenizer::Build(std::span<const std::vector<std::string>>(corpora));
    mc.vocab_size = static_cast<int>(tok.size());
    mc.Validate();
    const auto docs = conflictlab::EncodeDocuments(tok, texts, mc.max_context);
    conflictlab::LmModel model(mc);
    model.InitRandom(conflictlab::DeriveSeed(train_seed, "init"));
    const std::string out = train_out.empty() ? conflictlab::JoinPath(OutputRoot(), "train") : train_out;
    conflictlab::MakeDirs(out);
    conflictlab::TrainOptions options;
    options.on_epoch_end = [&](int epoch, double loss) {
      progress("epoch " + std::to_string(epoch) + "/" + std::to_string(tc.epochs) + " loss " +
               std::to_string(loss));
    };
    options.tokenizer = &tok;
    options.checkpoint_dir = conflictlab::JoinPath(out, "epochs");
    const auto log = conflictlab::Train(model, docs, tc, options);
    Json meta;
    meta["seed"] = train_seed;
    meta["epoch"] = tc.epochs;
    meta["train"] = tc.ToJson();
    meta["corpus"] = train_corpus;
    const std::string ckpt = conflictlab::JoinPath(out, "checkpoint");
    conflictlab::SaveCheckpoint(ckpt, model, tok, meta);
    log.WriteCsv(conflictlab::JoinPath(out, "train_log.csv"));
    Json cfg;
    cfg["train"] = tc.ToJson();
    cfg["model"] = mc.ToJson();
    cfg["corpus"] = train_corpus;
    cfg["seed"] = train_seed;
    conflictlab::WriteJson(conflictlab::JoinPath(out, "config.json"), cfg);
    conflictlab::WriteFile(conflictlab::JoinPath(out, "VERSION"),
                           std::string(conflictlab::ToolVersion()) + "\n");
    std::vector<std::string> paths = {ckpt, conflictlab::JoinPath(out, "train_log.csv"),
                                      conflictlab::JoinPath(out, "config.json")};
    paths.insert(paths.end(), log.checkpoint_paths.begin(), log.checkpoint_paths.end());
    std::cout << "final loss " << log.epoch_mean_loss.back() << "\n";
    PrintPaths(paths);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a model on probe files");
  eval->require_subcommand(1);
  std::string eval_mode = "normalized", eval_out;

  ScorerFlags pref_scorer;
  std::string pref_file;
  auto* pref = eval->add_subcommand("pref", "pairwise preference score");
  pref->add_option("--statements", pref_file, "statement-pair JSONL")->required();
  pref->add_option("--mode", eval_mode, "normalized or sum");
  pref->add_option("--out", eval_out, "directory for the JSON/CSV report");
  pref_scorer.Register(pref);
  pref->callback([&] {
    const auto pairs = conflictlab::ReadStatements(pref_file);
    auto h = pref_scorer.Open();
    const auto report =
        conflictlab::PreferenceScore(*h.scorer, pairs, conflictlab::ParseScoreMode(eval_mode));
    EmitReport(eval_out, "preference", report.ToJson(), report.ToCsv());
  });

  ScorerFlags mcq_scorer;
  std::string mcq_file;
  auto* mcq = eval->add_subcommand("mcq", "four-option memorization probe accuracy");
  mcq->add_option("--items", mcq_file, "MCQ item JSONL")->required();
  mcq->add_option("--mode", eval_mode, "normalized or sum");
  mcq->add_option("--out", eval_out, "directory for the JSON/CSV report");
  mcq_scorer.Register(mcq);
  mcq->callback([&] {
    const auto items = conflictlab::ReadMcqItems(mcq_file);
    auto h = mcq_scorer.Open();
    const auto report =
        conflictlab::McqAccuracy(*h.scorer, items, conflictlab::ParseScoreMode(eval_mode));
    EmitReport(eval_out, "mcq", report.ToJson(), report.ToCsv());
  });

  ScorerFlags styles_scorer;
  std::string styles_file, styles_list;
  auto* styles = eval->add_subcommand("styles", "multi-style winner proportions");
  styles->add_option("--items", styles_file, "mixture item JSONL")->required();
  styles->add_option("--styles", styles_list, "comma-separated styles in variant order");
  styles->add_option("--mode", eval_mode, "normalized or sum");
  styles->add_option("--out", eval_out, "directory for the JSON/CSV report");
  styles_scorer.Register(styles);
  styles->callback([&] {
    const auto items = conflictlab::ReadMixtureItems(styles_file);
    std::vector<std::string> names =
        styles_list.empty()
            ? conflictlab::ExperimentRecipe::ForKind(conflictlab::RecipeKind::kMultiStyle).features
            : ParseList(styles_list);
    auto h = styles_scorer.Open();
    const auto report = conflictlab::MultiStyleWinners(*h.scorer, items, names,
                                                       conflictlab::ParseScoreMode(eval_mode));
    EmitReport(eval_out, "styles", report.ToJson(), report.ToCsv());
  });

  std::string pca_checkpoint, pca_texts;
  int pca_layer = conflictlab::kLastLayer;
  int pca_skip = 0;
  auto* pca = eval->add_subcommand("pca", "2-D PCA of averaged hidden states");
  pca->add_option("--checkpoint", pca_checkpoint, "checkpoint directory")->required();
  pca->add_option("--texts", pca_texts, "JSONL rows {\"label\": ..., \"text\": ...}")->required();
  pca->add_option("--layer", pca_layer, "representation layer (-1 = last)");
  pca->add_option("--skip", pca_skip, "leading tokens to leave out of the average");
  pca->add_option("--out", eval_out, "directory for the JSON/CSV report");
  pca->callback([&] {
    const auto ckpt = conflictlab::LoadCheckpoint(pca_checkpoint);
    std::vector<Eigen::VectorXd> reps;
    std::vector<std::string> labels;
    for (const auto& row : conflictlab::ReadJsonl(pca_texts)) {
      if (!row.contains("text") || !row["text"].is_string()) {
        throw Error(ErrorCategory::kValidation, pca_texts + ": row without string 'text'");
      }
      labels.push_back(row.value("label", ""));
      reps.push_back(conflictlab::ExtractRepresentation(ckpt.model, ckpt.tokenizer,
                                                        row["text"].get<std::string>(), pca_layer,
                                                        pca_skip));
    }
    const auto report = conflictlab::PcaProject(reps, labels);
    EmitReport(eval_out, "pca", report.ToJson(), report.ToCsv());
  });

  // serve-scorer
  std::string serve_checkpoint;
  auto* serve = app.add_subcommand("serve-scorer", "answer scorer-protocol requests on stdin/stdout");
  serve->add_option("--checkpoint", serve_checkpoint, "checkpoint directory")->required();
  serve->callback([&] {
    const auto ckpt = conflictlab::LoadCheckpoint(serve_checkpoint);
    conflictlab::ServeScorer(std::cin, std::cout, ckpt.model, ckpt.tokenizer);
  });

  // report
  std::vector<std::string> report_dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "merge replicate runs into mean and min-max");
  report->add_option("runs", report_dirs, "seed directories or experiment directories")->required();
  report->add_option("--out", report_out, "summary directory (default $CONFLICTLAB_OUTPUT_ROOT/report)");
  report->callback([&] {
    std::vector<std::string> seeds;
    for (const auto& d : report_dirs) {
      if (fs::exists(fs::path(d) / "metrics.json")) {
        seeds.push_back(d);
        continue;
      }
      if (!fs::is_directory(d)) throw Error(ErrorCategory::kIo, "not a directory: " + d);
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(d)) {
        if (entry.is_directory() && entry.path().filename().string().starts_with("seed-") &&
            fs::exists(entry.path() / "metrics.json")) {
          found.push_back(entry.path().string());
        }
      }
      if (found.empty()) throw Error(ErrorCategory::kEmptyInput, "no metrics.json under " + d);
      std::sort(found.begin(), found.end());
      seeds.insert(seeds.end(), found.begin(), found.end());
    }
    const std::string out =
        report_out.empty() ? conflictlab::JoinPath(OutputRoot(), "report") : report_out;
    const auto merged = conflictlab::MergeRuns(seeds, out);
    std::cout << conflictlab::SummaryToCsv(merged.summary);
    PrintPaths(merged.written);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << conflictlab::CategoryName(ErrorCategory::kUsage) << ": " << e.what()
              << "\n";
    return conflictlab::ExitCode(ErrorCategory::kUsage);
  }
  return 0;
}

// Error lines must stay single-line for callers that parse them.
std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Main(argc, argv);
  } catch (const Error& e) {
    std::cout.flush();
    std::cerr << "error: " << conflictlab::CategoryName(e.category()) << ": " << OneLine(e.what())
              << "\n";
    return conflictlab::ExitCode(e.category());
  } catch (const std::exception& e) {
    std::cout.flush();
    std::cerr << "error: " << conflictlab::CategoryName(ErrorCategory::kInternal) << ": "
              << OneLine(e.what()) << "\n";
    return conflictlab::ExitCode(ErrorCategory::kInternal);
  }
}
