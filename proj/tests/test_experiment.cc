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

#include <filesystem>
#include <set>

#include "conflictlab/experiment.h"
#include "conflictlab/io.h"
#include "doctest.h"
#include "test_util.h"

using namespace conflictlab;
namespace fs = std::filesystem;

namespace {

// Seconds-scale settings: a handful of records, one small layer, two epochs.
ExperimentRecipe Tiny(RecipeKind kind) {
  ExperimentRecipe r = ExperimentRecipe::ForKind(kind);
  r.knowledge_count = 6;
  r.model.d_model = 16;
  r.model.n_layers = 1;
  r.model.n_heads = 2;
  r.model.d_ff = 32;
  r.train.epochs = 2;
  r.train.batch_size = 8;
  r.probe_records = 3;
  r.data_dir = CONFLICTLAB_DATA_DIR;
  return r;
}

void CheckProvenance(const std::string& dir) {
  CHECK_MESSAGE(fs::exists(dir + "/config.json"), dir);
  CHECK_MESSAGE(fs::exists(dir + "/VERSION"), dir);
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("kind names and aliases") {
    CHECK(ParseRecipeKind("consistency") == RecipeKind::kConsistencyRatio);
    CHECK(ParseRecipeKind("consistency_ratio") == RecipeKind::kConsistencyRatio);
    CHECK(ParseRecipeKind("probe") == RecipeKind::kRepresentationProbe);
    CHECK(ParseRecipeKind("styles") == RecipeKind::kMultiStyle);
    CHECK(ParseRecipeKind("conflict") == RecipeKind::kConflictPairwise);
    CHECK(std::string(RecipeKindName(RecipeKind::kLearningSpeed)) == "learning_speed");
    CHECK(testutil::CategoryOf([] { ParseRecipeKind("nope"); }) == ErrorCategory::kValidation);
  }

  TEST_CASE("recipe validation") {
    auto r = ExperimentRecipe::ForKind(RecipeKind::kConsistencyRatio);
    CHECK_NOTHROW(r.Validate());
    r.seeds = {1, 2, 1};
    CHECK(testutil::CategoryOf([&] { r.Validate(); }) == ErrorCategory::kValidation);
    r = ExperimentRecipe::ForKind(RecipeKind::kConsistencyRatio);
    r.feature_b = r.feature_a;
    CHECK(testutil::CategoryOf([&] { r.Validate(); }) == ErrorCategory::kValidation);
    r = ExperimentRecipe::ForKind(RecipeKind::kMultiStyle);
    r.features = {"novel"};
    CHECK(testutil::CategoryOf([&] { r.Validate(); }) == ErrorCategory::kValidation);
    r = ExperimentRecipe::ForKind(RecipeKind::kCounterfactual);
    r.ratios = {{-1, 2}};
    CHECK(testutil::CategoryOf([&] { r.Validate(); }) == ErrorCategory::kValidation);
    r = ExperimentRecipe::ForKind(RecipeKind::kConsistencyRatio);
    r.model.n_heads = 5;
    CHECK(testutil::CategoryOf([&] { r.Validate(); }) == ErrorCategory::kValidation);
  }

  TEST_CASE("recipes round-trip through JSON and reject unknown keys") {
    auto r = ExperimentRecipe::ForKind(RecipeKind::kCounterfactual);
    r.seeds = {4, 5};
    r.model.d_model = 64;
    r.train.epochs = 7;
    const auto j = r.ToJson();
    const auto back = ExperimentRecipe::FromJson(j);
    CHECK(back.ToJson() == j);
    CHECK(back.EffectiveRatios() == r.ratios);

    nlohmann::ordered_json bad = j;
    bad["colour"] = "blue";
    CHECK(testutil::CategoryOf([&] { ExperimentRecipe::FromJson(bad); }) ==
          ErrorCategory::kValidation);
    nlohmann::ordered_json old = j;
    old["schema_version"] = 0;
    CHECK(testutil::CategoryOf([&] { ExperimentRecipe::FromJson(old); }) ==
          ErrorCategory::kSchemaVersion);
    nlohmann::ordered_json over = {{"kind", "consistency"}, {"profile", "paper"}, {"seed", 8}};
    const auto o = ExperimentRecipe::FromJson(over);
    CHECK(o.train.learning_rate == TrainConfig::Paper().learning_rate);
    CHECK(o.seeds == std::vector<uint64_t>{8});
  }

  TEST_CASE("summaries report mean and range over seeds") {
    const std::vector<MetricMap> runs = {{{"x", 1.0}, {"y", 5.0}}, {{"x", 3.0}}, {{"x", 2.0}}};
    const auto s = Summarize(runs);
    CHECK(s.at("x").mean == 2.0);
    CHECK(s.at("x").min == 1.0);
    CHECK(s.at("x").max == 3.0);
    CHECK(s.at("x").count == 3);
    CHECK(s.at("y").count == 1);
    CHECK(SummaryToCsv(s) == "metric,mean,min,max,count\nx,2,1,3,3\ny,5,5,5,1\n");
    CHECK(SummaryToJson(s).at("x").at("max") == 3.0);
  }

  TEST_CASE("group separation") {
    const std::vector<std::array<double, 2>> pts = {{0, 1}, {0, -1}, {10, 1}, {10, -1}};
    CHECK(GroupSeparation(pts, {0, 0, 1, 1}) == doctest::Approx(10.0));
    CHECK(testutil::CategoryOf([&] { GroupSeparation(pts, {0, 0, 0, 0}); }) ==
          ErrorCategory::kArgument);
  }

  TEST_CASE("corpus generation is reproducible") {
    auto r = Tiny(RecipeKind::kConsistencyRatio);
    r.seeds = {1, 2};
    const auto a = GenerateCorpora(r, testutil::TempDir("gen-a"));
    const auto b = GenerateCorpora(r, testutil::TempDir("gen-b"));
    REQUIRE(a.digests.size() == 2);
    REQUIRE(b.digests.size() == 2);
    for (size_t i = 0; i < 2; ++i) CHECK(a.digests[i].second == b.digests[i].second);
    CHECK(a.digests[0].second != a.digests[1].second);
    CHECK(fs::exists(a.dir + "/seed-1/manifest.json"));
    CHECK(!fs::exists(a.dir + "/seed-1/metrics.json"));
  }

  TEST_CASE("consistency run writes a complete bundle per seed") {
    auto r = Tiny(RecipeKind::kConsistencyRatio);
    r.seeds = {1, 2};
    const std::string out = testutil::TempDir("run-consistency");
    const auto res = RunExperiment(r, out);
    REQUIRE(res.seeds.size() == 2);
    for (const auto& s : res.seeds) {
      CheckProvenance(s.dir);
      for (const char* f : {"manifest.json", "corpus.jsonl", "tokenizer.json", "train_log.csv",
                            "epoch_metrics.csv", "plot_dynamics.csv", "preference_evidence.json",
                            "preference_test.csv", "metrics.json", "checkpoint/model.json",
                            "checkpoint/weights.f32"}) {
        CHECK_MESSAGE(fs::exists(s.dir + "/" + f), f);
      }
      for (const char* m : {"evidence.pref.average", "test.pref.average", "test.pref.ties",
                            "train.final_loss"}) {
        CHECK_MESSAGE(s.metrics.count(m) == 1, m);
      }
      const double pr = s.metrics.at("test.pref.average");
      CHECK(pr >= 0.0);
      CHECK(pr <= 1.0);
    }
    CheckProvenance(out);
    CHECK(res.summary.at("test.pref.average").count == 2);
    CHECK(fs::exists(out + "/summary.csv"));
    std::set<std::string> unique(res.written.begin(), res.written.end());
    CHECK(unique.size() == res.written.size());
    for (const auto& p : res.written) CHECK_MESSAGE(fs::exists(p), p);

    const auto merged = MergeRuns({res.seeds[0].dir, res.seeds[1].dir}, testutil::TempDir("merged"));
    CHECK(merged.summary.at("test.pref.average").mean ==
          doctest::Approx(res.summary.at("test.pref.average").mean));
    CHECK(testutil::CategoryOf([] { MergeRuns({}, testutil::TempDir("merged-empty")); }) ==
          ErrorCategory::kEmptyInput);
  }

  TEST_CASE("every recipe kind runs end to end at tiny scale") {
    for (RecipeKind kind : {RecipeKind::kConflictPairwise, RecipeKind::kLearningSpeed,
                            RecipeKind::kCounterfactual, RecipeKind::kMultiStyle,
                            RecipeKind::kRepresentationProbe}) {
      auto r = Tiny(kind);
      if (kind == RecipeKind::kMultiStyle) r.features = {"newspaper", "novel", "blog"};
      if (kind == RecipeKind::kLearningSpeed) r.features = {"newspaper"};
      const std::string out = testutil::TempDir(std::string("kind-") + RecipeKindName(kind));
      CAPTURE(RecipeKindName(kind));
      const auto res = RunExperiment(r, out);
      REQUIRE(res.seeds.size() == 1);
      const auto& m = res.seeds[0].metrics;
      CheckProvenance(res.seeds[0].dir);
      switch (kind) {
        case RecipeKind::kConflictPairwise:
          CHECK(m.count("test.pref.average") == 1);
          break;
        case RecipeKind::kLearningSpeed:
          CHECK(m.count("newspaper.mcq.overall") == 1);
          CHECK(fs::exists(res.seeds[0].dir + "/plot_learning_speed.csv"));
          break;
        case RecipeKind::kCounterfactual:
          CHECK(fs::exists(res.seeds[0].dir + "/plot_ratio_sweep.csv"));
          CHECK(fs::exists(res.seeds[0].dir + "/m5n5/manifest.json"));
          CHECK(fs::exists(res.seeds[0].dir + "/m1n9/config.json"));
          break;
        case RecipeKind::kMultiStyle: {
          double total = 0.0;
          for (const char* s : {"styles.newspaper", "styles.novel", "styles.blog"}) {
            REQUIRE(m.count(s) == 1);
            total += m.at(s);
          }
          CHECK(total == doctest::Approx(1.0));
          CHECK(fs::exists(res.seeds[0].dir + "/plot_pie.csv"));
          break;
        }
        case RecipeKind::kRepresentationProbe:
          CHECK(m.count("beginning.pca.separation") == 1);
          CHECK(m.count("end.pca.evr1") == 1);
          CHECK(fs::exists(res.seeds[0].dir + "/end/plot_pca.csv"));
          break;
        default:
          break;
      }
    }
  }

  TEST_CASE("an external scorer is used as is, without training") {
    auto r = Tiny(RecipeKind::kConsistencyRatio);
    r.scorer = testutil::StubCommand("uniform 10");
    const std::string out = testutil::TempDir("external");
    const auto res = RunExperiment(r, out);
    const auto& m = res.seeds[0].metrics;
    CHECK(m.at("test.pref.average") == 0.5);
    CHECK(m.at("evidence.pref.average") == 0.5);
    CHECK(!fs::exists(res.seeds[0].dir + "/train_log.csv"));
  }

  TEST_CASE("stage failures name the stage and keep earlier outputs") {
    auto r = Tiny(RecipeKind::kConsistencyRatio);
    r.m = 60;  // more support biographies than neutral templates
    const std::string out = testutil::TempDir("stage-fail");
    try {
      RunExperiment(r, out);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kCapacity);
      CHECK(std::string(e.what()).find("stage 'generate' (seed 1)") != std::string::npos);
    }
    CHECK(fs::exists(out + "/seed-1/config.json"));
  }
}
