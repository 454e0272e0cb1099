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

#include <cmath>
#include <limits>

#include "conflictlab/corpus.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"
#include "conflictlab/trainer.h"
#include "doctest.h"
#include "test_util.h"

using namespace conflictlab;

namespace {

std::vector<std::vector<TokenId>> RandomDocs(uint64_t seed, int vocab, size_t count, int max_len) {
  Rng rng(seed);
  std::vector<std::vector<TokenId>> docs(count);
  for (auto& d : docs) {
    const int len = 2 + static_cast<int>(rng.UniformInt(static_cast<uint64_t>(max_len - 1)));
    for (int i = 0; i < len; ++i) {
      d.push_back(static_cast<TokenId>(rng.UniformInt(static_cast<uint64_t>(vocab))));
    }
  }
  return docs;
}

LmConfig GradConfig() {
  LmConfig c;
  c.vocab_size = 7;
  c.d_model = 8;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 12;
  c.max_context = 8;
  return c;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("steps per epoch is the ceiling") {
    CHECK(StepsPerEpoch(10, 4) == 3);
    CHECK(StepsPerEpoch(12, 4) == 3);
    CHECK(StepsPerEpoch(1, 64) == 1);
    CHECK(StepsPerEpoch(10000, 64) == 157);
  }

  TEST_CASE("learning-rate trace: linear warmup then cosine decay") {
    TrainConfig cfg = TrainConfig::Paper();
    const int64_t total = 1000;
    const int64_t w = WarmupSteps(cfg, total);
    CHECK(w == 30);
    CHECK(LearningRate(cfg, 0, total) == doctest::Approx(cfg.learning_rate / 30.0));
    for (int64_t s = 0; s < w; ++s) {
      CHECK(LearningRate(cfg, s, total) ==
            doctest::Approx(cfg.learning_rate * static_cast<double>(s + 1) / 30.0));
    }
    for (int64_t s = w; s < total; ++s) {
      const double progress = static_cast<double>(s - w) / static_cast<double>(total - w);
      const double want = 0.5 * cfg.learning_rate * (1.0 + std::cos(M_PI * progress));
      CHECK(LearningRate(cfg, s, total) == doctest::Approx(want).epsilon(1e-9));
      CHECK(LearningRate(cfg, s, total) <= cfg.learning_rate);
    }
    CHECK(LearningRate(cfg, total - 1, total) < LearningRate(cfg, w, total));
  }

  TEST_CASE("profiles and config validation") {
    const TrainConfig paper = TrainConfig::Paper();
    CHECK(paper.batch_size == 64);
    CHECK(paper.learning_rate == 1e-5);
    CHECK(paper.epochs == 5);
    CHECK(paper.warmup_ratio == 0.03);
    CHECK(paper.weight_decay == 0.0);
    const TrainConfig desk = TrainConfig::Desk();
    CHECK(desk.epochs == 30);
    CHECK(desk.profile == "desk");
    CHECK(TrainConfig::ForProfile("desk").learning_rate == desk.learning_rate);
    CHECK(testutil::CategoryOf([] { TrainConfig::ForProfile("cluster"); }) ==
          ErrorCategory::kValidation);
    TrainConfig bad = paper;
    bad.warmup_ratio = 1.0;
    CHECK(testutil::CategoryOf([&] { bad.Validate(); }) == ErrorCategory::kValidation);
    bad = paper;
    bad.epochs = 0;
    CHECK(testutil::CategoryOf([&] { bad.Validate(); }) == ErrorCategory::kValidation);
    nlohmann::ordered_json j;
    j["epochs"] = 9;
    const TrainConfig over = TrainConfig::FromJson(j, desk);
    CHECK(over.epochs == 9);
    CHECK(over.learning_rate == desk.learning_rate);
    CHECK(TrainConfig::FromJson(desk.ToJson(), paper).ToJson() == desk.ToJson());
  }

  TEST_CASE("batch loss is the mean of independent per-document losses") {
    LmModel m(GradConfig());
    m.InitRandom(4);
    const auto docs = RandomDocs(1, 7, 6, 8);
    double mean = 0.0;
    for (const auto& d : docs) {
      const std::vector<std::vector<TokenId>> one = {d};
      mean += BatchLoss(m, one) / static_cast<double>(docs.size());
      CHECK(BatchLoss(m, one) ==
            doctest::Approx(-m.LogProb(d) / static_cast<double>(d.size() - 1)).epsilon(1e-12));
    }
    CHECK(BatchLoss(m, docs) == doctest::Approx(mean).epsilon(1e-12));
    ParamVector<float> grad;
    CHECK(BatchLossAndGradient(m, std::span<const std::vector<TokenId>>(docs), grad) ==
          doctest::Approx(mean).epsilon(1e-6));
  }

  TEST_CASE("analytic gradient matches central differences") {
    Transformer<double> m(GradConfig());
    m.InitRandom(11);
    Rng rng(2);
    // Init-scale noise moves LayerNorm gains and biases off 1 and 0.
    for (auto& p : m.params()) p += 0.02 * rng.Normal();
    REQUIRE(m.parameter_count() <= 10000);
    const auto docs = RandomDocs(3, 7, 3, 8);
    const auto fine = GradientCheck(m, docs, 1e-5);
    CHECK(fine.max_relative_error < 1e-4);
    // At init scale a step of 1e-3 is a few percent of the residual stream,
    // so the central difference carries O(eps^2) truncation error. Doubling
    // eps must quadruple it; a wrong gradient would not scale this way.
    const auto r1 = GradientCheck(m, docs, 1e-3);
    const auto r2 = GradientCheck(m, docs, 2e-3);
    CAPTURE(r1.max_relative_error);
    CHECK(r1.worst_index == r2.worst_index);
    CHECK(r2.max_relative_error / r1.max_relative_error == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("vocabulary of one gives zero loss and zero gradient") {
    LmConfig c = GradConfig();
    c.vocab_size = 1;
    Transformer<double> m(c);
    m.InitRandom(5);
    const std::vector<std::vector<TokenId>> docs = {{0, 0, 0, 0}, {0, 0}};
    ParamVector<double> grad;
    CHECK(BatchLossAndGradient(m, std::span<const std::vector<TokenId>>(docs), grad) == 0.0);
    double norm = 0.0;
    for (double g : grad) norm = std::max(norm, std::abs(g));
    CHECK(norm < 1e-12);
  }

  TEST_CASE("ten copies of one sentence are memorized in 200 steps") {
    LmConfig c = testutil::MicroConfig(12);
    c.d_model = 16;
    c.d_ff = 32;
    LmModel m(c);
    m.InitRandom(1);
    const std::vector<TokenId> sentence = {1, 5, 7, 3, 9, 2};
    const std::vector<std::vector<TokenId>> docs(10, sentence);
    TrainConfig cfg = TrainConfig::Desk();
    cfg.batch_size = 10;
    cfg.epochs = 200;
    cfg.learning_rate = 1e-2;
    const TrainLog log = Train(m, docs, cfg);
    CHECK(log.steps.size() == 200);
    CHECK(BatchLoss(m, docs) < 0.05);
  }

  TEST_CASE("one entry per optimizer step and per epoch") {
    LmModel m(testutil::MicroConfig(9));
    m.InitRandom(2);
    const auto docs = RandomDocs(5, 9, 10, 10);
    TrainConfig cfg = TrainConfig::Desk();
    cfg.batch_size = 4;
    cfg.epochs = 2;
    const TrainLog log = Train(m, docs, cfg);
    CHECK(log.steps.size() == 6);
    CHECK(log.epoch_mean_loss.size() == 2);
    for (size_t i = 0; i < log.steps.size(); ++i) {
      CHECK(log.steps[i].step == static_cast<int64_t>(i));
      CHECK(log.steps[i].epoch == (i < 3 ? 1 : 2));
    }
    const std::string csv = log.ToCsv();
    CHECK(csv.rfind("step,epoch,loss,lr\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  }

  TEST_CASE("training is bit-reproducible") {
    const auto docs = RandomDocs(9, 9, 12, 10);
    TrainConfig cfg = TrainConfig::Desk();
    cfg.epochs = 3;
    cfg.seed = 77;
    LmModel a(testutil::MicroConfig(9)), b(testutil::MicroConfig(9));
    a.InitRandom(3);
    b.InitRandom(3);
    Train(a, docs, cfg);
    Train(b, docs, cfg);
    CHECK(a.params() == b.params());
    LmModel c(testutil::MicroConfig(9));
    c.InitRandom(3);
    cfg.seed = 78;
    Train(c, docs, cfg);
    CHECK(a.params() != c.params());
  }

  TEST_CASE("non-finite loss aborts with a diagnostic") {
    LmModel m(testutil::MicroConfig(9));
    m.InitRandom(3);
    m.params()[0] = std::numeric_limits<float>::quiet_NaN();
    const std::vector<std::vector<TokenId>> docs = {{1, 0, 2}};
    try {
      Train(m, docs, TrainConfig::Desk());
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kTraining);
      CHECK(std::string(e.what()).find("step 0") != std::string::npos);
      CHECK(std::string(e.what()).find("lr") != std::string::npos);
    }
  }

  TEST_CASE("empty corpus and overlong documents are rejected") {
    LmModel m(testutil::MicroConfig(9));
    const std::vector<std::vector<TokenId>> none;
    CHECK(testutil::CategoryOf([&] { Train(m, none, TrainConfig::Desk()); }) ==
          ErrorCategory::kEmptyInput);
    const std::vector<std::vector<TokenId>> longer = {std::vector<TokenId>(17, 1)};
    CHECK(testutil::CategoryOf([&] { Train(m, longer, TrainConfig::Desk()); }) ==
          ErrorCategory::kContext);
  }

  TEST_CASE("eval hooks produce one row per epoch") {
    LmModel m(testutil::MicroConfig(9));
    m.InitRandom(1);
    const auto docs = RandomDocs(2, 9, 8, 10);
    TrainConfig cfg = TrainConfig::Desk();
    cfg.epochs = 5;
    std::vector<int> seen;
    const std::vector<EvalHook> hooks = {
        {"loss", [&](const LmModel& model, int epoch) {
           seen.push_back(epoch);
           return std::map<std::string, double>{{"loss", BatchLoss(model, docs)}};
         }},
        {"const", [](const LmModel&, int) { return std::map<std::string, double>{{"one", 1.0}}; }}};
    const auto r = TrainWithEvalHooks(m, docs, cfg, hooks);
    CHECK(seen == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(r.metrics.epochs == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(r.metrics.Column("loss").size() == 5);
    CHECK(r.metrics.Column("one") == std::vector<double>(5, 1.0));
    CHECK(r.metrics.ToCsv().rfind("epoch,loss,one\n", 0) == 0);
    CHECK(r.metrics.Column("loss").back() < r.metrics.Column("loss").front());
  }

  TEST_CASE("zero hooks behave as plain training") {
    const auto docs = RandomDocs(4, 9, 8, 10);
    TrainConfig cfg = TrainConfig::Desk();
    cfg.epochs = 2;
    LmModel a(testutil::MicroConfig(9)), b(testutil::MicroConfig(9));
    a.InitRandom(6);
    b.InitRandom(6);
    const auto r = TrainWithEvalHooks(a, docs, cfg, {});
    const auto log = Train(b, docs, cfg);
    CHECK(a.params() == b.params());
    CHECK(r.metrics.rows.empty());
    CHECK(r.log.epoch_mean_loss == log.epoch_mean_loss);
  }

  TEST_CASE("hook failures name the hook and the epoch") {
    LmModel m(testutil::MicroConfig(9));
    m.InitRandom(1);
    const auto docs = RandomDocs(2, 9, 4, 10);
    TrainConfig cfg = TrainConfig::Desk();
    cfg.epochs = 3;
    const std::vector<EvalHook> hooks = {{"flaky", [](const LmModel&, int epoch) {
                                            if (epoch == 2) throw Error(ErrorCategory::kScorer, "boom");
                                            return std::map<std::string, double>{};
                                          }}};
    try {
      TrainWithEvalHooks(m, docs, cfg, hooks);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kScorer);
      const std::string what = e.what();
      CHECK(what.find("flaky") != std::string::npos);
      CHECK(what.find("epoch 2") != std::string::npos);
    }
  }

  TEST_CASE("per-epoch checkpoints are written and loadable") {
    const Tokenizer tok = Tokenizer::Build(std::vector<std::string>{"a b c d e f"});
    LmModel m(testutil::MicroConfig(static_cast<int>(tok.size())));
    m.InitRandom(1);
    const std::vector<std::vector<TokenId>> docs = {tok.Encode("a b c"), tok.Encode("d e f")};
    TrainConfig cfg = TrainConfig::Desk();
    cfg.epochs = 2;
    cfg.checkpoint_every_epoch = true;
    TrainOptions opt;
    opt.checkpoint_dir = testutil::TempDir("epoch-ckpt");
    opt.tokenizer = &tok;
    const TrainLog log = Train(m, docs, cfg, opt);
    REQUIRE(log.checkpoint_paths.size() == 2);
    const Checkpoint last = LoadCheckpoint(log.checkpoint_paths[1]);
    CHECK(last.model.params() == m.params());
    CHECK(last.metadata.at("epoch") == 2);
    TrainOptions missing;
    CHECK(testutil::CategoryOf([&] { Train(m, docs, cfg, missing); }) == ErrorCategory::kArgument);
  }

  TEST_CASE("reference hyperparameters still reduce the loss on a desk corpus") {
    const auto& b = testutil::Bundle();
    const auto ks = SampleKnowledgeSet(b.pools, 20, 1);
    const Corpus c = BuildSingleFeatureCorpus(ks, b.pack, "newspaper", SourceSampler(b), 1);
    const Tokenizer tok = Tokenizer::Build(c.Texts());
    LmConfig cfg_m;
    cfg_m.vocab_size = static_cast<int>(tok.size());
    cfg_m.d_model = 16;
    cfg_m.n_layers = 1;
    cfg_m.n_heads = 2;
    cfg_m.d_ff = 32;
    LmModel m(cfg_m);
    m.InitRandom(1);
    const auto texts = c.Texts();
    const auto docs = EncodeDocuments(tok, texts, cfg_m.max_context);
    const TrainLog log = Train(m, docs, TrainConfig::Paper());
    REQUIRE(log.epoch_mean_loss.size() == 5);
    CHECK(log.epoch_mean_loss[4] < log.epoch_mean_loss[0]);
  }
}
