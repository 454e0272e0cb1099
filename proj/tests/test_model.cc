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

#include "conflictlab/model.h"
#include "conflictlab/random.h"
#include "doctest.h"
#include "oracles.h"
#include "test_util.h"

using namespace conflictlab;

namespace {

// Weights large enough that the softmaxes are far from uniform.
template <typename T>
void FillRandom(Transformer<T>& model, uint64_t seed, double scale) {
  Rng rng(seed);
  for (auto& p : model.params()) p = static_cast<T>(scale * rng.Normal());
}

std::vector<TokenId> RandomIds(Rng& rng, int vocab, int len) {
  std::vector<TokenId> ids(static_cast<size_t>(len));
  for (auto& id : ids) id = static_cast<TokenId>(rng.UniformInt(static_cast<uint64_t>(vocab)));
  return ids;
}

std::vector<int> AsInts(const std::vector<TokenId>& ids) { return {ids.begin(), ids.end()}; }

Tokenizer ToyTokenizer() {
  return Tokenizer::Build(std::vector<std::string>{"alpha beta gamma delta", "beta gamma ."});
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("layout covers every parameter exactly once") {
    LmConfig c = testutil::MicroConfig(11);
    const ParameterLayout layout(c);
    size_t offset = 0;
    for (const auto& b : layout.blocks()) {
      CHECK(b.offset == offset);
      offset += b.size();
    }
    CHECK(offset == layout.total());
    const size_t d = 8, ff = 16, V = 11, C = 16, L = 2;
    const size_t per_layer = 4 * d + d * 3 * d + 3 * d + d * d + d + d * ff + ff + ff * d + d;
    CHECK(layout.total() == V * d + C * d + L * per_layer + 2 * d + d * V);
    CHECK(layout.Find("layer1.w_qkv").rows == 8);
    CHECK(layout.Find("layer1.w_qkv").cols == 24);
  }

  TEST_CASE("config validation") {
    LmConfig c = testutil::MicroConfig(5);
    c.n_heads = 3;
    CHECK(testutil::CategoryOf([&] { c.Validate(); }) == ErrorCategory::kValidation);
    c = testutil::MicroConfig(0);
    CHECK(testutil::CategoryOf([&] { c.Validate(); }) == ErrorCategory::kValidation);
    c = testutil::MicroConfig(5);
    CHECK(LmConfig::FromJson(c.ToJson()) == c);
  }

  TEST_CASE("zero model is uniform at every position") {
    LmModel m(testutil::MicroConfig(10));
    m.SetZero();
    const std::vector<TokenId> ids = {1, 4, 5, 6, 2};
    const auto logits = m.Logits(ids);
    CHECK(logits.rows() == 5);
    CHECK(logits.cols() == 10);
    CHECK(logits.cwiseAbs().maxCoeff() == 0.0f);
    CHECK(m.LogProb(ids) == doctest::Approx(-4 * std::log(10.0)).epsilon(1e-9));
  }

  TEST_CASE("uniform scores: -4 ln 10 summed, -ln 10 normalized") {
    Tokenizer tok = Tokenizer::FromVocabulary(
        {"<pad>", "<bos>", "<eos>", "a", "b", "c", "d", "e", "f", "g"});
    LmConfig c = testutil::MicroConfig(static_cast<int>(tok.size()));
    LmModel m(c);
    m.SetZero();
    const SequenceScore s = ScoreSequence(m, tok, "a b c");
    CHECK(s.num_tokens == 4);
    CHECK(s.logprob == doctest::Approx(-9.2103403720).epsilon(1e-9));
    CHECK(s.Normalized() == doctest::Approx(-2.302585093).epsilon(1e-9));
  }

  TEST_CASE("micro model logits match the step-by-step oracle") {
    LmConfig c;
    c.vocab_size = 5;
    c.d_model = 4;
    c.n_layers = 1;
    c.n_heads = 2;
    c.d_ff = 8;
    c.max_context = 8;
    Transformer<double> m(c);
    FillRandom(m, 3, 0.7);
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const auto ids = RandomIds(rng, 5, 1 + static_cast<int>(rng.UniformInt(8)));
      const auto logits = m.Logits(ids);
      const auto ref = oracle::Forward(c, m.params(), AsInts(ids));
      for (size_t t = 0; t < ids.size(); ++t) {
        for (int v = 0; v < 5; ++v) {
          CHECK(static_cast<double>(logits(static_cast<Eigen::Index>(t), v)) ==
                doctest::Approx(ref.logits[t][static_cast<size_t>(v)]).epsilon(1e-6));
        }
      }
    }
  }

  TEST_CASE("float scoring matches the softmax chain oracle") {
    LmConfig c = testutil::MicroConfig(12);
    LmModel m(c);
    FillRandom(m, 8, 0.5);
    Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
      auto ids = RandomIds(rng, 12, 2 + static_cast<int>(rng.UniformInt(14)));
      const double got = m.LogProb(ids);
      const double want = oracle::LogProb(c, m.params(), AsInts(ids));
      CHECK(std::abs(got - want) <= 1e-6 * std::abs(want));
    }
  }

  TEST_CASE("softmax rows sum to one") {
    LmModel m(testutil::MicroConfig(9));
    FillRandom(m, 4, 0.8);
    Rng rng(1);
    const auto logits = m.Logits(RandomIds(rng, 9, 12));
    for (Eigen::Index t = 0; t < logits.rows(); ++t) {
      const double mx = logits.row(t).maxCoeff();
      double z = 0.0;
      for (Eigen::Index j = 0; j < logits.cols(); ++j) z += std::exp(logits(t, j) - mx);
      double total = 0.0;
      for (Eigen::Index j = 0; j < logits.cols(); ++j) total += std::exp(logits(t, j) - mx) / z;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("causality: changing ids[t] leaves earlier logits unchanged") {
    Rng rng(12);
    for (int trial = 0; trial < 25; ++trial) {
      LmModel m(testutil::MicroConfig(7));
      FillRandom(m, 100 + static_cast<uint64_t>(trial), 0.6);
      auto ids = RandomIds(rng, 7, 3 + static_cast<int>(rng.UniformInt(13)));
      const auto before = m.Logits(ids);
      const size_t t = rng.UniformInt(ids.size());
      ids[t] = static_cast<TokenId>((ids[t] + 1 + rng.UniformInt(6)) % 7);
      const auto after = m.Logits(ids);
      for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(t); ++r) {
        CHECK((before.row(r) - after.row(r)).cwiseAbs().maxCoeff() == 0.0f);
      }
      if (t + 1 < ids.size()) {
        CHECK((before.row(static_cast<Eigen::Index>(t)) - after.row(static_cast<Eigen::Index>(t)))
                  .cwiseAbs()
                  .maxCoeff() > 0.0f);
      }
    }
  }

  TEST_CASE("scores do not depend on what else is scored") {
    const Tokenizer tok = ToyTokenizer();
    LmModel m(testutil::MicroConfig(static_cast<int>(tok.size())));
    m.InitRandom(3);
    const double alone = ScoreSequence(m, tok, "beta gamma").logprob;
    ScoreSequence(m, tok, "alpha beta gamma delta");
    ScoreSequence(m, tok, "gamma . delta");
    CHECK(ScoreSequence(m, tok, "beta gamma").logprob == alone);
  }

  TEST_CASE("long sequences and bad ids are rejected") {
    LmModel m(testutil::MicroConfig(5));
    const std::vector<TokenId> longer(17, 1);
    CHECK(testutil::CategoryOf([&] { m.Logits(longer); }) == ErrorCategory::kContext);
    const std::vector<TokenId> bad = {1, 5};
    CHECK(testutil::CategoryOf([&] { m.Logits(bad); }) == ErrorCategory::kVocabulary);
  }

  TEST_CASE("hidden states match the oracle at every layer") {
    LmConfig c = testutil::MicroConfig(6);
    Transformer<double> m(c);
    FillRandom(m, 21, 0.5);
    const std::vector<TokenId> ids = {1, 3, 4, 5, 2};
    const auto ref = oracle::Forward(c, m.params(), AsInts(ids));
    for (int layer = 0; layer <= c.n_layers; ++layer) {
      const auto h = m.HiddenStates(ids, layer);
      for (size_t t = 0; t < ids.size(); ++t) {
        for (int j = 0; j < c.d_model; ++j) {
          CHECK(h(static_cast<Eigen::Index>(t), j) ==
                doctest::Approx(ref.hidden[static_cast<size_t>(layer)][t][static_cast<size_t>(j)])
                    .epsilon(1e-9));
        }
      }
    }
    const auto last = m.HiddenStates(ids, kLastLayer);
    CHECK(last(2, 3) == doctest::Approx(ref.hidden.back()[2][3]).epsilon(1e-9));
    CHECK(testutil::CategoryOf([&] { m.HiddenStates(ids, 3); }) == ErrorCategory::kArgument);
    CHECK(testutil::CategoryOf([&] { m.HiddenStates(ids, -2); }) == ErrorCategory::kArgument);
  }

  TEST_CASE("representation of a single-token text is that token's hidden state") {
    const Tokenizer tok = ToyTokenizer();
    LmModel m(testutil::MicroConfig(static_cast<int>(tok.size())));
    FillRandom(m, 2, 0.4);
    const auto rep = ExtractRepresentation(m, tok, "gamma", kLastLayer);
    const auto h = m.HiddenStates(tok.Encode("gamma"), kLastLayer);
    for (int j = 0; j < 8; ++j) CHECK(rep(j) == static_cast<double>(h(1, j)));
  }

  TEST_CASE("representation is the mean of the per-token dump and is order-sensitive") {
    const Tokenizer tok = ToyTokenizer();
    LmConfig c = testutil::MicroConfig(static_cast<int>(tok.size()));
    LmModel m(c);
    FillRandom(m, 7, 0.4);
    for (int layer : {0, 1, 2, kLastLayer}) {
      const auto ids = tok.Encode("alpha beta gamma delta");
      const auto ref = oracle::Forward(c, m.params(), AsInts(ids));
      const auto& dump = layer == kLastLayer ? ref.hidden.back() : ref.hidden[static_cast<size_t>(layer)];
      const auto rep = ExtractRepresentation(m, tok, "alpha beta gamma delta", layer);
      for (int j = 0; j < c.d_model; ++j) {
        double mean = 0.0;
        for (size_t t = 1; t + 1 < ids.size(); ++t) mean += dump[t][static_cast<size_t>(j)];
        mean /= static_cast<double>(ids.size() - 2);
        CHECK(std::abs(rep(j) - mean) <= 1e-6 * std::max(1.0, std::abs(mean)));
      }
      const auto skipped = ExtractRepresentation(m, tok, "alpha beta gamma delta", layer, 2);
      double mean0 = 0.0;
      for (size_t t = 3; t + 1 < ids.size(); ++t) mean0 += dump[t][0];
      CHECK(std::abs(skipped(0) - mean0 / 2.0) <= 1e-6 * std::max(1.0, std::abs(mean0)));
    }
    const auto ab = ExtractRepresentation(m, tok, "alpha beta", kLastLayer);
    const auto ba = ExtractRepresentation(m, tok, "beta alpha", kLastLayer);
    CHECK((ab - ba).norm() > 1e-6);
    CHECK(testutil::CategoryOf([&] { ExtractRepresentation(m, tok, "alpha", kLastLayer, 1); }) ==
          ErrorCategory::kArgument);
    CHECK(testutil::CategoryOf([&] { ExtractRepresentation(m, tok, "alpha", 9); }) ==
          ErrorCategory::kArgument);
  }

  TEST_CASE("checkpoint round trip is bit-exact") {
    const Tokenizer tok = ToyTokenizer();
    LmModel m(testutil::MicroConfig(static_cast<int>(tok.size())));
    m.InitRandom(17);
    const std::string dir = testutil::TempDir("ckpt");
    nlohmann::ordered_json meta;
    meta["seed"] = 17;
    meta["epoch"] = 3;
    SaveCheckpoint(dir, m, tok, meta);
    const Checkpoint back = LoadCheckpoint(dir);
    CHECK(back.model.params() == m.params());
    CHECK(back.model.config() == m.config());
    CHECK(back.tokenizer.vocabulary() == tok.vocabulary());
    CHECK(back.metadata.at("epoch") == 3);
    CHECK(std::filesystem::file_size(dir + "/weights.f32") == 4 * m.parameter_count());
  }

  TEST_CASE("initialization is seeded and scaled") {
    LmModel a(testutil::MicroConfig(9)), b(testutil::MicroConfig(9)), c(testutil::MicroConfig(9));
    a.InitRandom(1);
    b.InitRandom(1);
    c.InitRandom(2);
    CHECK(a.params() == b.params());
    CHECK(a.params() != c.params());
    const auto& g = a.layout().Find("layer0.ln1_g");
    for (size_t i = 0; i < g.size(); ++i) CHECK(a.params()[g.offset + i] == 1.0f);
    const auto& bias = a.layout().Find("layer0.b_ff1");
    for (size_t i = 0; i < bias.size(); ++i) CHECK(a.params()[bias.offset + i] == 0.0f);
  }
}
