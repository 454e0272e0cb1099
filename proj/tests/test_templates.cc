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

#include <set>

#include "conflictlab/data_bundle.h"
#include "conflictlab/knowledge.h"
#include "conflictlab/random.h"
#include "conflictlab/templates.h"
#include "doctest.h"
#include "oracles.h"
#include "test_util.h"

using namespace conflictlab;

namespace {

const TemplatePack& Pack() { return testutil::Bundle().pack; }

KnowledgeRecord Olivia() {
  return {"Olivia Hamilton", {2012, 5, 29}, "Nanjing, China", "Stanford University", "Physics",
          "Google"};
}

// Alphabetic words of a text, in order.
std::vector<std::string> Words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

size_t SlotCount(const std::string& body) {
  size_t n = 0;
  for (const char* slot : kCoreSlots) {
    for (size_t p = body.find(slot); p != std::string::npos; p = body.find(slot, p + 1)) ++n;
  }
  return n;
}

void CheckRecovers(const Template& t, const Biography& b, const KnowledgeRecord& k) {
  const auto e = oracle::Extract(t, b.text);
  REQUIRE_MESSAGE(e.has_value(), t.id, ": ", b.text);
  CHECK(e->slots.at("name") == k.name);
  CHECK(e->slots.at("birth_date") == k.birth_date.ToString());
  CHECK(e->slots.at("birth_place") == k.birth_place);
  CHECK(e->slots.at("university") == k.university);
  CHECK(e->slots.at("major") == k.major);
  CHECK(e->slots.at("company") == k.company);
}

const char* kTinyPack =
    "id: t-1\nfeature: general\nkind: neutral\n---\n"
    "{name} was born on {birth_date} in {birth_place}. {name2}\n";

}  // namespace

TEST_SUITE("templates") {
  TEST_CASE("bundled pack has at least 50 templates per studied feature") {
    const auto counts = Pack().CountsPerFeature();
    for (const char* f : {"general", "poor_spelling", "newspaper", "novel", "scientific_report",
                          "social_media", "source_name_a", "source_name_b", "source_time_a",
                          "source_time_b", "textbook", "wikipedia", "blog", "diary", "interview",
                          "advertisement"}) {
      REQUIRE_MESSAGE(counts.count(f) == 1, f);
      CHECK_MESSAGE(counts.at(f) >= 50, f);
    }
    size_t styles = 0;
    for (const auto& f : Pack().features()) styles += f.kind == FeatureKind::kStyle ? 1 : 0;
    CHECK(styles >= 10);
  }

  TEST_CASE("feature kinds and prefixes agree") {
    for (const auto& t : Pack().templates()) {
      const auto kind = Pack().feature(t.feature).kind;
      CHECK_MESSAGE((kind == FeatureKind::kSyntheticSource) == (t.prefix != PrefixSlot::kNone), t.id);
      CHECK(SlotCount(t.body) == 6);
    }
  }

  TEST_CASE("empty pack is rejected") {
    try {
      ParsePack("# nothing here\n", "empty.txt");
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kValidation);
      CHECK(std::string(e.what()).find("no templates") != std::string::npos);
    }
  }

  TEST_CASE("missing slot is rejected naming the template") {
    const std::string text =
        "id: broken-7\nfeature: general\nkind: neutral\n---\n"
        "{name} was born on {birth_date} in {birth_place}, attended {university} and worked at "
        "{company}.\n";
    try {
      ParsePack(text, "p.txt");
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.category() == ErrorCategory::kValidation);
      CHECK(std::string(e.what()).find("broken-7") != std::string::npos);
    }
  }

  TEST_CASE("unknown slot, duplicate id and missing feature are rejected") {
    CHECK(testutil::CategoryOf([] { ParsePack(kTinyPack, "p.txt"); }) == ErrorCategory::kValidation);
    const std::string ok =
        "id: d-1\nfeature: general\nkind: neutral\n---\n"
        "{name} {birth_date} {birth_place} {university} {major} {company}.\n";
    CHECK_NOTHROW(ParsePack(ok, "p.txt"));
    CHECK(testutil::CategoryOf([&] { ParsePack(ok + "\n" + ok, "p.txt"); }) ==
          ErrorCategory::kValidation);
    const std::string no_feature =
        "id: d-2\nkind: neutral\n---\n{name} {birth_date} {birth_place} {university} {major} "
        "{company}.\n";
    CHECK(testutil::CategoryOf([&] { ParsePack(no_feature, "p.txt"); }) ==
          ErrorCategory::kValidation);
    const std::string prefix_on_style =
        "id: d-3\nfeature: novel\nkind: style\nprefix: vol\n---\n"
        "{name} {birth_date} {birth_place} {university} {major} {company}.\n";
    CHECK(testutil::CategoryOf([&] { ParsePack(prefix_on_style, "p.txt"); }) ==
          ErrorCategory::kValidation);
  }

  TEST_CASE("newspaper template renders the Olivia Hamilton opener") {
    const Template& t = Pack().Find("newspaper-001");
    const Biography b = Render(t, Olivia(), SourceAux{});
    CHECK(b.text.rfind("Born on May 29, 2012 in Nanjing, China, Olivia Hamilton embarked", 0) == 0);
    CHECK(b.template_id == "newspaper-001");
    CHECK(b.feature_id == "newspaper");
  }

  TEST_CASE("source prefixes are exact") {
    const Template& name_t = *Pack().ForFeature("source_name_a").front();
    SourceAux aux;
    aux.side = Side::kA;
    aux.newspaper = "The Morning Ledger";
    const Biography b = Render(name_t, Olivia(), aux);
    const Biography plain = Render(Pack().Find("general-001"), Olivia(), SourceAux{});
    CHECK(b.text.rfind("According to The Morning Ledger, ", 0) == 0);

    const Template& vol_t = *Pack().ForFeature("source_time_b").front();
    SourceAux vaux;
    vaux.side = Side::kB;
    vaux.vol = 4321;
    const Biography v = Render(vol_t, Olivia(), vaux);
    CHECK(v.text.rfind("According to Global News (Vol. 4321), ", 0) == 0);

    vaux.placement = SourcePlacement::kEnd;
    const Biography end = Render(vol_t, Olivia(), vaux);
    const std::string tail = " According to Global News (Vol. 4321).";
    REQUIRE(end.text.size() > tail.size());
    CHECK(end.text.substr(end.text.size() - tail.size()) == tail);
    (void)plain;
  }

  TEST_CASE("volume 1000 and missing source fields are rejected") {
    const Template& vol_a = *Pack().ForFeature("source_time_a").front();
    SourceAux aux;
    aux.side = Side::kA;
    aux.vol = 1000;
    CHECK(testutil::CategoryOf([&] { Render(vol_a, Olivia(), aux); }) == ErrorCategory::kArgument);
    aux.side = Side::kB;
    CHECK(testutil::CategoryOf([&] { Render(vol_a, Olivia(), aux); }) == ErrorCategory::kArgument);
    aux.vol.reset();
    CHECK(testutil::CategoryOf([&] { Render(vol_a, Olivia(), aux); }) == ErrorCategory::kArgument);
    const Template& name_a = *Pack().ForFeature("source_name_a").front();
    CHECK(testutil::CategoryOf([&] { Render(name_a, Olivia(), SourceAux{}); }) ==
          ErrorCategory::kArgument);
  }

  TEST_CASE("regex extraction recovers the record from every bundled template") {
    const auto& bundle = testutil::Bundle();
    const SourceSampler sampler(bundle);
    const auto ks = SampleKnowledgeSet(bundle.pools, 5, 31);
    Rng rng(4);
    for (const auto& t : Pack().templates()) {
      for (const auto& k : ks.records) {
        const Side side = rng.UniformInt(2) == 0 ? Side::kA : Side::kB;
        const SourceAux aux = t.prefix == PrefixSlot::kNone ? SourceAux{} : sampler.Draw(t, side, rng);
        CheckRecovers(t, Render(t, k, aux), k);
      }
    }
  }

  TEST_CASE("render is injective on records for a fixed template") {
    const auto ks = SampleKnowledgeSet(testutil::Bundle().pools, 200, 41);
    for (const char* id : {"general-001", "novel-010", "social_media-033"}) {
      std::set<std::string> texts;
      for (const auto& k : ks.records) texts.insert(Render(Pack().Find(id), k, {}).text);
      CHECK(texts.size() == ks.records.size());
    }
  }

  TEST_CASE("volume recovers the side label") {
    const auto& bundle = testutil::Bundle();
    const SourceSampler sampler(bundle);
    const auto ks = SampleKnowledgeSet(bundle.pools, 40, 2);
    Rng rng(9);
    size_t checked = 0;
    for (const char* feature : {"source_time_a", "source_time_b"}) {
      for (const Template* t : Pack().ForFeature(feature)) {
        for (const auto& k : ks.records) {
          const Side side = rng.UniformInt(2) == 0 ? Side::kA : Side::kB;
          const auto e = oracle::Extract(*t, Render(*t, k, sampler.Draw(*t, side, rng)).text);
          REQUIRE(e);
          REQUIRE(e->vol);
          CHECK((*e->vol < kVolPivot ? Side::kA : Side::kB) == side);
          ++checked;
        }
      }
    }
    CHECK(checked >= 4000);
  }

  TEST_CASE("newspaper sets are disjoint and 25 each") {
    const auto& b = testutil::Bundle();
    CHECK(b.newspapers_a.size() == 25);
    CHECK(b.newspapers_b.size() == 25);
    const std::set<std::string> a(b.newspapers_a.begin(), b.newspapers_a.end());
    for (const auto& n : b.newspapers_b) CHECK(a.count(n) == 0);
  }

  TEST_CASE("misspelling rate zero is the identity") {
    const Template& t = Pack().Find("general-004");
    const Template c = CorruptSpelling(t, 0.0, 5, testutil::Bundle().lexicon);
    CHECK(c.body == t.body);
  }

  TEST_CASE("misspelling at 0.15 alters about 15 percent of content words") {
    const auto& lex = testutil::Bundle().lexicon;
    size_t content = 0, changed = 0;
    for (const Template* t : Pack().ForFeature("general")) {
      const Template c = CorruptSpelling(*t, 0.15, 2, lex);
      const auto before = Words(t->body), after = Words(c.body);
      REQUIRE(before.size() == after.size());
      size_t diff = 0;
      for (size_t i = 0; i < before.size(); ++i) diff += before[i] != after[i] ? 1 : 0;
      const size_t words = CountContentWords(t->body);
      CHECK(diff == static_cast<size_t>(std::llround(0.15 * static_cast<double>(words))));
      content += words;
      changed += diff;
    }
    const double rate = static_cast<double>(changed) / static_cast<double>(content);
    CHECK(rate == doctest::Approx(0.15).epsilon(0.1));
  }

  TEST_CASE("misspelling is deterministic and never touches slots") {
    const auto& lex = testutil::Bundle().lexicon;
    const auto ks = SampleKnowledgeSet(testutil::Bundle().pools, 3, 8);
    for (const Template* t : Pack().ForFeature("general")) {
      const Template a = CorruptSpelling(*t, 1.0, 3, lex);
      const Template b = CorruptSpelling(*t, 1.0, 3, lex);
      CHECK(a.body == b.body);
      CHECK(SlotCount(a.body) == 6);
      for (const char* slot : kCoreSlots) CHECK(a.body.find(slot) != std::string::npos);
      for (const auto& k : ks.records) CheckRecovers(a, Render(a, k, {}), k);
    }
  }

  TEST_CASE("synthetic-source templates are not corrupted") {
    const Template& t = *Pack().ForFeature("source_name_a").front();
    CHECK(testutil::CategoryOf([&] { CorruptSpelling(t, 0.2, 1, testutil::Bundle().lexicon); }) ==
          ErrorCategory::kArgument);
  }

  TEST_CASE("lexicon lookups are case-insensitive") {
    MisspellingLexicon lex;
    lex.Add("Education", "edukashun");
    REQUIRE(lex.Find("education"));
    CHECK(*lex.Find("EDUCATION") == "edukashun");
    CHECK(!lex.Find("school"));
  }

  TEST_CASE("derived poor_spelling feature mirrors general") {
    CHECK(Pack().ForFeature("poor_spelling").size() == Pack().ForFeature("general").size());
    CHECK(Pack().feature("poor_spelling").kind == FeatureKind::kSpelling);
    CHECK(Pack().feature("general").kind == FeatureKind::kNeutral);
  }
}
