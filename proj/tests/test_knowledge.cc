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
#include <map>
#include <set>

#include "conflictlab/knowledge.h"
#include "doctest.h"
#include "test_util.h"

using namespace conflictlab;

namespace {

const AttributePools& Pools() { return testutil::Bundle().pools; }

// Frequency of every value of `a` over `records`, checked against the
// uniform expectation over `pool` at 5 standard deviations.
void CheckUniform(const std::vector<KnowledgeRecord>& records, Attribute a,
                  const std::vector<std::string>& pool) {
  std::map<std::string, size_t> counts;
  for (const auto& k : records) ++counts[k.Value(a)];
  const double n = static_cast<double>(records.size());
  const double p = 1.0 / static_cast<double>(pool.size());
  const double sigma = std::sqrt(n * p * (1.0 - p));
  for (const auto& v : pool) {
    const double c = static_cast<double>(counts[v]);
    CHECK_MESSAGE(std::abs(c - n * p) <= 5.0 * sigma, AttributeName(a), " value ", v, " seen ", c);
  }
}

}  // namespace

TEST_SUITE("knowledge") {
  TEST_CASE("bundled pools validate and hold 100 values per category") {
    const auto& pools = Pools();
    CHECK(pools.universities.size() == 100);
    CHECK(pools.majors.size() == 100);
    CHECK(pools.companies.size() == 100);
    CHECK(pools.birth_places.size() == 100);
    CHECK(pools.names.size() >= 1000);
    CHECK_NOTHROW(pools.Validate());
  }

  TEST_CASE("a thousand records with unique names") {
    const KnowledgeSet ks = SampleKnowledgeSet(Pools(), 1000, 7);
    REQUIRE(ks.records.size() == 1000);
    std::set<std::string> names;
    for (const auto& k : ks.records) {
      names.insert(k.name);
      CHECK_NOTHROW(ValidateRecord(k, Pools()));
    }
    CHECK(names.size() == 1000);
  }

  TEST_CASE("empty request gives an empty set") {
    CHECK(SampleKnowledgeSet(Pools(), 0, 0).records.empty());
  }

  TEST_CASE("sampling is deterministic byte for byte") {
    const auto a = SerializeKnowledgeSet(SampleKnowledgeSet(Pools(), 50, 3));
    const auto b = SerializeKnowledgeSet(SampleKnowledgeSet(Pools(), 50, 3));
    CHECK(a == b);
    CHECK(a != SerializeKnowledgeSet(SampleKnowledgeSet(Pools(), 50, 4)));
  }

  TEST_CASE("record i does not depend on the requested count") {
    const auto small = SampleKnowledgeSet(Pools(), 10, 11);
    const auto large = SampleKnowledgeSet(Pools(), 40, 11);
    for (size_t i = 0; i < 10; ++i) {
      CHECK(small.records[i].birth_date == large.records[i].birth_date);
      CHECK(small.records[i].university == large.records[i].university);
    }
  }

  TEST_CASE("too many names is a capacity error") {
    CHECK(testutil::CategoryOf([] { SampleKnowledgeSet(Pools(), Pools().names.size() + 1, 1); }) ==
          ErrorCategory::kCapacity);
  }

  TEST_CASE("dates stay on the 200 x 12 x 28 grid") {
    const auto ks = SampleKnowledgeSet(Pools(), 1000, 9);
    for (const auto& k : ks.records) {
      CHECK(k.birth_date.year >= kFirstBirthYear);
      CHECK(k.birth_date.year < kFirstBirthYear + kBirthYearSpan);
      CHECK(k.birth_date.month >= 1);
      CHECK(k.birth_date.month <= 12);
      CHECK(k.birth_date.day >= 1);
      CHECK(k.birth_date.day <= kMaxBirthDay);
    }
  }

  TEST_CASE("date formatting") {
    const Date d{2012, 5, 29};
    CHECK(d.ToString() == "May 29, 2012");
    CHECK(d.ToIso() == "2012-05-29");
    CHECK(Date::FromIso("2012-05-29") == d);
    CHECK(testutil::CategoryOf([] { Date::FromIso("2012/05/29"); }) == ErrorCategory::kValidation);
  }

  TEST_CASE("categorical marginals are uniform within 5 sigma over 10000 samples") {
    std::vector<KnowledgeRecord> all;
    for (uint64_t seed = 100; seed < 110; ++seed) {
      const auto ks = SampleKnowledgeSet(Pools(), 1000, seed);
      all.insert(all.end(), ks.records.begin(), ks.records.end());
    }
    REQUIRE(all.size() == 10000);
    CheckUniform(all, Attribute::kUniversity, Pools().universities);
    CheckUniform(all, Attribute::kMajor, Pools().majors);
    CheckUniform(all, Attribute::kCompany, Pools().companies);
    CheckUniform(all, Attribute::kBirthPlace, Pools().birth_places);
  }

  TEST_CASE("conflicts keep the name and change all five attributes") {
    const auto ks = SampleKnowledgeSet(Pools(), 1000, 21);
    for (size_t i = 0; i < ks.records.size(); ++i) {
      const auto& k = ks.records[i];
      const ConflictPair p = MakeConflict(Pools(), k, 1000 + i);
      CHECK(p.side_a == k);
      CHECK(p.side_b.name == k.name);
      for (Attribute a : kAllAttributes) {
        CHECK_MESSAGE(p.side_a.Value(a) != p.side_b.Value(a), k.name, " ", AttributeName(a));
      }
      CHECK_NOTHROW(ValidateRecord(p.side_b, Pools()));
    }
  }

  TEST_CASE("conflicts are deterministic per seed and vary across seeds") {
    const auto k = SampleKnowledgeSet(Pools(), 1, 5).records[0];
    CHECK(MakeConflict(Pools(), k, 1).side_b == MakeConflict(Pools(), k, 1).side_b);
    size_t differing = 0;
    for (uint64_t s = 2; s < 12; ++s) {
      differing += !(MakeConflict(Pools(), k, 1).side_b == MakeConflict(Pools(), k, s).side_b);
    }
    CHECK(differing >= 9);
  }

  TEST_CASE("mutual conflicts differ pairwise") {
    const auto k = SampleKnowledgeSet(Pools(), 1, 8).records[0];
    const auto variants = MakeMutualConflicts(Pools(), k, 10, 4);
    REQUIRE(variants.size() == 10);
    for (size_t i = 0; i < variants.size(); ++i) {
      for (size_t j = i + 1; j < variants.size(); ++j) {
        CHECK(AllAttributesDiffer(variants[i], variants[j]));
      }
    }
  }

  TEST_CASE("evidence/test split sizes") {
    const auto ks = SampleKnowledgeSet(Pools(), 1000, 5);
    const auto split = SplitEvidenceTest(ks, 0.2, 5);
    CHECK(split.evidence.records.size() == 800);
    CHECK(split.test.records.size() == 200);

    const auto two = SampleKnowledgeSet(Pools(), 2, 0);
    const auto s2 = SplitEvidenceTest(two, 0.5, 0);
    CHECK(s2.evidence.records.size() == 1);
    CHECK(s2.test.records.size() == 1);
  }

  TEST_CASE("the split is a partition") {
    const auto ks = SampleKnowledgeSet(Pools(), 137, 12);
    const auto split = SplitEvidenceTest(ks, 0.3, 2);
    std::set<std::string> ev, te, all;
    for (const auto& k : split.evidence.records) ev.insert(k.name);
    for (const auto& k : split.test.records) te.insert(k.name);
    for (const auto& k : ks.records) all.insert(k.name);
    for (const auto& n : te) CHECK(ev.count(n) == 0);
    std::set<std::string> uni = ev;
    uni.insert(te.begin(), te.end());
    CHECK(uni == all);
    CHECK(ev.size() + te.size() == ks.records.size());
  }

  TEST_CASE("a split leaving one side empty is an argument error") {
    const auto ks = SampleKnowledgeSet(Pools(), 3, 1);
    CHECK(testutil::CategoryOf([&] { SplitEvidenceTest(ks, 0.01, 0); }) == ErrorCategory::kArgument);
    CHECK(testutil::CategoryOf([&] { SplitEvidenceTest(ks, 0.99, 0); }) == ErrorCategory::kArgument);
    const auto one = SampleKnowledgeSet(Pools(), 1, 1);
    CHECK(testutil::CategoryOf([&] { SplitEvidenceTest(one, 0.5, 0); }) == ErrorCategory::kArgument);
  }

  TEST_CASE("knowledge sets and conflict pairs round-trip through JSONL") {
    const std::string dir = testutil::TempDir("knowledge-io");
    const auto ks = SampleKnowledgeSet(Pools(), 25, 77);
    WriteKnowledgeSet(dir + "/ks.jsonl", ks);
    const auto back = ReadKnowledgeSet(dir + "/ks.jsonl");
    CHECK(back.records == ks.records);

    std::vector<ConflictPair> pairs;
    for (const auto& k : ks.records) pairs.push_back(MakeConflict(Pools(), k, 3));
    WriteConflictPairs(dir + "/pairs.jsonl", pairs);
    const auto pb = ReadConflictPairs(dir + "/pairs.jsonl");
    REQUIRE(pb.size() == pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
      CHECK(pb[i].side_a == pairs[i].side_a);
      CHECK(pb[i].side_b == pairs[i].side_b);
    }
  }

  TEST_CASE("serialized records use a fixed field order") {
    KnowledgeRecord k{"Olivia Hamilton", {1912, 5, 29}, "Nanjing, China", "Stanford University",
                      "Physics", "Google"};
    const auto j = RecordToJson(k).dump();
    CHECK(j.find("\"name\"") < j.find("\"birth_date\""));
    CHECK(j.find("\"birth_date\"") < j.find("\"birth_place\""));
    CHECK(j.find("\"major\"") < j.find("\"company\""));
    CHECK(RecordFromJson(RecordToJson(k)) == k);
  }

  TEST_CASE("correlation table parsing rejects unknown values") {
    AttributePools pools = Pools();
    CHECK(testutil::CategoryOf([&] {
            ParseCorrelationTable("@university->major\nStanford University => Alchemy\n", pools);
            pools.Validate();
          }) == ErrorCategory::kValidation);
  }
}
