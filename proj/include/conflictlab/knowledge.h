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

#ifndef CONFLICTLAB_KNOWLEDGE_H_
#define CONFLICTLAB_KNOWLEDGE_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace conflictlab {

// Birth years span [kFirstBirthYear, kFirstBirthYear + kBirthYearSpan).
inline constexpr int kFirstBirthYear = 1800;
inline constexpr int kBirthYearSpan = 200;
inline constexpr int kMaxBirthDay = 28;

// Rejection budget for drawing an alternative attribute value.
inline constexpr int kMaxResampleAttempts = 1000;

enum class Attribute { kBirthDate, kBirthPlace, kUniversity, kMajor, kCompany };

inline constexpr std::array<Attribute, 5> kAllAttributes = {
    Attribute::kBirthDate, Attribute::kBirthPlace, Attribute::kUniversity,
    Attribute::kMajor, Attribute::kCompany};

// "birth_date", "birth_place", ...
const char* AttributeName(Attribute a);
Attribute ParseAttribute(const std::string& name);

struct Date {
  int year = kFirstBirthYear;
  int month = 1;
  int day = 1;

  // "May 29, 2012"
  std::string ToString() const;
  // "2012-05-29"
  std::string ToIso() const;
  static Date FromIso(const std::string& iso);

  friend bool operator==(const Date&, const Date&) = default;
};

struct KnowledgeRecord {
  std::string name;
  Date birth_date;
  std::string birth_place;
  std::string university;
  std::string major;
  std::string company;

  // Rendered surface form of one attribute.
  std::string Value(Attribute a) const;

  friend bool operator==(const KnowledgeRecord&, const KnowledgeRecord&) = default;
};

struct KnowledgeSet {
  std::vector<KnowledgeRecord> records;
  uint64_t seed = 0;
};

struct ConflictPair {
  KnowledgeRecord side_a;
  KnowledgeRecord side_b;
};

struct EvidenceTestSplit {
  KnowledgeSet evidence;
  KnowledgeSet test;
};

// Many-to-many allow-list: key -> admissible values.
class CorrelationTable {
 public:
  void Allow(const std::string& key, std::vector<std::string> values);
  const std::vector<std::string>& Allowed(const std::string& key) const;
  bool Permits(const std::string& key, const std::string& value) const;
  size_t size() const { return allowed_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> allowed_;
};

struct AttributePools {
  std::vector<std::string> names;
  std::vector<std::string> birth_places;
  std::vector<std::string> universities;
  std::vector<std::string> majors;
  std::vector<std::string> companies;
  CorrelationTable university_majors;
  CorrelationTable company_places;
  std::string version;

  // Throws kValidation on duplicate values, non-100-entry categorical pools,
  // or correlation keys/values missing from the pools.
  void Validate() const;

  const std::vector<std::string>& Pool(Attribute a) const;
};

// Reads names.txt, birth_places.txt, universities.txt, majors.txt,
// companies.txt and correlation.txt from `dir`.
AttributePools LoadAttributePools(const std::string& dir);

// Parses the flat correlation format:
//   @university->major
//   Stanford University => Computer Science | Physics | ...
void ParseCorrelationTable(const std::string& text, AttributePools& pools);

// Throws kValidation if the record breaks a KnowledgeRecord invariant.
void ValidateRecord(const KnowledgeRecord& k, const AttributePools& pools);

// Records are a deterministic function of (pools, count, seed). Names are
// drawn without replacement; each record's attributes come from its own
// derived stream, so record i does not depend on count.
KnowledgeSet SampleKnowledgeSet(const AttributePools& pools, size_t count,
                                uint64_t seed);

// side_a is `k`; side_b keeps the name and redraws every attribute until it
// differs from side_a, respecting the correlation table.
ConflictPair MakeConflict(const AttributePools& pools, const KnowledgeRecord& k,
                          uint64_t seed);

// `count` records for one name, pairwise different in every attribute.
std::vector<KnowledgeRecord> MakeMutualConflicts(const AttributePools& pools,
                                                 const KnowledgeRecord& k,
                                                 size_t count, uint64_t seed);

bool AllAttributesDiffer(const KnowledgeRecord& a, const KnowledgeRecord& b);

EvidenceTestSplit SplitEvidenceTest(const KnowledgeSet& ks,
                                    double test_fraction, uint64_t seed);

nlohmann::ordered_json RecordToJson(const KnowledgeRecord& k);
KnowledgeRecord RecordFromJson(const nlohmann::ordered_json& j);

// One record per line, fixed field order.
std::string SerializeKnowledgeSet(const KnowledgeSet& ks);
void WriteKnowledgeSet(const std::string& path, const KnowledgeSet& ks);
KnowledgeSet ReadKnowledgeSet(const std::string& path);

void WriteConflictPairs(const std::string& path,
                        const std::vector<ConflictPair>& pairs);
std::vector<ConflictPair> ReadConflictPairs(const std::string& path);

}  // namespace conflictlab

#endif  // CONFLICTLAB_KNOWLEDGE_H_
