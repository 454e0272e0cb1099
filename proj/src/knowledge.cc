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

#include "conflictlab/knowledge.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "conflictlab/digest.h"
#include "conflictlab/error.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"

namespace conflictlab {
namespace {

constexpr std::array<const char*, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

constexpr size_t kCategoricalPoolSize = 100;

Date DrawDate(Rng& rng) {
  Date d;
  d.year = kFirstBirthYear + static_cast<int>(rng.UniformInt(kBirthYearSpan));
  d.month = 1 + static_cast<int>(rng.UniformInt(12));
  d.day = 1 + static_cast<int>(rng.UniformInt(kMaxBirthDay));
  return d;
}

const std::string& Draw(Rng& rng, const std::vector<std::string>& pool) {
  return pool[rng.UniformInt(pool.size())];
}

// Redraws from `pool` until `accept` holds.
template <typename Accept>
const std::string& DrawUntil(Rng& rng, const std::vector<std::string>& pool,
                             Accept accept, const char* what) {
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    const std::string& v = Draw(rng, pool);
    if (accept(v)) return v;
  }
  throw Error(ErrorCategory::kCapacity,
              std::string("no alternative value found for ") + what);
}

template <typename Accept>
Date DrawDateUntil(Rng& rng, Accept accept) {
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    const Date d = DrawDate(rng);
    if (accept(d)) return d;
  }
  throw Error(ErrorCategory::kCapacity, "no alternative birth date found");
}

void CheckPool(const std::vector<std::string>& pool, const char* what,
               bool fixed_size) {
  std::set<std::string> seen;
  for (const auto& v : pool) {
    if (v.empty()) {
      throw Error(ErrorCategory::kValidation, std::string(what) + " pool has an empty entry");
    }
    if (!seen.insert(v).second) {
      throw Error(ErrorCategory::kValidation,
                  std::string(what) + " pool repeats '" + v + "'");
    }
  }
  if (fixed_size && pool.size() != kCategoricalPoolSize) {
    throw Error(ErrorCategory::kValidation,
                std::string(what) + " pool has " + std::to_string(pool.size()) +
                    " entries, expected 100");
  }
}

void CheckTable(const CorrelationTable& table,
                const std::vector<std::string>& keys,
                const std::vector<std::string>& values, const char* what) {
  const std::set<std::string> value_set(values.begin(), values.end());
  for (const auto& key : keys) {
    const auto& allowed = table.Allowed(key);
    if (allowed.empty()) {
      throw Error(ErrorCategory::kValidation,
                  std::string(what) + " table has no entry for '" + key + "'");
    }
    for (const auto& v : allowed) {
      if (!value_set.count(v)) {
        throw Error(ErrorCategory::kValidation, std::string(what) +
                                                    " table names unknown value '" +
                                                    v + "'");
      }
    }
  }
}

}  // namespace

const char* AttributeName(Attribute a) {
  switch (a) {
    case Attribute::kBirthDate: return "birth_date";
    case Attribute::kBirthPlace: return "birth_place";
    case Attribute::kUniversity: return "university";
    case Attribute::kMajor: return "major";
    case Attribute::kCompany: return "company";
  }
  return "unknown";
}

Attribute ParseAttribute(const std::string& name) {
  for (Attribute a : kAllAttributes) {
    if (name == AttributeName(a)) return a;
  }
  throw Error(ErrorCategory::kValidation, "unknown attribute '" + name + "'");
}

std::string Date::ToString() const {
  if (month < 1 || month > 12) {
    throw Error(ErrorCategory::kValidation, "month out of range: " + std::to_string(month));
  }
  return std::string(kMonths[month - 1]) + " " + std::to_string(day) + ", " +
         std::to_string(year);
}

std::string Date::ToIso() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::FromIso(const std::string& iso) {
  Date d;
  if (std::sscanf(iso.c_str(), "%d-%d-%d", &d.year, &d.month, &d.day) != 3) {
    throw Error(ErrorCategory::kValidation, "malformed date '" + iso + "'");
  }
  return d;
}

std::string KnowledgeRecord::Value(Attribute a) const {
  switch (a) {
    case Attribute::kBirthDate: return birth_date.ToString();
    case Attribute::kBirthPlace: return birth_place;
    case Attribute::kUniversity: return university;
    case Attribute::kMajor: return major;
    case Attribute::kCompany: return company;
  }
  return "";
}

void CorrelationTable::Allow(const std::string& key,
                             std::vector<std::string> values) {
  allowed_[key] = std::move(values);
}

const std::vector<std::string>& CorrelationTable::Allowed(
    const std::string& key) const {
  static const std::vector<std::string> kNone;
  const auto it = allowed_.find(key);
  return it == allowed_.end() ? kNone : it->second;
}

bool CorrelationTable::Permits(const std::string& key,
                               const std::string& value) const {
  const auto& allowed = Allowed(key);
  return std::find(allowed.begin(), allowed.end(), value) != allowed.end();
}

const std::vector<std::string>& AttributePools::Pool(Attribute a) const {
  switch (a) {
    case Attribute::kBirthPlace: return birth_places;
    case Attribute::kUniversity: return universities;
    case Attribute::kMajor: return majors;
    case Attribute::kCompany: return companies;
    case Attribute::kBirthDate: break;
  }
  throw Error(ErrorCategory::kArgument, "birth dates are drawn from a grid, not a pool");
}

void AttributePools::Validate() const {
  CheckPool(names, "name", /*fixed_size=*/false);
  CheckPool(birth_places, "birth_place", true);
  CheckPool(universities, "university", true);
  CheckPool(majors, "major", true);
  CheckPool(companies, "company", true);
  CheckTable(university_majors, universities, majors, "university->major");
  CheckTable(company_places, companies, birth_places, "company->birth_place");
}

void ParseCorrelationTable(const std::string& text, AttributePools& pools) {
  std::istringstream in(text);
  std::string line;
  CorrelationTable* current = nullptr;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("version:", 0) == 0) {
      pools.version = Trim(line.substr(8));
      continue;
    }
    if (line[0] == '@') {
      if (line == "@university->major") {
        current = &pools.university_majors;
      } else if (line == "@company->birth_place") {
        current = &pools.company_places;
      } else {
        throw Error(ErrorCategory::kValidation,
                    "correlation table: unknown section " + line);
      }
      continue;
    }
    const auto arrow = line.find("=>");
    if (current == nullptr || arrow == std::string::npos) {
      throw Error(ErrorCategory::kValidation,
                  "correlation table line " + std::to_string(lineno) + " is malformed");
    }
    std::vector<std::string> values;
    for (const auto& v : Split(line.substr(arrow + 2), '|')) {
      const std::string t = Trim(v);
      if (!t.empty()) values.push_back(t);
    }
    current->Allow(Trim(line.substr(0, arrow)), std::move(values));
  }
}

AttributePools LoadAttributePools(const std::string& dir) {
  AttributePools pools;
  pools.names = ReadLines(JoinPath(dir, "names.txt"));
  pools.birth_places = ReadLines(JoinPath(dir, "birth_places.txt"));
  pools.universities = ReadLines(JoinPath(dir, "universities.txt"));
  pools.majors = ReadLines(JoinPath(dir, "majors.txt"));
  pools.companies = ReadLines(JoinPath(dir, "companies.txt"));
  ParseCorrelationTable(ReadFile(JoinPath(dir, "correlation.txt")), pools);
  pools.Validate();
  return pools;
}

void ValidateRecord(const KnowledgeRecord& k, const AttributePools& pools) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCategory::kValidation, "record '" + k.name + "': " + why);
  };
  if (k.name.empty() || k.birth_place.empty() || k.university.empty() ||
      k.major.empty() || k.company.empty()) {
    fail("empty attribute");
  }
  const Date& d = k.birth_date;
  if (d.year < kFirstBirthYear || d.year >= kFirstBirthYear + kBirthYearSpan) {
    fail("birth year outside the sampling span");
  }
  if (d.month < 1 || d.month > 12) fail("month out of range");
  if (d.day < 1 || d.day > kMaxBirthDay) fail("day out of range");
  if (!pools.university_majors.Permits(k.university, k.major)) {
    fail("major not offered by university");
  }
  if (!pools.company_places.Permits(k.company, k.birth_place)) {
    fail("company not present in birth place");
  }
}

KnowledgeSet SampleKnowledgeSet(const AttributePools& pools, size_t count,
                                uint64_t seed) {
  if (count > pools.names.size()) {
    throw Error(ErrorCategory::kCapacity,
                "requested " + std::to_string(count) + " characters but the name pool has " +
                    std::to_string(pools.names.size()));
  }
  KnowledgeSet ks;
  ks.seed = seed;
  Rng name_rng(DeriveSeed(seed, "names"));
  const auto name_idx = name_rng.SampleWithoutReplacement(pools.names.size(), count);
  ks.records.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Rng rng(DeriveSeed(seed, "record", i));
    KnowledgeRecord k;
    k.name = pools.names[name_idx[i]];
    k.birth_date = DrawDate(rng);
    k.university = Draw(rng, pools.universities);
    k.major = Draw(rng, pools.university_majors.Allowed(k.university));
    k.company = Draw(rng, pools.companies);
    k.birth_place = Draw(rng, pools.company_places.Allowed(k.company));
    ks.records.push_back(std::move(k));
  }
  return ks;
}

bool AllAttributesDiffer(const KnowledgeRecord& a, const KnowledgeRecord& b) {
  for (Attribute attr : kAllAttributes) {
    if (a.Value(attr) == b.Value(attr)) return false;
  }
  return true;
}

ConflictPair MakeConflict(const AttributePools& pools, const KnowledgeRecord& k,
                          uint64_t seed) {
  auto variants = MakeMutualConflicts(pools, k, 2, seed);
  return ConflictPair{std::move(variants[0]), std::move(variants[1])};
}

std::vector<KnowledgeRecord> MakeMutualConflicts(const AttributePools& pools,
                                                 const KnowledgeRecord& k,
                                                 size_t count, uint64_t seed) {
  std::vector<KnowledgeRecord> out;
  if (count == 0) return out;
  out.push_back(k);
  Rng rng(DeriveSeed(seed, "conflict:" + k.name));
  auto unused = [&](Attribute a) {
    return [&out, a](const std::string& v) {
      for (const auto& prev : out) {
        if (prev.Value(a) == v) return false;
      }
      return true;
    };
  };
  while (out.size() < count) {
    KnowledgeRecord next;
    next.name = k.name;
    next.birth_date = DrawDateUntil(rng, [&](const Date& d) {
      const std::string s = d.ToString();
      for (const auto& prev : out) {
        if (prev.birth_date.ToString() == s) return false;
      }
      return true;
    });
    next.university = DrawUntil(rng, pools.universities,
                                unused(Attribute::kUniversity), "university");
    next.major = DrawUntil(rng, pools.university_majors.Allowed(next.university),
                           unused(Attribute::kMajor), "major");
    next.company = DrawUntil(rng, pools.companies, unused(Attribute::kCompany),
                             "company");
    next.birth_place = DrawUntil(rng, pools.company_places.Allowed(next.company),
                                 unused(Attribute::kBirthPlace), "birth_place");
    out.push_back(std::move(next));
  }
  return out;
}

EvidenceTestSplit SplitEvidenceTest(const KnowledgeSet& ks,
                                    double test_fraction, uint64_t seed) {
  const size_t count = ks.records.size();
  if (count < 2) {
    throw Error(ErrorCategory::kArgument, "evidence/test split needs at least 2 records");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCategory::kArgument, "test fraction must lie in (0, 1)");
  }
  const auto test_size =
      static_cast<size_t>(std::llround(test_fraction * static_cast<double>(count)));
  if (test_size == 0 || test_size == count) {
    throw Error(ErrorCategory::kArgument,
                "test fraction " + std::to_string(test_fraction) + " leaves one side empty for " +
                    std::to_string(count) + " records");
  }
  Rng rng(DeriveSeed(seed, "split"));
  std::vector<size_t> order(count);
  for (size_t i = 0; i < count; ++i) order[i] = i;
  rng.Shuffle(order);
  std::vector<size_t> test_idx(order.begin(), order.begin() + static_cast<long>(test_size));
  std::vector<size_t> evidence_idx(order.begin() + static_cast<long>(test_size), order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(evidence_idx.begin(), evidence_idx.end());

  EvidenceTestSplit split;
  split.evidence.seed = DeriveSeed(seed, "evidence");
  split.test.seed = DeriveSeed(seed, "test");
  for (size_t i : evidence_idx) split.evidence.records.push_back(ks.records[i]);
  for (size_t i : test_idx) split.test.records.push_back(ks.records[i]);
  return split;
}

nlohmann::ordered_json RecordToJson(const KnowledgeRecord& k) {
  nlohmann::ordered_json j;
  j["name"] = k.name;
  j["birth_date"] = k.birth_date.ToIso();
  j["birth_place"] = k.birth_place;
  j["university"] = k.university;
  j["major"] = k.major;
  j["company"] = k.company;
  return j;
}

KnowledgeRecord RecordFromJson(const nlohmann::ordered_json& j) {
  try {
    KnowledgeRecord k;
    k.name = j.at("name").get<std::string>();
    k.birth_date = Date::FromIso(j.at("birth_date").get<std::string>());
    k.birth_place = j.at("birth_place").get<std::string>();
    k.university = j.at("university").get<std::string>();
    k.major = j.at("major").get<std::string>();
    k.company = j.at("company").get<std::string>();
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, std::string("knowledge record: ") + e.what());
  }
}

std::string SerializeKnowledgeSet(const KnowledgeSet& ks) {
  std::string out;
  for (const auto& k : ks.records) {
    out += RecordToJson(k).dump();
    out += '\n';
  }
  return out;
}

void WriteKnowledgeSet(const std::string& path, const KnowledgeSet& ks) {
  WriteFile(path, SerializeKnowledgeSet(ks));
}

KnowledgeSet ReadKnowledgeSet(const std::string& path) {
  KnowledgeSet ks;
  for (const auto& row : ReadJsonl(path)) ks.records.push_back(RecordFromJson(row));
  return ks;
}

void WriteConflictPairs(const std::string& path,
                        const std::vector<ConflictPair>& pairs) {
  std::vector<nlohmann::ordered_json> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["side_a"] = RecordToJson(p.side_a);
    j["side_b"] = RecordToJson(p.side_b);
    rows.push_back(std::move(j));
  }
  WriteJsonl(path, rows);
}

std::vector<ConflictPair> ReadConflictPairs(const std::string& path) {
  std::vector<ConflictPair> pairs;
  for (const auto& row : ReadJsonl(path)) {
    if (!row.contains("side_a") || !row.contains("side_b")) {
      throw Error(ErrorCategory::kValidation, path + ": conflict pair without both sides");
    }
    pairs.push_back({RecordFromJson(row["side_a"]), RecordFromJson(row["side_b"])});
  }
  return pairs;
}

}  // namespace conflictlab
