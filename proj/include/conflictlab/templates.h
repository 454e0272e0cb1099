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

#ifndef CONFLICTLAB_TEMPLATES_H_
#define CONFLICTLAB_TEMPLATES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conflictlab/knowledge.h"

namespace conflictlab {

enum class FeatureKind { kStyle, kSpelling, kSyntheticSource, kNeutral };

const char* FeatureKindName(FeatureKind kind);
FeatureKind ParseFeatureKind(const std::string& name);

struct Feature {
  std::string id;
  FeatureKind kind = FeatureKind::kStyle;
};

// Prefix carried by synthetic-source templates.
enum class PrefixSlot { kNone, kNewspaper, kVol };

struct Template {
  std::string id;
  std::string feature;
  std::string body;
  PrefixSlot prefix = PrefixSlot::kNone;
};

enum class Side { kA, kB, kNeutral };

const char* SideName(Side side);
Side ParseSide(const std::string& name);

struct Biography {
  std::string text;
  std::string knowledge_id;
  std::string template_id;
  std::string feature_id;
  Side side = Side::kNeutral;
};

// Core slots, each appearing exactly once in every template body.
inline constexpr std::array<const char*, 6> kCoreSlots = {
    "{name}", "{birth_date}", "{birth_place}", "{university}", "{major}", "{company}"};

// Synthetic source-time volumes: side A below the pivot, side B above it.
inline constexpr int kVolPivot = 1000;
inline constexpr int kMinVolA = 1;
inline constexpr int kMaxVolA = 999;
inline constexpr int kMinVolB = 1001;
inline constexpr int kMaxVolB = 9999;

enum class SourcePlacement { kBeginning, kEnd };

struct SourceAux {
  Side side = Side::kNeutral;
  std::optional<std::string> newspaper;
  std::optional<int> vol;
  SourcePlacement placement = SourcePlacement::kBeginning;
};

class TemplatePack {
 public:
  // Validates and appends; throws kValidation naming the template id.
  void AddFeature(const Feature& feature);
  void AddTemplate(Template t);

  const Feature& feature(const std::string& id) const;
  bool has_feature(const std::string& id) const { return features_.count(id) > 0; }
  const std::vector<Template>& templates() const { return templates_; }
  const Template& Find(const std::string& id) const;

  // Templates of one feature, in pack order.
  std::vector<const Template*> ForFeature(const std::string& feature_id) const;
  std::map<std::string, size_t> CountsPerFeature() const;
  std::vector<Feature> features() const;

  std::string version;

 private:
  std::map<std::string, Feature> features_;
  std::vector<Template> templates_;
  std::map<std::string, size_t> index_;
};

// Throws kValidation unless every core slot occurs exactly once, no unknown
// {slot} occurs, and the prefix matches the feature kind.
void ValidateTemplate(const Template& t, const Feature& feature);

// Pack file: documents of `id:`, `feature:`, `kind:` (and `prefix:` for
// synthetic sources) header lines, a `---` line, then the body up to the
// next blank line.
TemplatePack ParsePack(const std::string& text, const std::string& source_name);
TemplatePack LoadPack(const std::string& path);

// Fills every slot. Synthetic-source templates get the source prefix
// ("According to <newspaper>, " or "According to Global News (Vol. <vol>), ")
// at the beginning, or the equivalent sentence at the end.
Biography Render(const Template& t, const KnowledgeRecord& k, const SourceAux& aux);

std::string SourcePrefix(const Template& t, const SourceAux& aux);

class MisspellingLexicon {
 public:
  static MisspellingLexicon Load(const std::string& path);
  void Add(const std::string& word, const std::string& misspelled);
  // Lowercase lookup; nullopt when the word has no entry.
  std::optional<std::string> Find(const std::string& word) const;
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
};

// Content words: alphabetic runs of length >= 3 outside slots.
size_t CountContentWords(const std::string& body);

// Misspells round(rate * content words) of the body's content words, chosen
// by a seeded shuffle; lexicon entries first, rule-based character edits
// otherwise. Slots are never touched.
Template CorruptSpelling(const Template& t, double rate, uint64_t seed,
                         const MisspellingLexicon& lexicon);

// Registers `feature_id` (kind spelling) with one corrupted copy of every
// template of `base_feature`.
void AddCorruptedFeature(TemplatePack& pack, const std::string& feature_id,
                         const std::string& base_feature, double rate,
                         uint64_t seed, const MisspellingLexicon& lexicon);

}  // namespace conflictlab

#endif  // CONFLICTLAB_TEMPLATES_H_
