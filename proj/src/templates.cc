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

#include "conflictlab/templates.h"

#include <cctype>
#include <cmath>
#include <sstream>

#include "conflictlab/error.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"

namespace conflictlab {
namespace {

size_t CountOccurrences(const std::string& haystack, const std::string& needle) {
  size_t count = 0;
  for (size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

void ReplaceAll(std::string& s, const std::string& from, const std::string& to) {
  for (size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool IsVowel(char c) {
  switch (std::tolower(static_cast<unsigned char>(c))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    default: return false;
  }
}

// Body split into slots, words and everything else.
struct Segment {
  enum Kind { kSlot, kWord, kOther } kind;
  std::string text;
};

std::vector<Segment> SegmentBody(const std::string& body) {
  std::vector<Segment> out;
  size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      const size_t close = body.find('}', i);
      const size_t end = close == std::string::npos ? body.size() : close + 1;
      out.push_back({Segment::kSlot, body.substr(i, end - i)});
      i = end;
    } else if (IsAlpha(body[i])) {
      size_t j = i;
      while (j < body.size() && IsAlpha(body[j])) ++j;
      out.push_back({Segment::kWord, body.substr(i, j - i)});
      i = j;
    } else {
      size_t j = i;
      while (j < body.size() && body[j] != '{' && !IsAlpha(body[j])) ++j;
      out.push_back({Segment::kOther, body.substr(i, j - i)});
      i = j;
    }
  }
  return out;
}

bool IsContentWord(const Segment& s) {
  return s.kind == Segment::kWord && s.text.size() >= 3;
}

std::string MatchCase(const std::string& original, std::string replacement) {
  if (!original.empty() && !replacement.empty() &&
      std::isupper(static_cast<unsigned char>(original[0]))) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

// One rule-based character edit; always returns a different string.
std::string RuleEdit(const std::string& word, Rng& rng) {
  std::vector<std::string> candidates;
  const size_t n = word.size();
  for (size_t i = 1; i + 1 < n; ++i) {
    if (word[i] == word[i + 1]) {
      candidates.push_back(word.substr(0, i) + word.substr(i + 1));  // drop a double
    }
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (!IsVowel(word[i]) && word[i] != word[i - 1] && word[i] != word[i + 1]) {
      candidates.push_back(word.substr(0, i + 1) + word[i] + word.substr(i + 1));
    }
  }
  for (size_t i = 1; i + 2 < n; ++i) {
    if (word[i] != word[i + 1]) {
      std::string s = word;
      std::swap(s[i], s[i + 1]);
      candidates.push_back(s);
    }
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    if (IsVowel(word[i]) && !IsVowel(word[i - 1])) {
      candidates.push_back(word.substr(0, i) + word.substr(i + 1));  // drop a vowel
    }
  }
  const auto ph = word.find("ph");
  if (ph != std::string::npos) candidates.push_back(word.substr(0, ph) + "f" + word.substr(ph + 2));
  const auto tion = word.find("tion");
  if (tion != std::string::npos) {
    candidates.push_back(word.substr(0, tion) + "shun" + word.substr(tion + 4));
  }
  std::vector<std::string> changed;
  for (auto& c : candidates) {
    if (c != word) changed.push_back(std::move(c));
  }
  if (changed.empty()) return word + word.back();
  return changed[rng.UniformInt(changed.size())];
}

}  // namespace

const char* FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kStyle: return "style";
    case FeatureKind::kSpelling: return "spelling";
    case FeatureKind::kSyntheticSource: return "synthetic_source";
    case FeatureKind::kNeutral: return "neutral";
  }
  return "style";
}

FeatureKind ParseFeatureKind(const std::string& name) {
  if (name == "style") return FeatureKind::kStyle;
  if (name == "spelling") return FeatureKind::kSpelling;
  if (name == "synthetic_source") return FeatureKind::kSyntheticSource;
  if (name == "neutral") return FeatureKind::kNeutral;
  throw Error(ErrorCategory::kValidation, "unknown feature kind '" + name + "'");
}

const char* SideName(Side side) {
  switch (side) {
    case Side::kA: return "A";
    case Side::kB: return "B";
    case Side::kNeutral: return "neutral";
  }
  return "neutral";
}

Side ParseSide(const std::string& name) {
  if (name == "A") return Side::kA;
  if (name == "B") return Side::kB;
  if (name == "neutral") return Side::kNeutral;
  throw Error(ErrorCategory::kValidation, "unknown side '" + name + "'");
}

void ValidateTemplate(const Template& t, const Feature& feature) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCategory::kValidation, "template '" + t.id + "': " + why);
  };
  if (t.id.empty()) fail("missing id");
  for (const char* slot : kCoreSlots) {
    const size_t n = CountOccurrences(t.body, slot);
    if (n != 1) {
      fail(std::string("slot ") + slot + " occurs " + std::to_string(n) +
           " times, expected exactly once");
    }
  }
  for (size_t open = t.body.find('{'); open != std::string::npos;
       open = t.body.find('{', open + 1)) {
    const size_t close = t.body.find('}', open);
    if (close == std::string::npos) fail("unterminated slot");
    const std::string slot = t.body.substr(open, close - open + 1);
    bool known = false;
    for (const char* s : kCoreSlots) known = known || slot == s;
    if (!known) fail("unknown slot " + slot);
  }
  const bool synthetic = feature.kind == FeatureKind::kSyntheticSource;
  if (synthetic != (t.prefix != PrefixSlot::kNone)) {
    fail(synthetic ? "synthetic-source template needs a prefix slot"
                   : "prefix slot on a non-synthetic-source template");
  }
}

void TemplatePack::AddFeature(const Feature& feature) {
  const auto it = features_.find(feature.id);
  if (it != features_.end() && it->second.kind != feature.kind) {
    throw Error(ErrorCategory::kValidation,
                "feature '" + feature.id + "' declared with two different kinds");
  }
  features_[feature.id] = feature;
}

void TemplatePack::AddTemplate(Template t) {
  const auto f = features_.find(t.feature);
  if (t.feature.empty() || f == features_.end()) {
    throw Error(ErrorCategory::kValidation,
                "template '" + t.id + "': missing feature declaration");
  }
  ValidateTemplate(t, f->second);
  if (index_.count(t.id)) {
    throw Error(ErrorCategory::kValidation, "template '" + t.id + "': duplicate id");
  }
  index_[t.id] = templates_.size();
  templates_.push_back(std::move(t));
}

const Feature& TemplatePack::feature(const std::string& id) const {
  const auto it = features_.find(id);
  if (it == features_.end()) {
    throw Error(ErrorCategory::kArgument, "pack has no feature '" + id + "'");
  }
  return it->second;
}

const Template& TemplatePack::Find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCategory::kArgument, "pack has no template '" + id + "'");
  return templates_[it->second];
}

std::vector<const Template*> TemplatePack::ForFeature(const std::string& feature_id) const {
  std::vector<const Template*> out;
  for (const auto& t : templates_) {
    if (t.feature == feature_id) out.push_back(&t);
  }
  return out;
}

std::map<std::string, size_t> TemplatePack::CountsPerFeature() const {
  std::map<std::string, size_t> counts;
  for (const auto& [id, f] : features_) counts[id] = 0;
  for (const auto& t : templates_) ++counts[t.feature];
  return counts;
}

std::vector<Feature> TemplatePack::features() const {
  std::vector<Feature> out;
  for (const auto& [id, f] : features_) out.push_back(f);
  return out;
}

TemplatePack ParsePack(const std::string& text, const std::string& source_name) {
  TemplatePack pack;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;

  struct Pending {
    Template t;
    std::optional<std::string> kind;
    std::vector<std::string> body_lines;
    bool in_body = false;
    size_t start_line = 0;
  };
  std::optional<Pending> cur;

  auto flush = [&]() {
    if (!cur) return;
    Pending p = std::move(*cur);
    cur.reset();
    if (!p.in_body) {
      throw Error(ErrorCategory::kValidation,
                  source_name + ":" + std::to_string(p.start_line) + ": template '" + p.t.id +
                      "' has no '---' body separator");
    }
    std::string body;
    for (const auto& l : p.body_lines) {
      if (!body.empty()) body += ' ';
      body += l;
    }
    p.t.body = body;
    if (p.kind && !p.t.feature.empty()) {
      pack.AddFeature({p.t.feature, ParseFeatureKind(*p.kind)});
    }
    pack.AddTemplate(std::move(p.t));
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (cur && cur->in_body) {
      if (t.empty()) {
        flush();
      } else {
        cur->body_lines.push_back(t);
      }
      continue;
    }
    if (t.empty() || t[0] == '#') continue;
    if (t == "---") {
      if (!cur) {
        throw Error(ErrorCategory::kValidation,
                    source_name + ":" + std::to_string(lineno) + ": body without header");
      }
      cur->in_body = true;
      continue;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCategory::kValidation,
                  source_name + ":" + std::to_string(lineno) + ": expected 'key: value'");
    }
    const std::string key = Trim(t.substr(0, colon));
    const std::string value = Trim(t.substr(colon + 1));
    if (key == "id") {
      flush();
      cur.emplace();
      cur->t.id = value;
      cur->start_line = lineno;
      continue;
    }
    if (!cur) {
      throw Error(ErrorCategory::kValidation,
                  source_name + ":" + std::to_string(lineno) + ": header before 'id:'");
    }
    if (key == "feature") {
      cur->t.feature = value;
    } else if (key == "kind") {
      cur->kind = value;
    } else if (key == "prefix") {
      if (value == "newspaper") {
        cur->t.prefix = PrefixSlot::kNewspaper;
      } else if (value == "vol") {
        cur->t.prefix = PrefixSlot::kVol;
      } else {
        throw Error(ErrorCategory::kValidation,
                    "template '" + cur->t.id + "': unknown prefix slot '" + value + "'");
      }
    } else if (key == "version") {
      pack.version = value;
    } else {
      throw Error(ErrorCategory::kValidation,
                  "template '" + cur->t.id + "': unknown header '" + key + "'");
    }
  }
  flush();
  if (pack.templates().empty()) {
    throw Error(ErrorCategory::kValidation, source_name + ": no templates");
  }
  return pack;
}

TemplatePack LoadPack(const std::string& path) {
  return ParsePack(ReadFile(path), path);
}

std::string SourcePrefix(const Template& t, const SourceAux& aux) {
  switch (t.prefix) {
    case PrefixSlot::kNone:
      return "";
    case PrefixSlot::kNewspaper:
      if (!aux.newspaper || aux.newspaper->empty()) {
        throw Error(ErrorCategory::kArgument,
                    "template '" + t.id + "' needs a newspaper name");
      }
      return "According to " + *aux.newspaper;
    case PrefixSlot::kVol: {
      if (!aux.vol) {
        throw Error(ErrorCategory::kArgument, "template '" + t.id + "' needs a volume");
      }
      const int vol = *aux.vol;
      const bool ok = (aux.side == Side::kA && vol >= kMinVolA && vol <= kMaxVolA) ||
                      (aux.side == Side::kB && vol >= kMinVolB && vol <= kMaxVolB);
      if (!ok) {
        throw Error(ErrorCategory::kArgument,
                    "volume " + std::to_string(vol) + " is outside the range for side " +
                        SideName(aux.side));
      }
      return "According to Global News (Vol. " + std::to_string(vol) + ")";
    }
  }
  return "";
}

Biography Render(const Template& t, const KnowledgeRecord& k, const SourceAux& aux) {
  if (k.name.empty()) throw Error(ErrorCategory::kArgument, "record without a name");
  std::string text = t.body;
  ReplaceAll(text, "{name}", k.name);
  ReplaceAll(text, "{birth_date}", k.birth_date.ToString());
  ReplaceAll(text, "{birth_place}", k.birth_place);
  ReplaceAll(text, "{university}", k.university);
  ReplaceAll(text, "{major}", k.major);
  ReplaceAll(text, "{company}", k.company);

  const std::string source = SourcePrefix(t, aux);
  if (!source.empty()) {
    text = aux.placement == SourcePlacement::kBeginning ? source + ", " + text
                                                        : text + " " + source + ".";
  }
  return Biography{std::move(text), k.name, t.id, t.feature, aux.side};
}

MisspellingLexicon MisspellingLexicon::Load(const std::string& path) {
  MisspellingLexicon lex;
  for (const auto& line : ReadLines(path)) {
    const auto parts = Split(line, ' ');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
      throw Error(ErrorCategory::kValidation, path + ": malformed lexicon line '" + line + "'");
    }
    lex.Add(parts[0], parts[1]);
  }
  return lex;
}

void MisspellingLexicon::Add(const std::string& word, const std::string& misspelled) {
  std::string key = word;
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  entries_[key] = misspelled;
}

std::optional<std::string> MisspellingLexicon::Find(const std::string& word) const {
  std::string key = word;
  for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

size_t CountContentWords(const std::string& body) {
  size_t n = 0;
  for (const auto& s : SegmentBody(body)) n += IsContentWord(s) ? 1 : 0;
  return n;
}

Template CorruptSpelling(const Template& t, double rate, uint64_t seed,
                         const MisspellingLexicon& lexicon) {
  if (t.prefix != PrefixSlot::kNone) {
    throw Error(ErrorCategory::kArgument,
                "template '" + t.id + "': synthetic-source templates are not corrupted");
  }
  if (rate < 0.0 || rate > 1.0) {
    throw Error(ErrorCategory::kArgument, "misspelling rate must lie in [0, 1]");
  }
  auto segments = SegmentBody(t.body);
  std::vector<size_t> content;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (IsContentWord(segments[i])) content.push_back(i);
  }
  const auto target =
      static_cast<size_t>(std::llround(rate * static_cast<double>(content.size())));
  Rng rng(DeriveSeed(seed, "spelling:" + t.id));
  for (size_t pick : rng.SampleWithoutReplacement(content.size(), target)) {
    Segment& word = segments[content[pick]];
    const auto known = lexicon.Find(word.text);
    if (known && *known != word.text) {
      word.text = MatchCase(word.text, *known);
    } else {
      word.text = RuleEdit(word.text, rng);
    }
  }
  Template out = t;
  out.body.clear();
  for (const auto& s : segments) out.body += s.text;
  return out;
}

void AddCorruptedFeature(TemplatePack& pack, const std::string& feature_id,
                         const std::string& base_feature, double rate,
                         uint64_t seed, const MisspellingLexicon& lexicon) {
  pack.AddFeature({feature_id, FeatureKind::kSpelling});
  const auto base = pack.ForFeature(base_feature);
  if (base.empty()) {
    throw Error(ErrorCategory::kArgument, "pack has no templates for '" + base_feature + "'");
  }
  std::vector<Template> derived;
  for (const Template* t : base) {
    Template c = CorruptSpelling(*t, rate, seed, lexicon);
    const auto dash = t->id.rfind('-');
    c.id = feature_id + (dash == std::string::npos ? "-" + t->id : t->id.substr(dash));
    c.feature = feature_id;
    derived.push_back(std::move(c));
  }
  for (auto& c : derived) pack.AddTemplate(std::move(c));
}

}  // namespace conflictlab
