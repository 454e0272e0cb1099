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

#include "conflictlab/data_bundle.h"

#include <cstdlib>
#include <set>

#include "conflictlab/error.h"
#include "conflictlab/io.h"

#ifndef CONFLICTLAB_DATA_DIR
#define CONFLICTLAB_DATA_DIR "data"
#endif

namespace conflictlab {

std::string DefaultDataDir() {
  if (const char* env = std::getenv("CONFLICTLAB_DATA"); env && *env) return env;
  return CONFLICTLAB_DATA_DIR;
}

DataBundle LoadBundle(const std::string& dir) {
  DataBundle b;
  b.dir = dir;
  b.pools = LoadAttributePools(JoinPath(dir, "pools"));
  b.pack = LoadPack(JoinPath(dir, "templates.txt"));
  b.lexicon = MisspellingLexicon::Load(JoinPath(dir, "misspellings.txt"));
  AddCorruptedFeature(b.pack, "poor_spelling", "general", kDefaultMisspellingRate,
                      kBundledSpellingSeed, b.lexicon);
  b.newspapers_a = ReadLines(JoinPath(dir, "pools/newspapers_a.txt"));
  b.newspapers_b = ReadLines(JoinPath(dir, "pools/newspapers_b.txt"));
  const std::set<std::string> a(b.newspapers_a.begin(), b.newspapers_a.end());
  for (const auto& name : b.newspapers_b) {
    if (a.count(name)) {
      throw Error(ErrorCategory::kValidation, "newspaper '" + name + "' is in both sets");
    }
  }
  return b;
}

SourceSampler::SourceSampler(std::vector<std::string> newspapers_a,
                             std::vector<std::string> newspapers_b)
    : a_(std::move(newspapers_a)), b_(std::move(newspapers_b)) {}

const std::vector<std::string>& SourceSampler::newspapers(Side side) const {
  if (side == Side::kNeutral) {
    throw Error(ErrorCategory::kArgument, "neutral biographies carry no source");
  }
  return side == Side::kA ? a_ : b_;
}

SourceAux SourceSampler::Draw(const Template& t, Side side, Rng& rng,
                              SourcePlacement placement) const {
  SourceAux aux;
  aux.side = side;
  aux.placement = placement;
  switch (t.prefix) {
    case PrefixSlot::kNone:
      break;
    case PrefixSlot::kNewspaper: {
      const auto& names = newspapers(side);
      if (names.empty()) throw Error(ErrorCategory::kCapacity, "empty newspaper set");
      aux.newspaper = names[rng.UniformInt(names.size())];
      break;
    }
    case PrefixSlot::kVol:
      if (side == Side::kNeutral) {
        throw Error(ErrorCategory::kArgument, "neutral biographies carry no volume");
      }
      aux.vol = static_cast<int>(side == Side::kA ? rng.UniformRange(kMinVolA, kMaxVolA)
                                                  : rng.UniformRange(kMinVolB, kMaxVolB));
      break;
  }
  return aux;
}

}  // namespace conflictlab
