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

#ifndef CONFLICTLAB_DATA_BUNDLE_H_
#define CONFLICTLAB_DATA_BUNDLE_H_

#include <string>
#include <vector>

#include "conflictlab/knowledge.h"
#include "conflictlab/random.h"
#include "conflictlab/templates.h"

namespace conflictlab {

inline constexpr double kDefaultMisspellingRate = 0.15;
inline constexpr uint64_t kBundledSpellingSeed = 0;

// Everything shipped under data/: attribute pools, the template pack (with
// the derived poor_spelling feature), the misspelling lexicon and the two
// disjoint newspaper-name sets.
struct DataBundle {
  std::string dir;
  AttributePools pools;
  TemplatePack pack;
  MisspellingLexicon lexicon;
  std::vector<std::string> newspapers_a;
  std::vector<std::string> newspapers_b;
};

// $CONFLICTLAB_DATA if set, else the data directory baked in at build time.
std::string DefaultDataDir();

DataBundle LoadBundle(const std::string& dir);

// Draws the auxiliary source fields a template needs: a newspaper from the
// side's name set, or a volume from the side's range.
class SourceSampler {
 public:
  SourceSampler(std::vector<std::string> newspapers_a,
                std::vector<std::string> newspapers_b);
  explicit SourceSampler(const DataBundle& bundle)
      : SourceSampler(bundle.newspapers_a, bundle.newspapers_b) {}

  SourceAux Draw(const Template& t, Side side, Rng& rng,
                 SourcePlacement placement = SourcePlacement::kBeginning) const;

  const std::vector<std::string>& newspapers(Side side) const;

 private:
  std::vector<std::string> a_;
  std::vector<std::string> b_;
};

}  // namespace conflictlab

#endif  // CONFLICTLAB_DATA_BUNDLE_H_
