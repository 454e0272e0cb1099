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
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>

#include "conflictlab/digest.h"
#include "conflictlab/error.h"
#include "conflictlab/random.h"

namespace conflictlab {

const char* CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage: return "USAGE";
    case ErrorCategory::kIo: return "IO";
    case ErrorCategory::kSchemaVersion: return "SCHEMA_VERSION";
    case ErrorCategory::kValidation: return "VALIDATION";
    case ErrorCategory::kArgument: return "ARGUMENT";
    case ErrorCategory::kEmptyInput: return "EMPTY_INPUT";
    case ErrorCategory::kCapacity: return "CAPACITY";
    case ErrorCategory::kVocabulary: return "VOCABULARY";
    case ErrorCategory::kContext: return "CONTEXT";
    case ErrorCategory::kProtocol: return "PROTOCOL";
    case ErrorCategory::kTimeout: return "TIMEOUT";
    case ErrorCategory::kScorer: return "SCORER";
    case ErrorCategory::kTraining: return "TRAINING";
    case ErrorCategory::kDegenerateRank: return "DEGENERATE_RANK";
    case ErrorCategory::kStage: return "STAGE";
    case ErrorCategory::kInternal: return "INTERNAL";
  }
  return "INTERNAL";
}

int ExitCode(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kUsage: return 2;
    case ErrorCategory::kIo: return 3;
    case ErrorCategory::kSchemaVersion: return 4;
    case ErrorCategory::kEmptyInput: return 5;
    case ErrorCategory::kValidation:
    case ErrorCategory::kArgument: return 6;
    default: return 1;
  }
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t master, std::string_view stream, uint64_t index) {
  return SplitMix64(SplitMix64(master ^ HashString(stream)) + index);
}

uint64_t Rng::UniformInt(uint64_t n) {
  // Rejection on the top of the range keeps the result exactly uniform.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

int64_t Rng::UniformRange(int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(UniformInt(static_cast<uint64_t>(hi - lo) + 1));
}

double Rng::UniformDouble() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u1;
  do {
    u1 = UniformDouble();
  } while (u1 <= 0.0);
  const double u2 = UniformDouble();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

std::vector<size_t> Rng::SampleWithoutReplacement(size_t n, size_t k) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(UniformInt(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::string Fnv1a::Hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash_));
  return buf;
}

std::string DigestFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path);
  Fnv1a h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h.Update(std::string_view(buf, static_cast<size_t>(in.gcount())));
  }
  return h.Hex();
}

}  // namespace conflictlab
