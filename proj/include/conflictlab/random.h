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

#ifndef CONFLICTLAB_RANDOM_H_
#define CONFLICTLAB_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace conflictlab {

// Seed derivation used everywhere a master seed fans out into independent
// streams: SplitMix64 over (master, FNV-1a of the stream name, index). Work
// item i of a stream always gets the same seed, so serial and parallel
// generation agree.
uint64_t DeriveSeed(uint64_t master, std::string_view stream,
                    uint64_t index = 0);

uint64_t SplitMix64(uint64_t x);

// Portable random source. std::mt19937_64 output is fixed by the standard,
// but the std distributions are not, so bounded integers, reals and shuffles
// are implemented here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform on [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);

  // Uniform on [lo, hi], inclusive.
  int64_t UniformRange(int64_t lo, int64_t hi);

  // Uniform on [0, 1) with 53 random bits.
  double UniformDouble();

  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace conflictlab

#endif  // CONFLICTLAB_RANDOM_H_
