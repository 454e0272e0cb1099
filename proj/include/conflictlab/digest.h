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

#ifndef CONFLICTLAB_DIGEST_H_
#define CONFLICTLAB_DIGEST_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace conflictlab {

// 64-bit FNV-1a. Used for corpus digests and stream names, not for security.
class Fnv1a {
 public:
  static constexpr uint64_t kOffset = 1469598103934665603ULL;
  static constexpr uint64_t kPrime = 1099511628211ULL;

  void Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= kPrime;
    }
  }

  uint64_t value() const { return hash_; }

  // 16 lowercase hex digits.
  std::string Hex() const;

 private:
  uint64_t hash_ = kOffset;
};

inline uint64_t HashString(std::string_view bytes) {
  Fnv1a h;
  h.Update(bytes);
  return h.value();
}

std::string DigestFile(const std::string& path);

}  // namespace conflictlab

#endif  // CONFLICTLAB_DIGEST_H_
