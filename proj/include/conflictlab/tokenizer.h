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

#ifndef CONFLICTLAB_TOKENIZER_H_
#define CONFLICTLAB_TOKENIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace conflictlab {

using TokenId = int32_t;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr int kNumSpecials = 3;

// Splits text into word-level pieces: a maximal run of letters (bytes >= 0x80
// count as letters, so UTF-8 words stay whole) is one piece, every digit is
// its own piece, every other non-space byte is its own piece. Whitespace only
// separates.
std::vector<std::string> Segment(const std::string& text);

// Closed vocabulary. Ids 0..2 are <pad>, <bos>, <eos>; the remaining ids
// follow (frequency desc, bytewise lexicographic) over the build corpora.
class Tokenizer {
 public:
  Tokenizer() = default;

  static Tokenizer Build(std::span<const std::vector<std::string>> corpora);
  static Tokenizer Build(const std::vector<std::string>& texts);
  static Tokenizer FromVocabulary(std::vector<std::string> vocabulary);

  // [BOS, pieces..., EOS]. Throws kVocabulary naming the first unknown piece.
  std::vector<TokenId> Encode(const std::string& text) const;
  // Pieces joined by single spaces; specials are dropped.
  std::string Decode(std::span<const TokenId> ids) const;

  bool Contains(const std::string& piece) const { return index_.count(piece) > 0; }
  TokenId Id(const std::string& piece) const;
  const std::string& Piece(TokenId id) const;
  size_t size() const { return vocabulary_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  nlohmann::ordered_json ToJson() const;
  static Tokenizer FromJson(const nlohmann::ordered_json& j);

 private:
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace conflictlab

#endif  // CONFLICTLAB_TOKENIZER_H_
