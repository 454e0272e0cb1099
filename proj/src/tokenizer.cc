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

#include "conflictlab/tokenizer.h"

#include <algorithm>
#include <map>

#include "conflictlab/error.h"

namespace conflictlab {
namespace {

const char* const kSpecialPieces[kNumSpecials] = {"<pad>", "<bos>", "<eos>"};

bool IsLetter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<std::string> Segment(const std::string& text) {
  std::vector<std::string> pieces;
  size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (IsSpace(c)) {
      ++i;
    } else if (IsLetter(c)) {
      size_t j = i;
      while (j < text.size() && IsLetter(static_cast<unsigned char>(text[j]))) ++j;
      pieces.push_back(text.substr(i, j - i));
      i = j;
    } else {
      pieces.emplace_back(1, text[i]);
      ++i;
    }
  }
  return pieces;
}

Tokenizer Tokenizer::Build(std::span<const std::vector<std::string>> corpora) {
  std::map<std::string, size_t> freq;
  for (const auto& corpus : corpora) {
    for (const auto& text : corpus) {
      for (auto& piece : Segment(text)) ++freq[std::move(piece)];
    }
  }
  std::vector<std::pair<std::string, size_t>> entries(freq.begin(), freq.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> vocab(kSpecialPieces, kSpecialPieces + kNumSpecials);
  for (auto& [piece, count] : entries) vocab.push_back(piece);
  return FromVocabulary(std::move(vocab));
}

Tokenizer Tokenizer::Build(const std::vector<std::string>& texts) {
  return Build(std::span<const std::vector<std::string>>(&texts, 1));
}

Tokenizer Tokenizer::FromVocabulary(std::vector<std::string> vocabulary) {
  if (vocabulary.size() < static_cast<size_t>(kNumSpecials)) {
    throw Error(ErrorCategory::kValidation, "vocabulary lacks the special tokens");
  }
  for (int i = 0; i < kNumSpecials; ++i) {
    if (vocabulary[static_cast<size_t>(i)] != kSpecialPieces[i]) {
      throw Error(ErrorCategory::kValidation,
                  std::string("vocabulary id ") + std::to_string(i) + " must be " +
                      kSpecialPieces[i]);
    }
  }
  Tokenizer t;
  t.vocabulary_ = std::move(vocabulary);
  for (size_t i = 0; i < t.vocabulary_.size(); ++i) {
    if (!t.index_.emplace(t.vocabulary_[i], static_cast<TokenId>(i)).second) {
      throw Error(ErrorCategory::kValidation,
                  "duplicate vocabulary entry '" + t.vocabulary_[i] + "'");
    }
  }
  return t;
}

std::vector<TokenId> Tokenizer::Encode(const std::string& text) const {
  std::vector<TokenId> ids = {kBosId};
  for (const auto& piece : Segment(text)) ids.push_back(Id(piece));
  ids.push_back(kEosId);
  return ids;
}

std::string Tokenizer::Decode(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (id < kNumSpecials) continue;
    if (!out.empty()) out += ' ';
    out += Piece(id);
  }
  return out;
}

TokenId Tokenizer::Id(const std::string& piece) const {
  auto it = index_.find(piece);
  if (it == index_.end()) {
    throw Error(ErrorCategory::kVocabulary, "unknown token '" + piece + "'");
  }
  return it->second;
}

const std::string& Tokenizer::Piece(TokenId id) const {
  if (id < 0 || static_cast<size_t>(id) >= vocabulary_.size()) {
    throw Error(ErrorCategory::kVocabulary, "token id " + std::to_string(id) +
                                                " outside vocabulary of " +
                                                std::to_string(vocabulary_.size()));
  }
  return vocabulary_[static_cast<size_t>(id)];
}

nlohmann::ordered_json Tokenizer::ToJson() const {
  nlohmann::ordered_json j;
  j["segmentation"] = "letters-digits-punct";
  j["vocabulary"] = vocabulary_;
  return j;
}

Tokenizer Tokenizer::FromJson(const nlohmann::ordered_json& j) {
  try {
    return FromVocabulary(j.at("vocabulary").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, std::string("tokenizer: ") + e.what());
  }
}

}  // namespace conflictlab
