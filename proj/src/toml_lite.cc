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

#include "conflictlab/toml_lite.h"

#include <cctype>
#include <cmath>

#include "conflictlab/error.h"
#include "conflictlab/io.h"

namespace conflictlab {
namespace {

using Json = nlohmann::ordered_json;

class Parser {
 public:
  Parser(const std::string& text, const std::string& source) : s_(text), source_(source) {}

  Json Parse() {
    Json root = Json::object();
    Json* table = &root;
    while (true) {
      SkipBlankAndComments();
      if (AtEnd()) break;
      if (Peek() == '[') {
        ++pos_;
        if (Peek() == '[') Fail("arrays of tables are not supported");
        SkipInlineSpace();
        const auto path = ParseKeyPath();
        SkipInlineSpace();
        Expect(']');
        table = &root;
        for (const auto& k : path) {
          if (!table->contains(k)) (*table)[k] = Json::object();
          table = &(*table)[k];
          if (!table->is_object()) Fail("'" + k + "' is not a table");
        }
        EndOfLine();
        continue;
      }
      ParseKeyValue(*table);
      EndOfLine();
    }
    return root;
  }

 private:
  bool AtEnd() const { return pos_ >= s_.size(); }
  char Peek() const { return AtEnd() ? '\0' : s_[pos_]; }

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCategory::kValidation, source_ + ":" + std::to_string(line_) + ": " + what);
  }

  void Expect(char c) {
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void SkipInlineSpace() {
    while (Peek() == ' ' || Peek() == '\t') ++pos_;
  }

  void SkipComment() {
    if (Peek() == '#') {
      while (!AtEnd() && Peek() != '\n') ++pos_;
    }
  }

  // Whitespace, newlines and comments (used between statements and inside arrays).
  void SkipBlankAndComments() {
    while (!AtEnd()) {
      const char c = Peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        SkipComment();
      } else {
        break;
      }
    }
  }

  void EndOfLine() {
    SkipInlineSpace();
    SkipComment();
    if (Peek() == '\r') ++pos_;
    if (AtEnd()) return;
    if (Peek() != '\n') Fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  std::string ParseKey() {
    if (Peek() == '"') return ParseBasicString();
    if (Peek() == '\'') return ParseLiteralString();
    const size_t start = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) || Peek() == '_' ||
                        Peek() == '-')) {
      ++pos_;
    }
    if (pos_ == start) Fail("expected a key");
    return s_.substr(start, pos_ - start);
  }

  std::vector<std::string> ParseKeyPath() {
    std::vector<std::string> path = {ParseKey()};
    SkipInlineSpace();
    while (Peek() == '.') {
      ++pos_;
      SkipInlineSpace();
      path.push_back(ParseKey());
      SkipInlineSpace();
    }
    return path;
  }

  void ParseKeyValue(Json& table) {
    const auto path = ParseKeyPath();
    SkipInlineSpace();
    Expect('=');
    SkipInlineSpace();
    Json* target = &table;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      if (!target->contains(path[i])) (*target)[path[i]] = Json::object();
      target = &(*target)[path[i]];
      if (!target->is_object()) Fail("'" + path[i] + "' is not a table");
    }
    if (target->contains(path.back())) Fail("key '" + path.back() + "' defined twice");
    (*target)[path.back()] = ParseValue();
  }

  Json ParseValue() {
    const char c = Peek();
    if (c == '"') return ParseBasicString();
    if (c == '\'') return ParseLiteralString();
    if (c == '[') return ParseArray();
    if (c == '{') return ParseInlineTable();
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return ParseNumber();
  }

  Json ParseNumber() {
    const size_t start = pos_;
    while (!AtEnd() && (std::isalnum(static_cast<unsigned char>(Peek())) || Peek() == '+' ||
                        Peek() == '-' || Peek() == '.' || Peek() == '_')) {
      ++pos_;
    }
    std::string token;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') token += c;
    }
    if (token.empty()) Fail("expected a value");
    if (token == "inf" || token == "+inf" || token == "-inf" || token == "nan") {
      Fail("non-finite numbers are not supported");
    }
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    try {
      size_t used = 0;
      if (is_float) {
        const double v = std::stod(token, &used);
        if (used == token.size()) return v;
      } else {
        const long long v = std::stoll(token, &used, 10);
        if (used == token.size()) return v;
      }
    } catch (const std::exception&) {
    }
    Fail("invalid value '" + token + "'");
  }

  std::string ParseBasicString() {
    Expect('"');
    std::string out;
    while (true) {
      if (AtEnd() || Peek() == '\n') Fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (AtEnd()) Fail("unterminated escape");
      const char e = s_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'u': {
          if (pos_ + 4 > s_.size()) Fail("short \\u escape");
          const unsigned long cp = std::stoul(s_.substr(pos_, 4), nullptr, 16);
          pos_ += 4;
          AppendUtf8(out, static_cast<uint32_t>(cp));
          break;
        }
        default:
          Fail(std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  static void AppendUtf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::string ParseLiteralString() {
    Expect('\'');
    const size_t end = s_.find_first_of("'\n", pos_);
    if (end == std::string::npos || s_[end] != '\'') Fail("unterminated string");
    std::string out = s_.substr(pos_, end - pos_);
    pos_ = end + 1;
    return out;
  }

  Json ParseArray() {
    Expect('[');
    Json arr = Json::array();
    while (true) {
      SkipBlankAndComments();
      if (Peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(ParseValue());
      SkipBlankAndComments();
      if (Peek() == ',') {
        ++pos_;
      } else if (Peek() != ']') {
        Fail("expected ',' or ']' in array");
      }
    }
  }

  Json ParseInlineTable() {
    Expect('{');
    Json table = Json::object();
    SkipInlineSpace();
    if (Peek() == '}') {
      ++pos_;
      return table;
    }
    while (true) {
      SkipInlineSpace();
      ParseKeyValue(table);
      SkipInlineSpace();
      if (Peek() == ',') {
        ++pos_;
      } else if (Peek() == '}') {
        ++pos_;
        return table;
      } else {
        Fail("expected ',' or '}' in inline table");
      }
    }
  }

  const std::string& s_;
  const std::string& source_;
  size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

nlohmann::ordered_json ParseToml(const std::string& text, const std::string& source_name) {
  return Parser(text, source_name).Parse();
}

nlohmann::ordered_json LoadConfigFile(const std::string& path) {
  if (path.ends_with(".toml")) return ParseToml(ReadFile(path), path);
  return ReadJson(path);
}

}  // namespace conflictlab
