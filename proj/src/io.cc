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

#include "conflictlab/io.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "conflictlab/error.h"

namespace conflictlab {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCategory::kIo, "short write to " + path);
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<nlohmann::ordered_json> ReadJsonl(const std::string& path) {
  std::istringstream in(ReadFile(path));
  std::vector<nlohmann::ordered_json> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      rows.push_back(nlohmann::ordered_json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::kValidation,
                  path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

void WriteJsonl(const std::string& path,
                const std::vector<nlohmann::ordered_json>& rows) {
  std::string out;
  for (const auto& row : rows) {
    out += row.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

nlohmann::ordered_json ReadJson(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, path + ": " + e.what());
  }
}

void WriteJson(const std::string& path, const nlohmann::ordered_json& doc) {
  WriteFile(path, doc.dump(2) + "\n");
}

void CheckSchemaVersion(const nlohmann::ordered_json& doc,
                        const std::string& what) {
  if (!doc.is_object() || !doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer()) {
    throw Error(ErrorCategory::kSchemaVersion,
                what + " has no schema_version field");
  }
  const int found = doc["schema_version"].get<int>();
  if (found != kSchemaVersion) {
    throw Error(ErrorCategory::kSchemaVersion,
                what + " has schema_version " + std::to_string(found) +
                    ", expected " + std::to_string(kSchemaVersion));
  }
}

void MakeDirs(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error(ErrorCategory::kIo, "cannot create " + path + ": " + ec.message());
}

std::string JoinPath(const std::string& a, const std::string& b) {
  return (std::filesystem::path(a) / b).string();
}

}  // namespace conflictlab
