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

#ifndef CONFLICTLAB_IO_H_
#define CONFLICTLAB_IO_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace conflictlab {

// Bumped whenever any on-disk JSON/JSONL schema changes shape.
inline constexpr int kSchemaVersion = 1;

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

// Non-empty lines with surrounding whitespace trimmed; '#' starts a comment
// line only when it is the first non-blank character.
std::vector<std::string> ReadLines(const std::string& path);

std::vector<nlohmann::ordered_json> ReadJsonl(const std::string& path);
void WriteJsonl(const std::string& path,
                const std::vector<nlohmann::ordered_json>& rows);

nlohmann::ordered_json ReadJson(const std::string& path);
void WriteJson(const std::string& path, const nlohmann::ordered_json& doc);

// Throws kSchemaVersion unless doc["schema_version"] == kSchemaVersion.
void CheckSchemaVersion(const nlohmann::ordered_json& doc,
                        const std::string& what);

void MakeDirs(const std::string& path);

std::string JoinPath(const std::string& a, const std::string& b);

std::string Trim(const std::string& s);
std::vector<std::string> Split(const std::string& s, char sep);

}  // namespace conflictlab

#endif  // CONFLICTLAB_IO_H_
