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

#ifndef CONFLICTLAB_TOML_LITE_H_
#define CONFLICTLAB_TOML_LITE_H_

#include <string>

#include "json.hpp"

namespace conflictlab {

// Parses the TOML subset used by recipe files into JSON: comments, [table]
// and [dotted.table] headers, bare/quoted/dotted keys, basic and literal
// strings, integers, floats, booleans, (multi-line) arrays and inline
// tables. Dates and array-of-tables are not supported. Throws kValidation
// with "<source>:<line>: ..." on malformed input or a redefined key.
nlohmann::ordered_json ParseToml(const std::string& text, const std::string& source_name);

// ParseToml for *.toml paths, plain JSON otherwise.
nlohmann::ordered_json LoadConfigFile(const std::string& path);

}  // namespace conflictlab

#endif  // CONFLICTLAB_TOML_LITE_H_
