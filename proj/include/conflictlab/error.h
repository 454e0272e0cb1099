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

#ifndef CONFLICTLAB_ERROR_H_
#define CONFLICTLAB_ERROR_H_

#include <stdexcept>
#include <string>

namespace conflictlab {

// Every failure surfaced by the library carries one of these categories. The
// CLI prints the category name verbatim so scripts can branch on it.
enum class ErrorCategory {
  kUsage,
  kIo,
  kSchemaVersion,
  kValidation,
  kArgument,
  kEmptyInput,
  kCapacity,
  kVocabulary,
  kContext,
  kProtocol,
  kTimeout,
  kScorer,
  kTraining,
  kDegenerateRank,
  kStage,
  kInternal,
};

const char* CategoryName(ErrorCategory category);

// Process exit status used by the CLI for a category (never 0).
int ExitCode(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace conflictlab

#endif  // CONFLICTLAB_ERROR_H_
