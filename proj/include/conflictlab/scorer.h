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

#ifndef CONFLICTLAB_SCORER_H_
#define CONFLICTLAB_SCORER_H_

#include <chrono>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <sys/types.h>
#include <vector>

#include "conflictlab/model.h"
#include "conflictlab/tokenizer.h"

namespace conflictlab {

struct ScoreRequest {
  std::string id;
  std::string text;
};

// Either (logprob, num_tokens) or error is set.
struct ScoreResponse {
  std::string id;
  double logprob = 0.0;
  int num_tokens = 0;
  std::optional<std::string> error;

  double Normalized() const { return logprob / num_tokens; }
  friend bool operator==(const ScoreResponse&, const ScoreResponse&) = default;
};

// Wire format, one JSON object per line, keys in this order:
//   request  {"id":"...","text":"..."}
//   response {"id":"...","logprob":-12.34,"num_tokens":7} | {"id":"...","error":"..."}
// Doubles are written in shortest round-trip form.
std::string EncodeRequest(const ScoreRequest& request);
std::string EncodeResponse(const ScoreResponse& response);
// Throw kProtocol carrying the raw line when it does not match the schema.
ScoreRequest DecodeRequest(const std::string& line);
ScoreResponse DecodeResponse(const std::string& line);

// Maps texts to sequence log-probabilities. Responses come back in request
// order; per-request failures are error responses, transport failures throw.
class SequenceScorer {
 public:
  virtual ~SequenceScorer() = default;
  virtual std::vector<ScoreResponse> ScoreAll(std::span<const ScoreRequest> requests) = 0;
  virtual std::string Identity() const = 0;
};

// Throws kProtocol if two requests share an id.
void CheckUniqueIds(std::span<const ScoreRequest> requests);

// The in-repo model, scored in this process. Read-only over the model.
class InProcessScorer : public SequenceScorer {
 public:
  InProcessScorer(const LmModel& model, const Tokenizer& tokenizer)
      : model_(model), tokenizer_(tokenizer) {}

  ScoreResponse Score(const ScoreRequest& request) const;
  std::vector<ScoreResponse> ScoreAll(std::span<const ScoreRequest> requests) override;
  std::string Identity() const override { return "internal"; }

 private:
  const LmModel& model_;
  const Tokenizer& tokenizer_;
};

// Wraps an arbitrary per-request function; used for reference scorers.
class CallbackScorer : public SequenceScorer {
 public:
  using Fn = std::function<ScoreResponse(const ScoreRequest&)>;
  CallbackScorer(std::string identity, Fn fn)
      : identity_(std::move(identity)), fn_(std::move(fn)) {}

  std::vector<ScoreResponse> ScoreAll(std::span<const ScoreRequest> requests) override;
  std::string Identity() const override { return identity_; }

 private:
  std::string identity_;
  Fn fn_;
};

inline constexpr std::chrono::milliseconds kDefaultScorerTimeout{60000};

// Child process speaking the wire format on stdin/stdout, started with
// /bin/sh -c <command>. Requests are pipelined; responses may arrive in any
// order and are matched by id. Ids must be unique within one ScoreAll call
// (checked before anything is sent). A response that does not arrive within
// `timeout` of the previous progress raises kTimeout naming the oldest
// outstanding id; the child is then killed and the scorer is unusable.
class ExternalScorer : public SequenceScorer {
 public:
  explicit ExternalScorer(std::string command,
                          std::chrono::milliseconds timeout = kDefaultScorerTimeout);
  ~ExternalScorer() override;
  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  std::vector<ScoreResponse> ScoreAll(std::span<const ScoreRequest> requests) override;
  std::string Identity() const override { return "external:" + command_; }

 private:
  void Shutdown(bool force);
  bool ReadLine(std::string& line, std::chrono::steady_clock::time_point deadline);

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  bool broken_ = false;
};

// Serves the wire protocol until EOF on `in`. Bad requests, empty texts and
// unknown tokens become error responses; the loop never exits on them.
// Returns the number of requests answered.
size_t ServeScorer(std::istream& in, std::ostream& out, const LmModel& model,
                   const Tokenizer& tokenizer);

}  // namespace conflictlab

#endif  // CONFLICTLAB_SCORER_H_
