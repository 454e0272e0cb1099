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

#include "conflictlab/scorer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <deque>
#include <istream>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>

#include "conflictlab/error.h"
#include "json.hpp"

namespace conflictlab {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void Malformed(const std::string& line, const std::string& why) {
  throw Error(ErrorCategory::kProtocol, why + ": " + line);
}

Json ParseObject(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::exception&) {
    Malformed(line, "malformed protocol line");
  }
  if (!j.is_object()) Malformed(line, "protocol line is not an object");
  return j;
}

}  // namespace

std::string EncodeRequest(const ScoreRequest& request) {
  Json j;
  j["id"] = request.id;
  j["text"] = request.text;
  return j.dump();
}

std::string EncodeResponse(const ScoreResponse& response) {
  Json j;
  j["id"] = response.id;
  if (response.error) {
    j["error"] = *response.error;
  } else {
    j["logprob"] = response.logprob;
    j["num_tokens"] = response.num_tokens;
  }
  return j.dump();
}

ScoreRequest DecodeRequest(const std::string& line) {
  const Json j = ParseObject(line);
  if (!j.contains("id") || !j["id"].is_string()) Malformed(line, "request without string id");
  if (!j.contains("text") || !j["text"].is_string()) {
    Malformed(line, "request without string text");
  }
  return {j["id"].get<std::string>(), j["text"].get<std::string>()};
}

ScoreResponse DecodeResponse(const std::string& line) {
  const Json j = ParseObject(line);
  if (!j.contains("id") || !j["id"].is_string()) Malformed(line, "response without string id");
  ScoreResponse r;
  r.id = j["id"].get<std::string>();
  if (j.contains("error")) {
    if (!j["error"].is_string()) Malformed(line, "response error is not a string");
    r.error = j["error"].get<std::string>();
    return r;
  }
  if (!j.contains("logprob") || !j["logprob"].is_number()) {
    Malformed(line, "response without numeric logprob");
  }
  if (!j.contains("num_tokens") || !j["num_tokens"].is_number_integer()) {
    Malformed(line, "response without integer num_tokens");
  }
  r.logprob = j["logprob"].get<double>();
  const auto n = j["num_tokens"].get<int64_t>();
  if (n < 1 || n > std::numeric_limits<int>::max()) Malformed(line, "num_tokens must be >= 1");
  if (!std::isfinite(r.logprob)) Malformed(line, "logprob must be finite");
  r.num_tokens = static_cast<int>(n);
  return r;
}

void CheckUniqueIds(std::span<const ScoreRequest> requests) {
  std::set<std::string_view> seen;
  for (const auto& r : requests) {
    if (!seen.insert(r.id).second) {
      throw Error(ErrorCategory::kProtocol, "duplicate request id '" + r.id + "'");
    }
  }
}

ScoreResponse InProcessScorer::Score(const ScoreRequest& request) const {
  ScoreResponse r;
  r.id = request.id;
  if (request.text.empty()) {
    r.error = "empty text";
    return r;
  }
  try {
    const SequenceScore s = ScoreSequence(model_, tokenizer_, request.text);
    r.logprob = s.logprob;
    r.num_tokens = s.num_tokens;
  } catch (const Error& e) {
    r.error = std::string(CategoryName(e.category())) + ": " + e.what();
  }
  return r;
}

std::vector<ScoreResponse> InProcessScorer::ScoreAll(std::span<const ScoreRequest> requests) {
  CheckUniqueIds(requests);
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(Score(r));
  return out;
}

std::vector<ScoreResponse> CallbackScorer::ScoreAll(std::span<const ScoreRequest> requests) {
  CheckUniqueIds(requests);
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    out.push_back(fn_(r));
    out.back().id = r.id;
  }
  return out;
}

ExternalScorer::ExternalScorer(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
  if (command_.empty()) throw Error(ErrorCategory::kArgument, "empty scorer command");
  signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw Error(ErrorCategory::kIo, "pipe: " + std::string(strerror(errno)));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error(ErrorCategory::kIo, "pipe: " + std::string(strerror(errno)));
  }
  pid_ = fork();
  if (pid_ < 0) throw Error(ErrorCategory::kIo, "fork: " + std::string(strerror(errno)));
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  fcntl(to_child_, F_SETFL, fcntl(to_child_, F_GETFL) | O_NONBLOCK);
}

ExternalScorer::~ExternalScorer() { Shutdown(false); }

void ExternalScorer::Shutdown(bool force) {
  if (to_child_ >= 0) close(to_child_);
  to_child_ = -1;
  if (pid_ > 0) {
    if (force) kill(pid_, SIGKILL);
    int status = 0;
    for (int i = 0; i < 200; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }
  if (from_child_ >= 0) close(from_child_);
  from_child_ = -1;
}

bool ExternalScorer::ReadLine(std::string& line, std::chrono::steady_clock::time_point) {
  const auto nl = read_buffer_.find('\n');
  if (nl == std::string::npos) return false;
  line = read_buffer_.substr(0, nl);
  read_buffer_.erase(0, nl + 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::vector<ScoreResponse> ExternalScorer::ScoreAll(std::span<const ScoreRequest> requests) {
  if (broken_) throw Error(ErrorCategory::kScorer, "external scorer is no longer usable");
  CheckUniqueIds(requests);
  std::unordered_map<std::string, size_t> slot;
  for (size_t i = 0; i < requests.size(); ++i) slot.emplace(requests[i].id, i);

  std::string pending;
  for (const auto& r : requests) {
    pending += EncodeRequest(r);
    pending += '\n';
  }
  size_t written = 0;
  std::vector<std::optional<ScoreResponse>> out(requests.size());
  size_t received = 0;
  size_t oldest = 0;  // first request index without a response
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  auto fail = [&](ErrorCategory category, const std::string& message) {
    broken_ = true;
    Shutdown(true);
    throw Error(category, message);
  };

  char buf[65536];
  while (received < requests.size()) {
    std::string line;
    while (ReadLine(line, deadline)) {
      if (line.empty()) continue;
      ScoreResponse resp;
      try {
        resp = DecodeResponse(line);
      } catch (const Error& e) {
        fail(ErrorCategory::kProtocol, e.what());
      }
      auto it = slot.find(resp.id);
      if (it == slot.end()) fail(ErrorCategory::kProtocol, "response for unknown id: " + line);
      if (out[it->second]) fail(ErrorCategory::kProtocol, "second response for id: " + line);
      out[it->second] = std::move(resp);
      ++received;
      deadline = std::chrono::steady_clock::now() + timeout_;
    }
    if (received == requests.size()) break;
    while (oldest < out.size() && out[oldest]) ++oldest;

    pollfd fds[2];
    nfds_t nfds = 0;
    fds[nfds++] = {from_child_, POLLIN, 0};
    const bool want_write = written < pending.size();
    if (want_write) fds[nfds++] = {to_child_, POLLOUT, 0};
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      fail(ErrorCategory::kTimeout, "no response for id '" + requests[oldest].id + "' within " +
                                        std::to_string(timeout_.count()) + " ms");
    }
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1);
    const int ready = poll(fds, nfds, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCategory::kIo, std::string("poll: ") + strerror(errno));
    }
    if (ready == 0) continue;
    if (want_write && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = write(to_child_, pending.data() + written, pending.size() - written);
      if (n < 0 && errno != EAGAIN && errno != EINTR) {
        fail(ErrorCategory::kScorer, "scorer process closed its input: " +
                                         std::string(strerror(errno)));
      }
      if (n > 0) written += static_cast<size_t>(n);
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = read(from_child_, buf, sizeof(buf));
      if (n < 0 && errno != EINTR && errno != EAGAIN) {
        fail(ErrorCategory::kIo, std::string("read: ") + strerror(errno));
      }
      if (n == 0) {
        fail(ErrorCategory::kScorer,
             "scorer process exited with " + std::to_string(requests.size() - received) +
                 " requests outstanding (first '" + requests[oldest].id + "')");
      }
      if (n > 0) read_buffer_.append(buf, static_cast<size_t>(n));
    }
  }
  std::vector<ScoreResponse> result;
  result.reserve(out.size());
  for (auto& r : out) result.push_back(std::move(*r));
  return result;
}

size_t ServeScorer(std::istream& in, std::ostream& out, const LmModel& model,
                   const Tokenizer& tokenizer) {
  InProcessScorer scorer(model, tokenizer);
  size_t answered = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ScoreResponse resp;
    try {
      resp = scorer.Score(DecodeRequest(line));
    } catch (const Error& e) {
      // Recover the id if the line is at least an object with one.
      try {
        const Json j = Json::parse(line);
        if (j.is_object() && j.contains("id") && j["id"].is_string()) {
          resp.id = j["id"].get<std::string>();
        }
      } catch (const nlohmann::json::exception&) {
      }
      resp.error = std::string(CategoryName(e.category())) + ": " + e.what();
    }
    out << EncodeResponse(resp) << '\n';
    out.flush();
    ++answered;
  }
  return answered;
}

}  // namespace conflictlab
