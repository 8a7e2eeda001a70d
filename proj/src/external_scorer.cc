// Copyright 2026 The shiftcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shiftcert/external_scorer.h"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cmath>
#include <mutex>

#include "absl/strings/escaping.h"
#include "shiftcert/error.h"

namespace shiftcert {

struct ExternalScorer::Child {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;
  std::uint64_t next_id = 0;
  std::mutex mu;

  ~Child() {
    if (to_child >= 0) close(to_child);
    if (from_child >= 0) close(from_child);
    if (pid > 0) {
      int status = 0;
      if (waitpid(pid, &status, WNOHANG) == 0) {
        kill(pid, SIGTERM);
        waitpid(pid, &status, 0);
      }
    }
  }

  void WriteAll(const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = write(to_child, data.data() + done, data.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kScorerFailure, "write to scorer failed");
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::string ReadLine(int timeout_ms) {
    for (;;) {
      const auto nl = buffer.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        return line;
      }
      pollfd pfd{from_child, POLLIN, 0};
      const int ready = poll(&pfd, 1, timeout_ms);
      if (ready == 0) {
        throw Error(ErrorCode::kScorerFailure, "scorer timed out");
      }
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kScorerFailure, "poll on scorer failed");
      }
      char chunk[4096];
      const ssize_t n = read(from_child, chunk, sizeof(chunk));
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        throw Error(ErrorCode::kScorerFailure, "scorer closed its output");
      }
      buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

std::string EncodeScoreRequest(std::uint64_t id, const Image& img, int label) {
  std::string raw;
  raw.reserve(img.size() * 4);
  for (float x : img.pixels()) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(x);
    for (int i = 0; i < 4; ++i) {
      raw.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }
  nlohmann::json req = {{"id", id},
                        {"h", img.height()},
                        {"w", img.width()},
                        {"label", label},
                        {"pixels", absl::Base64Escape(raw)}};
  return req.dump();
}

Image DecodeRequestPixels(const nlohmann::json& request) {
  std::string raw;
  if (!absl::Base64Unescape(request.at("pixels").get<std::string>(), &raw)) {
    throw Error(ErrorCode::kMalformedFile, "pixels are not valid base64");
  }
  const int h = request.at("h").get<int>();
  const int w = request.at("w").get<int>();
  if (h <= 0 || w <= 0 ||
      raw.size() != static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * 12) {
    throw Error(ErrorCode::kShapeMismatch, "pixel payload size");
  }
  std::vector<float> px(raw.size() / 4);
  for (std::size_t i = 0; i < px.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[4 * i + b]))
              << (8 * b);
    }
    px[i] = std::bit_cast<float>(bits);
  }
  return Image(h, w, std::move(px));
}

double ParseScoreResponse(const std::string& line, std::uint64_t expected_id) {
  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kScorerFailure, "malformed reply: " + line);
  }
  if (!resp.is_object() || !resp.contains("id") || !resp["id"].is_number_integer() ||
      !resp.contains("score") || !resp["score"].is_number()) {
    throw Error(ErrorCode::kScorerFailure, "reply lacks id/score: " + line);
  }
  if (resp["id"].get<std::uint64_t>() != expected_id) {
    throw Error(ErrorCode::kScorerFailure,
                "reply id " + resp["id"].dump() + " does not match request " +
                    std::to_string(expected_id));
  }
  const double score = resp["score"].get<double>();
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    throw Error(ErrorCode::kScorerFailure, "score outside [0, 1]: " + line);
  }
  return score;
}

ExternalScorer::ExternalScorer(std::string command, int num_classes,
                               int instances, int timeout_ms)
    : command_(std::move(command)),
      num_classes_(num_classes),
      timeout_ms_(timeout_ms) {
  if (num_classes_ < 2 || instances < 1) {
    throw Error(ErrorCode::kInvalidArgs,
                "external scorer needs >= 2 classes and >= 1 instance");
  }
  // A dead child must surface as a failed write, not a signal.
  signal(SIGPIPE, SIG_IGN);
  for (int i = 0; i < instances; ++i) {
    auto child = std::make_unique<Child>();
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0) {
      throw Error(ErrorCode::kScorerFailure, "pipe() failed");
    }
    if (pipe(out_pipe) != 0) {
      close(in_pipe[0]);
      close(in_pipe[1]);
      throw Error(ErrorCode::kScorerFailure, "pipe() failed");
    }
    const pid_t pid = fork();
    if (pid < 0) {
      throw Error(ErrorCode::kScorerFailure, "fork() failed");
    }
    if (pid == 0) {
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
    child->pid = pid;
    child->to_child = in_pipe[1];
    child->from_child = out_pipe[0];
    const std::string hello = child->ReadLine(timeout_ms_);
    nlohmann::json announce;
    try {
      announce = nlohmann::json::parse(hello);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::kScorerFailure, "bad protocol announcement");
    }
    if (!announce.is_object() || announce.value("proto", 0) != 1) {
      throw Error(ErrorCode::kScorerFailure,
                  "unsupported protocol announcement: " + hello);
    }
    children_.push_back(std::move(child));
  }
}

ExternalScorer::~ExternalScorer() = default;

double ExternalScorer::Score(const Image& img, int label) const {
  Child* child = nullptr;
  std::unique_lock<std::mutex> lock;
  for (const auto& c : children_) {
    std::unique_lock<std::mutex> attempt(c->mu, std::try_to_lock);
    if (attempt.owns_lock()) {
      child = c.get();
      lock = std::move(attempt);
      break;
    }
  }
  if (child == nullptr) {
    child = children_[round_robin_.fetch_add(1) % children_.size()].get();
    lock = std::unique_lock<std::mutex>(child->mu);
  }
  const std::uint64_t id = child->next_id++;
  child->WriteAll(EncodeScoreRequest(id, img, label) + "\n");
  return ParseScoreResponse(child->ReadLine(timeout_ms_), id);
}

nlohmann::json ExternalScorer::ToJson() const {
  return {{"kind", "external"},
          {"command", command_},
          {"classes", num_classes_},
          {"instances", children_.size()}};
}

}  // namespace shiftcert
