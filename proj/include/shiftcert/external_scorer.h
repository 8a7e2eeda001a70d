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

#ifndef SHIFTCERT_EXTERNAL_SCORER_H_
#define SHIFTCERT_EXTERNAL_SCORER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "shiftcert/classifier.h"

namespace shiftcert {

// Encodes a scoring request line (without the trailing newline):
//   {"id":N,"h":H,"w":W,"label":Y,"pixels":"<base64 LE float32 HWC>"}
std::string EncodeScoreRequest(std::uint64_t id, const Image& img, int label);
// Decodes the pixel payload of a request; used by scorers written in C++.
Image DecodeRequestPixels(const nlohmann::json& request);
// Parses a response line and checks it answers request `expected_id` with a
// score in [0, 1]. Throws Error(kScorerFailure).
double ParseScoreResponse(const std::string& line, std::uint64_t expected_id);

// Scores images with a child process speaking newline-delimited JSON on its
// standard input and output. The child announces {"proto": 1} once on
// startup. Each subprocess handles one request at a time; concurrent callers
// are spread over `instances` subprocesses.
class ExternalScorer final : public Classifier {
 public:
  // `command` runs under /bin/sh -c. Throws Error(kScorerFailure) if a child
  // cannot be started or does not announce the protocol.
  ExternalScorer(std::string command, int num_classes, int instances = 1,
                 int timeout_ms = 60000);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  int num_classes() const override { return num_classes_; }
  double Score(const Image& img, int label) const override;
  nlohmann::json ToJson() const override;

  const std::string& command() const { return command_; }

 private:
  struct Child;

  std::string command_;
  int num_classes_;
  int timeout_ms_;
  std::vector<std::unique_ptr<Child>> children_;
  mutable std::atomic<std::uint64_t> round_robin_{0};
};

}  // namespace shiftcert

#endif  // SHIFTCERT_EXTERNAL_SCORER_H_
