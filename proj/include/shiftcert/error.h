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

#ifndef SHIFTCERT_ERROR_H_
#define SHIFTCERT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftcert {

enum class ErrorCode {
  kInvalidArgs,
  kInvalidImage,
  kAllZeroImage,
  kNotNormalized,
  kDegenerateImage,
  kNegativeParam,
  kShapeMismatch,
  kUnsupported,
  kNegativeEpsilon,
  kEmptyRecords,
  kLabelMismatch,
  kScorerFailure,
  kDegenerateClass,
  kUnsupportedKind,
  kMalformedFile,
  kVersionMismatch,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; callers
// switch on code() when they need to distinguish them.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shiftcert

#endif  // SHIFTCERT_ERROR_H_
