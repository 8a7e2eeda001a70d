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

#include "shiftcert/error.h"

namespace shiftcert {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgs: return "InvalidArgs";
    case ErrorCode::kInvalidImage: return "InvalidImage";
    case ErrorCode::kAllZeroImage: return "AllZeroImage";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kDegenerateImage: return "DegenerateImage";
    case ErrorCode::kNegativeParam: return "NegativeParam";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kNegativeEpsilon: return "NegativeEpsilon";
    case ErrorCode::kEmptyRecords: return "EmptyRecords";
    case ErrorCode::kLabelMismatch: return "LabelMismatch";
    case ErrorCode::kScorerFailure: return "ScorerFailure";
    case ErrorCode::kDegenerateClass: return "DegenerateClass";
    case ErrorCode::kUnsupportedKind: return "UnsupportedKind";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace shiftcert
