// Copyright 2026 The tmatch Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tmatch {

// Every failure raised by the library carries one of these codes. The CLI
// prints the code name, so names are part of the external interface.
enum class ErrorCode {
  kInvalidArgument,
  kParseError,
  kIoError,
  kUnsupportedLoss,
  kUnknownTemplate,
  kInvalidTemplate,
  kInvalidScale,
  kEmptyDataset,
  kDegenerateBounds,
  kInvalidBounds,
  kNotRegularGrid,
  kInfiniteMoment,
  kZeroCurvature,
  kNonSmoothTemplate,
  kInadmissiblePair,
  kNoDiscontinuity,
  kWindowExplosion,
  kEmptySample,
  kNonPositiveInput,
  kQuadratureFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnsupportedLoss: return "UnsupportedLoss";
    case ErrorCode::kUnknownTemplate: return "UnknownTemplate";
    case ErrorCode::kInvalidTemplate: return "InvalidTemplate";
    case ErrorCode::kInvalidScale: return "InvalidScale";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kDegenerateBounds: return "DegenerateBounds";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kNotRegularGrid: return "NotRegularGrid";
    case ErrorCode::kInfiniteMoment: return "InfiniteMoment";
    case ErrorCode::kZeroCurvature: return "ZeroCurvature";
    case ErrorCode::kNonSmoothTemplate: return "NonSmoothTemplate";
    case ErrorCode::kInadmissiblePair: return "InadmissiblePair";
    case ErrorCode::kNoDiscontinuity: return "NoDiscontinuity";
    case ErrorCode::kWindowExplosion: return "WindowExplosion";
    case ErrorCode::kEmptySample: return "EmptySample";
    case ErrorCode::kNonPositiveInput: return "NonPositiveInput";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return to_string(code_); }

 private:
  ErrorCode code_;
};

}  // namespace tmatch
