// Copyright 2026 The Issue Triage Authors
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

#include "triage/error.hpp"

namespace triage {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kPreconditionViolation: return "PreconditionViolation";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kEmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::kEmptyStudy: return "EmptyStudy";
    case ErrorCode::kOneSidedData: return "OneSidedData";
    case ErrorCode::kNothingToExplain: return "NothingToExplain";
    case ErrorCode::kNoTrainingData: return "NoTrainingData";
    case ErrorCode::kServiceUnavailable: return "ServiceUnavailable";
    case ErrorCode::kAssignmentImpossible: return "AssignmentImpossible";
    case ErrorCode::kConflict: return "Conflict";
    case ErrorCode::kNotFound: return "NotFound";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace triage
