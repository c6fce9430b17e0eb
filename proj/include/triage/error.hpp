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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace triage {

enum class ErrorCode {
  kIoError,
  kFormatError,
  kDuplicateId,
  kPreconditionViolation,
  kInvalidRange,
  kInvalidInput,
  kEmptyTrainingSet,
  kDegenerateLabels,
  kShapeError,
  kUnsupported,
  kInsufficientData,
  kEmptyEvaluation,
  kEmptyStudy,
  kOneSidedData,
  kNothingToExplain,
  kNoTrainingData,
  kServiceUnavailable,
  kAssignmentImpossible,
  kConflict,
  kNotFound,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the library are reported as Error. The code
// is stable and is what callers (and the HTTP layer) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace triage
