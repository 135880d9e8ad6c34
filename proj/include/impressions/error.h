// Copyright 2026 The Impressions Authors.
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

#ifndef IMPRESSIONS_ERROR_H_
#define IMPRESSIONS_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace impressions {

// Error categories surfaced by the library. The CLI prints the category name
// as the first token of its error line, so names are part of the interface.
enum class ErrorCode {
  kInvalidArgument,
  kMissingFile,
  kDuplicateId,
  kLabelOutOfRange,
  kMalformedRow,
  kUnknownId,
  kEmptyTrainSplit,
  kUnlabeledTrainClip,
  kNoJudgments,
  kNoInformativeJudgments,
  kDegreeTooLarge,
  kGraphDisconnected,
  kNoUsablePairs,
  kTooFewFrames,
  kDimensionMismatch,
  kShapeMismatch,
  kSingularSystem,
  kZeroVariance,
  kKeyMismatch,
  kEmptyValidation,
  kTooFewRows,
  kEmptyList,
  kLengthMismatch,
  kEmptyInput,
  kDegenerateDenominator,
  kConstantInput,
  kTooFewSamples,
  kNoDemographics,
  kMissingRepresentation,
  kNonFiniteValue,
  kConfigError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace impressions

#endif  // IMPRESSIONS_ERROR_H_
