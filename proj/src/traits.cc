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

#include "impressions/traits.h"

#include <cmath>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {

std::string_view DimensionName(Dimension d) {
  switch (d) {
    case Dimension::kInterview:
      return "interview";
    case Dimension::kOpenness:
      return "openness";
    case Dimension::kConscientiousness:
      return "conscientiousness";
    case Dimension::kExtroversion:
      return "extroversion";
    case Dimension::kAgreeableness:
      return "agreeableness";
    case Dimension::kNonNeuroticism:
      return "non_neuroticism";
  }
  return "?";
}

std::string_view DimensionColumn(Dimension d) {
  switch (d) {
    case Dimension::kInterview:
      return "interview";
    case Dimension::kOpenness:
      return "O";
    case Dimension::kConscientiousness:
      return "C";
    case Dimension::kExtroversion:
      return "E";
    case Dimension::kAgreeableness:
      return "A";
    case Dimension::kNonNeuroticism:
      return "N";
  }
  return "?";
}

std::optional<Dimension> ParseDimension(std::string_view text) {
  const std::string lower = ToLower(Trim(text));
  for (Dimension d : kAllDimensions) {
    if (lower == DimensionName(d) || lower == ToLower(DimensionColumn(d))) {
      return d;
    }
  }
  if (lower == "non-neuroticism" || lower == "neuroticism") {
    return Dimension::kNonNeuroticism;
  }
  if (lower == "extraversion") return Dimension::kExtroversion;
  return std::nullopt;
}

bool TraitVector::IsValid() const {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
  }
  return true;
}

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kEmptyTrainSplit: return "EmptyTrainSplit";
    case ErrorCode::kUnlabeledTrainClip: return "UnlabeledTrainClip";
    case ErrorCode::kNoJudgments: return "NoJudgments";
    case ErrorCode::kNoInformativeJudgments: return "NoInformativeJudgments";
    case ErrorCode::kDegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::kGraphDisconnected: return "GraphDisconnected";
    case ErrorCode::kNoUsablePairs: return "NoUsablePairs";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
    case ErrorCode::kEmptyValidation: return "EmptyValidation";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNoDemographics: return "NoDemographics";
    case ErrorCode::kMissingRepresentation: return "MissingRepresentation";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace impressions
