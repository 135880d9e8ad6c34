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

// Regression scores, the training-mean baseline and bit accuracy.

#ifndef IMPRESSIONS_METRICS_H_
#define IMPRESSIONS_METRICS_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "impressions/traits.h"

namespace impressions {

// kMaeComplement: A = 1 - mean|t - p|.
// kEq1Literal:    A = 1 - mean|t - p| / sum|t - mean(t)|, the normalization
//                 as typeset. Kept so the two readings can be compared; a
//                 mean predictor scores exactly 1 - 1/N under it.
enum class MetricVariant { kMaeComplement, kEq1Literal };

std::string_view MetricVariantName(MetricVariant v);
std::optional<MetricVariant> ParseMetricVariant(std::string_view text);

struct MetricConfig {
  MetricVariant variant = MetricVariant::kMaeComplement;
};

// Values must lie in [0,1]. Throws LengthMismatch, EmptyInput,
// InvalidArgument (out of range) or DegenerateDenominator (eq1_literal on
// constant truth).
double Score(std::span<const double> truth, std::span<const double> pred,
             const MetricConfig& config = {});

double MeanAbsoluteError(std::span<const double> truth,
                         std::span<const double> pred);

// Score per dimension over aligned lists of trait vectors.
PerDimension<double> ScorePerDimension(const std::vector<TraitVector>& truth,
                                       const std::vector<TraitVector>& pred,
                                       const MetricConfig& config = {});

// Predicts the per-dimension training mean for every clip.
class PriorBaseline {
 public:
  // Throws EmptyInput.
  static PriorBaseline Fit(const std::vector<TraitVector>& train_labels);
  const TraitVector& Predict() const { return means_; }

 private:
  TraitVector means_;
};

// Fraction of positions where the two bit vectors agree. Throws
// LengthMismatch or EmptyInput.
double ClassificationAccuracy(const std::vector<bool>& truth,
                              const std::vector<bool>& pred);

}  // namespace impressions

#endif  // IMPRESSIONS_METRICS_H_
