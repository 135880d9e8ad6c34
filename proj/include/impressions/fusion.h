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

// Feature-level fusion, weighted score fusion and late averaging.

#ifndef IMPRESSIONS_FUSION_H_
#define IMPRESSIONS_FUSION_H_

#include <span>
#include <vector>

#include "impressions/feature_matrix.h"
#include "impressions/metrics.h"
#include "impressions/traits.h"

namespace impressions {

// Column-wise concatenation. Columns are renamed "<modality>:<column>" and
// the result's modality is the input modalities joined with '+'. Throws
// EmptyList or KeyMismatch (inputs cover different clip ids).
FeatureMatrix FeatureFuse(const std::vector<FeatureMatrix>& matrices);

inline constexpr double kDefaultWeightStep = 0.05;

struct WeightSearchResult {
  double weight = 0.0;
  double score = 0.0;
  std::vector<double> grid_scores;  // one per w = 0, step, ..., 1
};

// Scores w*a + (1-w)*b for w on the grid {0, step, ..., 1} and keeps the
// best; a later grid point must win by more than 1e-12, so ties go to the
// smaller w. Throws EmptyValidation, LengthMismatch, or InvalidArgument when
// step does not divide 1.
WeightSearchResult WeightedFusionSearch(std::span<const double> pred_a,
                                        std::span<const double> pred_b,
                                        std::span<const double> truth,
                                        double step = kDefaultWeightStep,
                                        const MetricConfig& metric = {});

// Element-wise mean. Throws EmptyList.
TraitVector LateFusionAverage(const std::vector<TraitVector>& predictions);

}  // namespace impressions

#endif  // IMPRESSIONS_FUSION_H_
