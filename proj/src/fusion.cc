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

#include "impressions/fusion.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "impressions/error.h"

namespace impressions {

FeatureMatrix FeatureFuse(const std::vector<FeatureMatrix>& matrices) {
  if (matrices.empty()) throw Error(ErrorCode::kEmptyList, "nothing to fuse");
  const std::set<std::string> ids = matrices.front().Ids();
  std::string modality;
  std::vector<std::string> columns;
  for (const FeatureMatrix& m : matrices) {
    if (m.Ids() != ids) {
      throw Error(ErrorCode::kKeyMismatch,
                  "modality '" + m.modality() + "' covers different clips than '" +
                      matrices.front().modality() + "'");
    }
    modality += (modality.empty() ? "" : "+") + m.modality();
    for (const std::string& c : m.column_names()) {
      columns.push_back(m.modality() + ":" + c);
    }
  }
  FeatureMatrix fused(modality, columns);
  for (const std::string& id : ids) {
    std::vector<double> row;
    row.reserve(columns.size());
    for (const FeatureMatrix& m : matrices) {
      const auto& part = m.Row(id);
      row.insert(row.end(), part.begin(), part.end());
    }
    fused.AddRow(id, std::move(row));
  }
  return fused;
}

WeightSearchResult WeightedFusionSearch(std::span<const double> pred_a,
                                        std::span<const double> pred_b,
                                        std::span<const double> truth,
                                        double step,
                                        const MetricConfig& metric) {
  if (truth.empty()) {
    throw Error(ErrorCode::kEmptyValidation, "no validation clips");
  }
  if (pred_a.size() != truth.size() || pred_b.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, "fusion inputs are not aligned");
  }
  const double count = std::round(1.0 / step);
  if (!(step > 0.0) || count < 1.0 || std::abs(count * step - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "weight step must divide 1");
  }
  const int n = static_cast<int>(count);
  WeightSearchResult result;
  std::vector<double> blend(truth.size());
  for (int i = 0; i <= n; ++i) {
    const double w = static_cast<double>(i) / n;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      blend[k] = w * pred_a[k] + (1.0 - w) * pred_b[k];
    }
    const double s = Score(truth, blend, metric);
    result.grid_scores.push_back(s);
    if (i == 0 || s > result.score + 1e-12) {
      result.score = s;
      result.weight = w;
    }
  }
  return result;
}

TraitVector LateFusionAverage(const std::vector<TraitVector>& predictions) {
  if (predictions.empty()) {
    throw Error(ErrorCode::kEmptyList, "no predictions to average");
  }
  TraitVector out;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    // Summing in sorted order makes the result independent of input order.
    std::vector<double> column;
    for (const TraitVector& p : predictions) column.push_back(p[d]);
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    out[d] = sum / static_cast<double>(column.size());
  }
  return out;
}

}  // namespace impressions
