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

#include "impressions/metrics.h"

#include <cmath>
#include <string>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

void CheckPair(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw Error(ErrorCode::kEmptyInput, "no samples to score");
}

void CheckUnit(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " value " + FormatDouble(v) +
                      " outside [0,1]");
    }
  }
}

}  // namespace

std::string_view MetricVariantName(MetricVariant v) {
  return v == MetricVariant::kMaeComplement ? "mae_complement" : "eq1_literal";
}

std::optional<MetricVariant> ParseMetricVariant(std::string_view text) {
  const std::string t = ToLower(Trim(text));
  if (t == "mae_complement") return MetricVariant::kMaeComplement;
  if (t == "eq1_literal") return MetricVariant::kEq1Literal;
  return std::nullopt;
}

double MeanAbsoluteError(std::span<const double> truth,
                         std::span<const double> pred) {
  CheckPair(truth.size(), pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sum += std::abs(truth[i] - pred[i]);
  }
  return sum / static_cast<double>(truth.size());
}

double Score(std::span<const double> truth, std::span<const double> pred,
             const MetricConfig& config) {
  CheckPair(truth.size(), pred.size());
  CheckUnit(truth, "truth");
  CheckUnit(pred, "prediction");
  const double mae = MeanAbsoluteError(truth, pred);
  if (config.variant == MetricVariant::kMaeComplement) return 1.0 - mae;

  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double spread = 0.0;
  for (double t : truth) spread += std::abs(t - mean);
  if (!(spread > 0.0)) {
    throw Error(ErrorCode::kDegenerateDenominator,
                "eq1_literal is undefined for constant truth");
  }
  return 1.0 - mae / spread;
}

PerDimension<double> ScorePerDimension(const std::vector<TraitVector>& truth,
                                       const std::vector<TraitVector>& pred,
                                       const MetricConfig& config) {
  CheckPair(truth.size(), pred.size());
  PerDimension<double> out{};
  std::vector<double> t(truth.size()), p(pred.size());
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    for (std::size_t i = 0; i < truth.size(); ++i) {
      t[i] = truth[i][d];
      p[i] = pred[i][d];
    }
    out[d] = Score(t, p, config);
  }
  return out;
}

PriorBaseline PriorBaseline::Fit(const std::vector<TraitVector>& train_labels) {
  if (train_labels.empty()) {
    throw Error(ErrorCode::kEmptyInput, "prior baseline needs train labels");
  }
  PriorBaseline prior;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    double sum = 0.0;
    for (const TraitVector& t : train_labels) sum += t[d];
    prior.means_[d] = sum / static_cast<double>(train_labels.size());
  }
  return prior;
}

double ClassificationAccuracy(const std::vector<bool>& truth,
                              const std::vector<bool>& pred) {
  CheckPair(truth.size(), pred.size());
  std::size_t agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) agree += truth[i] == pred[i];
  return static_cast<double>(agree) / static_cast<double>(truth.size());
}

}  // namespace impressions
