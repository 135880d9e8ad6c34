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

// Dataset analyses: demographic correlations and conditional invite priors,
// age-group priors, and intra-/inter-video label variation. Every analysis
// takes an explicit clip_id -> scores map so it runs unchanged on ground
// truth and on model predictions.

#ifndef IMPRESSIONS_AUDIT_H_
#define IMPRESSIONS_AUDIT_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "impressions/dataset.h"
#include "impressions/stats.h"
#include "impressions/traits.h"

namespace impressions {

enum class SignificanceTier { kNone, kStar, kDoubleStar };

// kStar for p < 1e-3, kDoubleStar for p < 1e-6.
SignificanceTier TierFor(double p_value);
std::string_view TierMarker(SignificanceTier tier);  // "", "*", "**"

struct IndicatorCorrelation {
  std::string indicator;  // female, asian, caucasian, afro_american
  Dimension dimension = Dimension::kInterview;
  Correlation correlation;
  SignificanceTier tier = SignificanceTier::kNone;
};

struct GroupPrior {
  std::string attribute;  // gender, ethnicity, age, age_gender
  std::string group;      // e.g. female, asian, 19-24, 19-24/female
  long n = 0;
  double invite_prior = 0.0;  // fraction with interview >= global mean
  PerDimension<double> mean_scores{};
  bool small = false;  // n below the configured minimum
};

// Invite rate over the clips with a known value of one attribute; equals
// the size-weighted average of that attribute's group priors.
struct AttributeBaseRate {
  std::string attribute;
  long n = 0;
  double invite_rate = 0.0;
};

struct AgeCorrelation {
  std::string gender;  // all, male, female
  long n = 0;
  std::optional<Correlation> correlation;  // absent when undefined
};

struct BiasAuditConfig {
  long min_group_size = 30;
  // Drop the 0-6 and 7-13 bands from the age analyses.
  bool exclude_under_14 = true;
};

struct BiasAuditReport {
  long n = 0;
  double interview_mean = 0.0;     // binarization threshold
  double global_invite_rate = 0.0;
  std::vector<IndicatorCorrelation> correlations;
  std::vector<GroupPrior> priors;
  std::vector<AttributeBaseRate> base_rates;
  std::vector<AgeCorrelation> age_correlations;
  std::vector<std::string> notices;
};

// Audits the clips that have an entry in `scores`. Throws NoDemographics
// when none of them carries gender, ethnicity or age.
BiasAuditReport BiasAudit(const std::vector<ClipRecord>& records,
                          const std::map<std::string, TraitVector>& scores,
                          const BiasAuditConfig& config = {});

// clip_id -> labels for every labeled record.
std::map<std::string, TraitVector> LabelMap(
    const std::vector<ClipRecord>& records);

struct VariationSummary {
  long groups = 0;  // videos (intra) or users (inter) contributing
  PerDimension<double> mean_std{};
  double overall = 0.0;  // mean over dimensions
};

struct LabelVariationReport {
  std::optional<VariationSummary> intra_video;  // absent: no multi-clip video
  std::optional<VariationSummary> inter_video;  // absent: no multi-video user
};

// Intra: per source video with >= 2 clips, the per-dimension population
// std of clip labels, averaged over videos. Inter: per user with >= 2
// videos, labels are first averaged per video, then the per-dimension std
// across that user's videos is averaged over users.
LabelVariationReport LabelVariation(const std::vector<ClipRecord>& records);

std::string FormatAuditText(const BiasAuditReport& audit,
                            const LabelVariationReport& variation);
std::string FormatAuditJson(const BiasAuditReport& audit,
                            const LabelVariationReport& variation);

}  // namespace impressions

#endif  // IMPRESSIONS_AUDIT_H_
