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

#include "impressions/audit.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

struct AuditRow {
  const ClipRecord* record;
  TraitVector scores;
  bool invite;
};

bool AgeIncluded(AgeGroup a, const BiasAuditConfig& config) {
  if (a == AgeGroup::kUnknown) return false;
  if (!config.exclude_under_14) return true;
  return a != AgeGroup::k0To6 && a != AgeGroup::k7To13;
}

// Correlates a 0/1 indicator with every dimension over `rows`.
void AddIndicator(const std::string& name, const std::vector<AuditRow>& rows,
                  const std::function<bool(const AuditRow&)>& eligible,
                  const std::function<bool(const AuditRow&)>& indicator,
                  BiasAuditReport& report) {
  std::vector<double> x;
  std::vector<std::vector<double>> ys(kNumDimensions);
  for (const AuditRow& row : rows) {
    if (!eligible(row)) continue;
    x.push_back(indicator(row) ? 1.0 : 0.0);
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      ys[d].push_back(row.scores[d]);
    }
  }
  for (Dimension dim : kAllDimensions) {
    try {
      IndicatorCorrelation ic;
      ic.indicator = name;
      ic.dimension = dim;
      ic.correlation = PearsonWithP(x, ys[Index(dim)]);
      ic.tier = TierFor(ic.correlation.p_value);
      report.correlations.push_back(ic);
    } catch (const Error& e) {
      report.notices.push_back("correlation " + name + " x " +
                               std::string(DimensionName(dim)) +
                               " skipped: " + e.what());
    }
  }
}

// Adds one prior per group key, in key order, plus the attribute base rate.
void AddPriors(const std::string& attribute, const std::vector<AuditRow>& rows,
               const std::function<std::optional<std::string>(const AuditRow&)>&
                   group_of,
               const BiasAuditConfig& config, BiasAuditReport& report) {
  struct Acc {
    long n = 0;
    long invites = 0;
    PerDimension<double> sums{};
  };
  std::map<std::string, Acc> groups;
  std::vector<std::string> order;
  long total = 0, total_invites = 0;
  for (const AuditRow& row : rows) {
    auto key = group_of(row);
    if (!key) continue;
    auto [it, inserted] = groups.try_emplace(*key);
    if (inserted) order.push_back(*key);
    Acc& acc = it->second;
    ++acc.n;
    acc.invites += row.invite ? 1 : 0;
    for (std::size_t d = 0; d < kNumDimensions; ++d) acc.sums[d] += row.scores[d];
    ++total;
    total_invites += row.invite ? 1 : 0;
  }
  if (total == 0) {
    report.notices.push_back("no clips with known " + attribute);
    return;
  }
  for (const auto& [key, acc] : groups) {
    GroupPrior prior;
    prior.attribute = attribute;
    prior.group = key;
    prior.n = acc.n;
    prior.invite_prior =
        static_cast<double>(acc.invites) / static_cast<double>(acc.n);
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      prior.mean_scores[d] = acc.sums[d] / static_cast<double>(acc.n);
    }
    prior.small = acc.n < config.min_group_size;
    if (prior.small) {
      report.notices.push_back(attribute + " group " + key + " has n=" +
                               std::to_string(acc.n) + " < " +
                               std::to_string(config.min_group_size));
    }
    report.priors.push_back(std::move(prior));
  }
  report.base_rates.push_back(
      {attribute, total,
       static_cast<double>(total_invites) / static_cast<double>(total)});
}

std::optional<std::string> GenderKey(const AuditRow& row) {
  if (row.record->gender == Gender::kUnknown) return std::nullopt;
  return std::string(GenderName(row.record->gender));
}

std::optional<std::string> EthnicityKey(const AuditRow& row) {
  if (row.record->ethnicity == Ethnicity::kUnknown) return std::nullopt;
  return std::string(EthnicityName(row.record->ethnicity));
}

std::optional<VariationSummary> Summarize(
    const std::vector<PerDimension<double>>& per_group) {
  if (per_group.empty()) return std::nullopt;
  VariationSummary s;
  s.groups = static_cast<long>(per_group.size());
  for (const auto& stds : per_group) {
    for (std::size_t d = 0; d < kNumDimensions; ++d) s.mean_std[d] += stds[d];
  }
  double overall = 0.0;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    s.mean_std[d] /= static_cast<double>(per_group.size());
    overall += s.mean_std[d];
  }
  s.overall = overall / static_cast<double>(kNumDimensions);
  return s;
}

PerDimension<double> StdPerDimension(const std::vector<TraitVector>& rows) {
  PerDimension<double> out{};
  std::vector<double> column(rows.size());
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    for (std::size_t i = 0; i < rows.size(); ++i) column[i] = rows[i][d];
    out[d] = PopulationStd(column);
  }
  return out;
}

std::string Fixed(double v, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

SignificanceTier TierFor(double p_value) {
  if (p_value < 1e-6) return SignificanceTier::kDoubleStar;
  if (p_value < 1e-3) return SignificanceTier::kStar;
  return SignificanceTier::kNone;
}

std::string_view TierMarker(SignificanceTier tier) {
  switch (tier) {
    case SignificanceTier::kStar:
      return "*";
    case SignificanceTier::kDoubleStar:
      return "**";
    default:
      return "";
  }
}

std::map<std::string, TraitVector> LabelMap(
    const std::vector<ClipRecord>& records) {
  std::map<std::string, TraitVector> out;
  for (const ClipRecord& r : records) {
    if (r.labels) out.emplace(r.clip_id, *r.labels);
  }
  return out;
}

BiasAuditReport BiasAudit(const std::vector<ClipRecord>& records,
                          const std::map<std::string, TraitVector>& scores,
                          const BiasAuditConfig& config) {
  std::vector<AuditRow> rows;
  bool any_demographic = false;
  for (const ClipRecord& r : records) {
    auto it = scores.find(r.clip_id);
    if (it == scores.end()) continue;
    rows.push_back({&r, it->second, false});
    any_demographic |= r.gender != Gender::kUnknown ||
                       r.ethnicity != Ethnicity::kUnknown ||
                       r.age_group != AgeGroup::kUnknown;
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kNoDemographics, "no audited clips have scores");
  }
  if (!any_demographic) {
    throw Error(ErrorCode::kNoDemographics,
                "no audited clip has gender, ethnicity or age annotations");
  }

  BiasAuditReport report;
  report.n = static_cast<long>(rows.size());
  double sum = 0.0;
  for (const AuditRow& row : rows) sum += row.scores[Dimension::kInterview];
  report.interview_mean = sum / static_cast<double>(rows.size());
  long invites = 0;
  for (AuditRow& row : rows) {
    row.invite = row.scores[Dimension::kInterview] >= report.interview_mean;
    invites += row.invite ? 1 : 0;
  }
  report.global_invite_rate =
      static_cast<double>(invites) / static_cast<double>(rows.size());

  auto known_gender = [](const AuditRow& r) {
    return r.record->gender != Gender::kUnknown;
  };
  auto known_ethnicity = [](const AuditRow& r) {
    return r.record->ethnicity != Ethnicity::kUnknown;
  };
  AddIndicator("female", rows, known_gender,
               [](const AuditRow& r) { return r.record->gender == Gender::kFemale; },
               report);
  for (Ethnicity e :
       {Ethnicity::kAsian, Ethnicity::kCaucasian, Ethnicity::kAfroAmerican}) {
    AddIndicator(std::string(EthnicityName(e)), rows, known_ethnicity,
                 [e](const AuditRow& r) { return r.record->ethnicity == e; },
                 report);
  }

  AddPriors("gender", rows, GenderKey, config, report);
  AddPriors("ethnicity", rows, EthnicityKey, config, report);
  AddPriors(
      "age", rows,
      [&](const AuditRow& r) -> std::optional<std::string> {
        if (!AgeIncluded(r.record->age_group, config)) return std::nullopt;
        return std::string(AgeGroupName(r.record->age_group));
      },
      config, report);
  AddPriors(
      "age_gender", rows,
      [&](const AuditRow& r) -> std::optional<std::string> {
        if (!AgeIncluded(r.record->age_group, config)) return std::nullopt;
        auto g = GenderKey(r);
        if (!g) return std::nullopt;
        return std::string(AgeGroupName(r.record->age_group)) + "/" + *g;
      },
      config, report);

  for (std::string_view gender : {"all", "male", "female"}) {
    std::vector<double> age, interview;
    for (const AuditRow& row : rows) {
      if (!AgeIncluded(row.record->age_group, config)) continue;
      if (gender != "all" && GenderKey(row) != std::string(gender)) continue;
      age.push_back(static_cast<double>(row.record->age_group));
      interview.push_back(row.scores[Dimension::kInterview]);
    }
    AgeCorrelation ac;
    ac.gender = std::string(gender);
    ac.n = static_cast<long>(age.size());
    try {
      ac.correlation = PearsonWithP(age, interview);
    } catch (const Error& e) {
      report.notices.push_back("age correlation (" + ac.gender +
                               ") skipped: " + e.what());
    }
    report.age_correlations.push_back(std::move(ac));
  }
  return report;
}

LabelVariationReport LabelVariation(const std::vector<ClipRecord>& records) {
  std::map<std::string, std::vector<TraitVector>> by_video;
  std::map<std::string, std::set<std::string>> videos_by_user;
  for (const ClipRecord& r : records) {
    if (!r.labels) continue;
    by_video[r.source_video_id].push_back(*r.labels);
    if (r.user_id && !r.user_id->empty()) {
      videos_by_user[*r.user_id].insert(r.source_video_id);
    }
  }
  std::vector<PerDimension<double>> intra;
  for (const auto& [video, labels] : by_video) {
    if (labels.size() >= 2) intra.push_back(StdPerDimension(labels));
  }
  std::vector<PerDimension<double>> inter;
  for (const auto& [user, videos] : videos_by_user) {
    if (videos.size() < 2) continue;
    std::vector<TraitVector> video_means;
    for (const std::string& video : videos) {
      const auto& labels = by_video.at(video);
      TraitVector mean;
      for (const TraitVector& t : labels) {
        for (std::size_t d = 0; d < kNumDimensions; ++d) mean[d] += t[d];
      }
      for (std::size_t d = 0; d < kNumDimensions; ++d) {
        mean[d] /= static_cast<double>(labels.size());
      }
      video_means.push_back(mean);
    }
    inter.push_back(StdPerDimension(video_means));
  }
  return {Summarize(intra), Summarize(inter)};
}

std::string FormatAuditText(const BiasAuditReport& audit,
                            const LabelVariationReport& variation) {
  std::ostringstream out;
  out << "Bias audit over " << audit.n << " clips\n";
  out << "interview threshold (mean): " << Fixed(audit.interview_mean, 4)
      << ", invite rate: " << Fixed(audit.global_invite_rate, 4) << "\n\n";

  out << "Pearson correlations (* p < 0.001, ** p < 1e-6)\n";
  std::vector<std::string> indicators;
  for (const auto& c : audit.correlations) {
    if (std::find(indicators.begin(), indicators.end(), c.indicator) ==
        indicators.end()) {
      indicators.push_back(c.indicator);
    }
  }
  out << Pad("dimension", 18);
  for (const auto& ind : indicators) out << Pad(ind, 16);
  out << "\n";
  for (Dimension dim : kAllDimensions) {
    out << Pad(std::string(DimensionName(dim)), 18);
    for (const auto& ind : indicators) {
      std::string cell = "-";
      for (const auto& c : audit.correlations) {
        if (c.indicator == ind && c.dimension == dim) {
          cell = Fixed(c.correlation.r, 3) + std::string(TierMarker(c.tier));
        }
      }
      out << Pad(cell, 16);
    }
    out << "\n";
  }

  out << "\nConditional invite priors and mean scores\n";
  out << Pad("attribute", 12) << Pad("group", 18) << Pad("n", 8)
      << Pad("p(invite)", 11);
  for (Dimension dim : kAllDimensions) {
    out << Pad(std::string(DimensionColumn(dim)), 10);
  }
  out << "\n";
  for (const auto& p : audit.priors) {
    out << Pad(p.attribute, 12) << Pad(p.group, 18)
        << Pad(std::to_string(p.n) + (p.small ? "!" : ""), 8)
        << Pad(Fixed(p.invite_prior, 4), 11);
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      out << Pad(Fixed(p.mean_scores[d], 4), 10);
    }
    out << "\n";
  }
  out << "(! marks groups below the minimum size)\n";

  out << "\nAge group vs interview correlation\n";
  for (const auto& ac : audit.age_correlations) {
    out << Pad(ac.gender, 8) << "n=" << Pad(std::to_string(ac.n), 8);
    if (ac.correlation) {
      out << "r=" << Fixed(ac.correlation->r, 3)
          << " p=" << FormatDouble(ac.correlation->p_value);
    } else {
      out << "undefined";
    }
    out << "\n";
  }

  out << "\nLabel variation (mean standard deviation)\n";
  out << Pad("dimension", 18) << Pad("intra-video", 14) << "inter-video\n";
  auto cell = [](const std::optional<VariationSummary>& s, std::size_t d) {
    return s ? Fixed(s->mean_std[d], 4) : std::string("absent");
  };
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    out << Pad(std::string(DimensionName(kAllDimensions[d])), 18)
        << Pad(cell(variation.intra_video, d), 14)
        << cell(variation.inter_video, d) << "\n";
  }
  out << Pad("average", 18)
      << Pad(variation.intra_video ? Fixed(variation.intra_video->overall, 4)
                                   : "absent",
             14)
      << (variation.inter_video ? Fixed(variation.inter_video->overall, 4)
                                : "absent")
      << "\n";

  if (!audit.notices.empty()) {
    out << "\nNotices\n";
    for (const auto& n : audit.notices) out << "- " << n << "\n";
  }
  return out.str();
}

std::string FormatAuditJson(const BiasAuditReport& audit,
                            const LabelVariationReport& variation) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["n"] = audit.n;
  j["interview_mean"] = audit.interview_mean;
  j["global_invite_rate"] = audit.global_invite_rate;
  ordered_json corr = ordered_json::array();
  for (const auto& c : audit.correlations) {
    corr.push_back({{"indicator", c.indicator},
                    {"dimension", DimensionName(c.dimension)},
                    {"r", c.correlation.r},
                    {"p_value", c.correlation.p_value},
                    {"n", c.correlation.n},
                    {"tier", TierMarker(c.tier)}});
  }
  j["correlations"] = corr;
  ordered_json priors = ordered_json::array();
  for (const auto& p : audit.priors) {
    ordered_json means;
    for (Dimension dim : kAllDimensions) {
      means[std::string(DimensionName(dim))] = p.mean_scores[Index(dim)];
    }
    priors.push_back({{"attribute", p.attribute},
                      {"group", p.group},
                      {"n", p.n},
                      {"invite_prior", p.invite_prior},
                      {"small", p.small},
                      {"mean_scores", means}});
  }
  j["priors"] = priors;
  ordered_json base = ordered_json::array();
  for (const auto& b : audit.base_rates) {
    base.push_back(
        {{"attribute", b.attribute}, {"n", b.n}, {"invite_rate", b.invite_rate}});
  }
  j["base_rates"] = base;
  ordered_json ages = ordered_json::array();
  for (const auto& ac : audit.age_correlations) {
    ordered_json a = {{"gender", ac.gender}, {"n", ac.n}};
    if (ac.correlation) {
      a["r"] = ac.correlation->r;
      a["p_value"] = ac.correlation->p_value;
    } else {
      a["r"] = nullptr;
      a["p_value"] = nullptr;
    }
    ages.push_back(a);
  }
  j["age_correlations"] = ages;
  auto summary = [](const std::optional<VariationSummary>& s) -> ordered_json {
    if (!s) return nullptr;
    ordered_json v;
    v["groups"] = s->groups;
    for (Dimension dim : kAllDimensions) {
      v["mean_std"][std::string(DimensionName(dim))] = s->mean_std[Index(dim)];
    }
    v["overall"] = s->overall;
    return v;
  };
  j["label_variation"] = {{"intra_video", summary(variation.intra_video)},
                          {"inter_video", summary(variation.inter_video)}};
  j["notices"] = audit.notices;
  return j.dump(2) + "\n";
}

}  // namespace impressions
