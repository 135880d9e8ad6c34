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

#include <cmath>

#include <doctest.h>
#include <json.hpp>

#include "impressions/synth.h"
#include "test_util.h"

namespace impressions {
namespace {

ClipRecord Rec(const std::string& id, const std::string& video, double v,
               Gender g = Gender::kUnknown, AgeGroup a = AgeGroup::kUnknown) {
  ClipRecord r;
  r.clip_id = id;
  r.source_video_id = video;
  r.gender = g;
  r.age_group = a;
  TraitVector t;
  t.values.fill(v);
  r.labels = t;
  return r;
}

const GroupPrior* FindPrior(const BiasAuditReport& r, const std::string& attr,
                            const std::string& group) {
  for (const auto& p : r.priors) {
    if (p.attribute == attr && p.group == group) return &p;
  }
  return nullptr;
}

TEST_CASE("tiers") {
  CHECK(TierFor(1e-7) == SignificanceTier::kDoubleStar);
  CHECK(TierFor(1e-4) == SignificanceTier::kStar);
  CHECK(TierFor(1e-3) == SignificanceTier::kNone);
  CHECK(TierMarker(SignificanceTier::kStar) == "*");
}

TEST_CASE("all-invited group has prior one and priors average to the base rate") {
  std::vector<ClipRecord> recs;
  for (int i = 0; i < 10; ++i) {
    recs.push_back(Rec("f" + std::to_string(i), "v", 0.9, Gender::kFemale, AgeGroup::k19To24));
    recs.push_back(Rec("m" + std::to_string(i), "v", 0.1 + 0.05 * i, Gender::kMale,
                       i < 3 ? AgeGroup::k7To13 : AgeGroup::k25To32));
  }
  const auto report = BiasAudit(recs, LabelMap(recs));
  CHECK(FindPrior(report, "gender", "female")->invite_prior == 1.0);
  CHECK(FindPrior(report, "gender", "female")->small);
  CHECK(FindPrior(report, "age", "7-13") == nullptr);
  CHECK(FindPrior(report, "age_gender", "19-24/female") != nullptr);
  for (const auto& base : report.base_rates) {
    double weighted = 0.0;
    long n = 0;
    for (const auto& p : report.priors) {
      if (p.attribute != base.attribute) continue;
      weighted += p.invite_prior * p.n;
      n += p.n;
    }
    CHECK(n == base.n);
    CHECK(std::abs(weighted / n - base.invite_rate) < 1e-12);
  }

  BiasAuditConfig keep;
  keep.exclude_under_14 = false;
  CHECK(FindPrior(BiasAudit(recs, LabelMap(recs), keep), "age", "7-13") != nullptr);
}

TEST_CASE("no demographics is an error") {
  std::vector<ClipRecord> recs = {Rec("a", "v", 0.2), Rec("b", "v", 0.4)};
  CHECK(testing::CodeOf([&] { BiasAudit(recs, LabelMap(recs)); }) ==
        ErrorCode::kNoDemographics);
}

TEST_CASE("correlations on synthetic biased and null data") {
  BiasSynthOptions opt;
  const auto recs = SynthesizeBiasData(opt, 3);
  const auto report = BiasAudit(recs, LabelMap(recs));
  for (const auto& c : report.correlations) {
    if (c.indicator == "female" && c.dimension == Dimension::kExtroversion) {
      CHECK(c.correlation.r > 0.15);
      CHECK(c.correlation.r < 0.25);
      CHECK(c.tier == SignificanceTier::kDoubleStar);
    }
  }
  opt.n = 1000;
  opt.female_extroversion_r = 0.0;
  const auto null_recs = SynthesizeBiasData(opt, 4);
  const auto null_report = BiasAudit(null_recs, LabelMap(null_recs));
  for (const auto& c : null_report.correlations) {
    if (c.indicator == "female") CHECK(std::abs(c.correlation.r) < 0.05);
  }
  const auto j = nlohmann::json::parse(FormatAuditJson(null_report, LabelVariation(null_recs)));
  CHECK(j.contains("correlations"));
  CHECK(!FormatAuditText(null_report, LabelVariation(null_recs)).empty());
}

TEST_CASE("label variation") {
  std::vector<ClipRecord> single = {Rec("a", "v1", 0.2), Rec("b", "v2", 0.6)};
  CHECK_FALSE(LabelVariation(single).intra_video);

  std::vector<ClipRecord> same = {Rec("a", "v1", 0.3), Rec("b", "v1", 0.3)};
  const auto v = LabelVariation(same);
  REQUIRE(v.intra_video);
  CHECK(v.intra_video->overall == 0.0);
  CHECK(v.intra_video->groups == 1);

  // User u has videos with mean labels 0.2 and 0.6 -> std 0.2.
  std::vector<ClipRecord> users = {Rec("a", "v1", 0.1), Rec("b", "v1", 0.3),
                                   Rec("c", "v2", 0.6)};
  for (auto& r : users) r.user_id = "u";
  const auto uv = LabelVariation(users);
  REQUIRE(uv.inter_video);
  CHECK(uv.inter_video->overall == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(uv.intra_video->overall == doctest::Approx(0.1).epsilon(1e-12));
}

}  // namespace
}  // namespace impressions
