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

#include "impressions/pipeline.h"

#include <doctest.h>

#include "impressions/fusion.h"
#include "impressions/metrics.h"
#include "impressions/serialization.h"
#include "impressions/synth.h"
#include "impressions/table_io.h"
#include "test_util.h"

namespace impressions {
namespace {

using testing::CodeOf;

struct Fixture {
  FusionSynth data;
  Dataset dataset;
  std::vector<std::string> train, validation;
};

Fixture MakeFixture(int clips, std::uint64_t seed) {
  FusionSynthOptions opt;
  opt.n_clips = clips;
  Fixture f;
  f.data = SynthesizeFusionData(opt, seed);
  f.dataset = Dataset(f.data.records, ".");
  f.train.assign(f.data.split.train_ids.begin(), f.data.split.train_ids.end());
  f.validation.assign(f.data.split.validation_ids.begin(), f.data.split.validation_ids.end());
  return f;
}

PipelineConfig SmallConfig(const std::vector<GroupConfig>& groups, FusionMode mode) {
  PipelineConfig c;
  c.seed = 3;
  c.groups = groups;
  c.elm.c_grid = {1.0, 10.0};
  c.elm.gamma_grid = {0.05, 0.2};
  c.folds = 3;
  c.fusion = mode;
  c.forest.n_trees = {20};
  c.forest.features_per_split = {"sqrt"};
  c.forest.max_depth = {0};
  c.forest.min_leaf = {5};
  return c;
}

TEST_CASE("identity fusion reduces to the bare ELM") {
  const Fixture f = MakeFixture(80, 1);
  const auto cfg = SmallConfig({{"face", {"face"}}}, FusionMode::kIdentity);
  const StackedPipeline p = PipelineTrain(f.dataset, f.data.split, f.data.features, cfg);
  const GroupModel& g = p.groups[0];

  const Eigen::MatrixXd xtr = f.data.features.at("face").Gather(f.train);
  Eigen::MatrixXd y(xtr.rows(), 6);
  for (std::size_t i = 0; i < f.train.size(); ++i) {
    const auto& l = *f.dataset.Get(f.train[i]).labels;
    for (int d = 0; d < 6; ++d) y(static_cast<Eigen::Index>(i), d) = l[static_cast<std::size_t>(d)];
  }
  const Standardizer s = Standardizer::Fit(xtr);
  const KernelElmModel bare = ElmFit(s.Apply(xtr), y, g.elm.kernel, g.elm.c, true);
  const Eigen::MatrixXd expect =
      bare.Predict(s.Apply(f.data.features.at("face").Gather(f.validation)))
          .cwiseMax(0.0)
          .cwiseMin(1.0);
  const PipelineOutput out = PipelinePredict(p, f.data.features, f.validation);
  for (std::size_t i = 0; i < f.validation.size(); ++i) {
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      CHECK(out.fused[i][d] ==
            doctest::Approx(expect(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted fusion at one half is the exact group average") {
  const Fixture f = MakeFixture(80, 2);
  auto cfg = SmallConfig({{"face", {"face"}}, {"audio", {"audio"}}}, FusionMode::kWeighted);
  cfg.fixed_weight = 0.5;
  const StackedPipeline p = PipelineTrain(f.dataset, f.data.split, f.data.features, cfg);
  const PipelineOutput out = PipelinePredict(p, f.data.features, f.validation);
  for (std::size_t i = 0; i < out.ids.size(); ++i) {
    CHECK(out.fused[i] == LateFusionAverage({out.per_group[0][i], out.per_group[1][i]}));
  }
}

TEST_CASE("forest pipeline beats the prior and survives serialization") {
  const Fixture f = MakeFixture(120, 3);
  const auto cfg = SmallConfig({{"face", {"face"}}, {"audio", {"audio"}}}, FusionMode::kForest);
  const StackedPipeline p = PipelineTrain(f.dataset, f.data.split, f.data.features, cfg);
  CHECK(p.forests.size() == kNumDimensions);
  REQUIRE(p.tree);

  std::vector<TraitVector> truth, labels;
  for (const auto& id : f.train) truth.push_back(*f.dataset.Get(id).labels);
  const PipelineOutput out = PipelinePredict(p, f.data.features, f.train);
  const auto prior = PriorBaseline::Fit(truth);
  const auto model_scores = ScorePerDimension(truth, out.fused);
  const auto prior_scores =
      ScorePerDimension(truth, std::vector<TraitVector>(truth.size(), prior.Predict()));
  CHECK(model_scores[0] > prior_scores[0]);

  const std::string text = SerializePipeline(p);
  const StackedPipeline back = DeserializePipeline(text);
  CHECK(SerializePipeline(back) == text);
  const PipelineOutput again = PipelinePredict(back, f.data.features, f.train);
  CHECK(again.fused == out.fused);
  CHECK(SerializePipeline(PipelineTrain(f.dataset, f.data.split, f.data.features, cfg)) == text);

  CHECK(CodeOf([&] { DeserializePipeline("{\"format\":\"other\",\"version\":1}"); }) ==
        ErrorCode::kConfigError);
}

TEST_CASE("missing modality and config validation") {
  const Fixture f = MakeFixture(40, 4);
  auto features = f.data.features;
  features.erase("audio");
  const auto cfg = SmallConfig({{"face", {"face"}}, {"audio", {"audio"}}}, FusionMode::kAverage);
  CHECK(CodeOf([&] { PipelineTrain(f.dataset, f.data.split, features, cfg); }) ==
        ErrorCode::kMissingRepresentation);

  CHECK(CodeOf([] { ParsePipelineConfig("{\"groups\":[{\"modalities\":[\"a\"]}],\"bogus\":1}"); }) ==
        ErrorCode::kConfigError);
  CHECK(CodeOf([] { ParsePipelineConfig("not json"); }) == ErrorCode::kConfigError);
  CHECK(CodeOf([] {
          ParsePipelineConfig(
              "{\"groups\":[{\"modalities\":[\"a\"]}],\"fusion\":{\"mode\":\"weighted\"}}");
        }) == ErrorCode::kConfigError);
  const PipelineConfig parsed = ParsePipelineConfig(FormatPipelineConfig(cfg));
  CHECK(FormatPipelineConfig(parsed) == FormatPipelineConfig(cfg));
  CHECK(parsed.fusion == FusionMode::kAverage);
}

TEST_CASE("prediction file round trip") {
  const auto dir = testing::TempDir("predictions");
  TraitVector t;
  for (std::size_t d = 0; d < kNumDimensions; ++d) t[d] = 0.1 * static_cast<double>(d) + 0.05;
  WriteStringToFile(dir / "p.csv", FormatPredictions({"a", "b"}, {t, t}));
  const auto back = LoadPredictions(dir / "p.csv");
  CHECK(back.at("b") == t);
}

}  // namespace
}  // namespace impressions
