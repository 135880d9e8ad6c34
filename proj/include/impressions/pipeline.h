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

// Stacked multimodal pipeline: one regressor per modality group, a fusion
// stage over the groups' predicted trait vectors, binarization thresholds
// and an explanation tree.

#ifndef IMPRESSIONS_PIPELINE_H_
#define IMPRESSIONS_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "impressions/dataset.h"
#include "impressions/explainer.h"
#include "impressions/feature_matrix.h"
#include "impressions/forest.h"
#include "impressions/learners.h"
#include "impressions/metrics.h"
#include "impressions/traits.h"

namespace impressions {

enum class LearnerKind { kElm, kPcaLinReg };
enum class FusionMode { kIdentity, kAverage, kWeighted, kForest };

std::string_view LearnerName(LearnerKind kind);
std::string_view FusionModeName(FusionMode mode);

struct GroupConfig {
  std::string name;
  std::vector<std::string> modalities;
};

struct ElmConfig {
  KernelType kernel = KernelType::kRbf;
  std::vector<double> c_grid;      // default: 1e-3 .. 1e3 by decades
  std::vector<double> gamma_grid;  // default: 2^-10 .. 2^2 by octaves
  bool center_targets = true;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  MetricConfig metric;
  LearnerKind learner = LearnerKind::kElm;
  std::vector<GroupConfig> groups;
  ElmConfig elm;
  double retained_variance = kDefaultRetainedVariance;
  bool standardize = true;
  // Folds for hyperparameter selection and for the out-of-fold predictions
  // the fusion stage is trained on.
  int folds = 5;
  FusionMode fusion = FusionMode::kForest;
  double weight_step = 0.05;
  // When set, weighted fusion uses this weight for every dimension instead
  // of searching.
  std::optional<double> fixed_weight;
  ForestGrid forest;
  bool explanation_tree = true;

  PipelineConfig();
};

// Reads the JSON config format; unknown keys and bad values throw
// ConfigError.
PipelineConfig ParsePipelineConfig(std::string_view json_text);
std::string FormatPipelineConfig(const PipelineConfig& config);

struct GroupModel {
  std::string name;
  std::vector<std::string> modalities;
  std::vector<std::string> columns;  // "<modality>:<column>"
  std::vector<std::size_t> modality_widths;
  Standardizer standardizer;
  LearnerKind learner = LearnerKind::kElm;
  KernelElmModel elm;
  PcaLinRegModel pca;
  double cv_mae = 0.0;  // selection criterion of the chosen hyperparameters

  // Unclipped N x 6 predictions for raw feature rows (standardization, when
  // enabled, is applied here).
  Eigen::MatrixXd Predict(const Eigen::MatrixXd& raw_rows) const;
};

inline constexpr int kPipelineFormatVersion = 1;

struct StackedPipeline {
  PipelineConfig config;
  std::vector<GroupModel> groups;
  FusionMode fusion = FusionMode::kIdentity;
  PerDimension<double> weights{};          // weighted mode, weight of group 0
  std::vector<RandomForestModel> forests;  // forest mode, one per dimension
  BinarizationThresholds thresholds;
  std::optional<ExplanationTree> tree;
  double tree_training_accuracy = 0.0;
};

// Concatenates the configured modalities of one group for the given ids.
// Throws MissingRepresentation when a modality file is absent and UnknownId
// when a clip lacks a row.
Eigen::MatrixXd GatherGroup(const GroupConfig& group,
                            const std::map<std::string, FeatureMatrix>& features,
                            const std::vector<std::string>& ids);

// Trains on split.train_ids, which must all carry labels.
StackedPipeline PipelineTrain(const Dataset& dataset, const DatasetSplit& split,
                              const std::map<std::string, FeatureMatrix>& features,
                              const PipelineConfig& config);

struct PipelineOutput {
  std::vector<std::string> ids;
  std::vector<TraitVector> fused;  // clipped to [0,1]
  // per_group[g][i]: clipped prediction of group g for ids[i].
  std::vector<std::vector<TraitVector>> per_group;
};

PipelineOutput PipelinePredict(const StackedPipeline& pipeline,
                               const std::map<std::string, FeatureMatrix>& features,
                               const std::vector<std::string>& ids);

// Fusion stage alone, applied to clipped group predictions (one N x 6 matrix
// per group). Returns clipped fused predictions.
Eigen::MatrixXd FuseGroupPredictions(const StackedPipeline& pipeline,
                                     const std::vector<Eigen::MatrixXd>& groups);

std::string FormatPredictions(const std::vector<std::string>& ids,
                              const std::vector<TraitVector>& predictions);
std::map<std::string, TraitVector> LoadPredictions(
    const std::filesystem::path& path);

}  // namespace impressions

#endif  // IMPRESSIONS_PIPELINE_H_
