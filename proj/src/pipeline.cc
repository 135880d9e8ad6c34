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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "impressions/error.h"
#include "impressions/fusion.h"
#include "impressions/rng.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

using Eigen::MatrixXd;
using nlohmann::json;

// Stream indices handed to DeriveSeed.
constexpr std::uint64_t kFoldStream = 1;
constexpr std::uint64_t kForestStream = 1000;

MatrixXd Clip01(MatrixXd m) { return m.cwiseMax(0.0).cwiseMin(1.0); }

Standardizer IdentityStandardizer(Eigen::Index width) {
  Standardizer s;
  s.mean = Eigen::RowVectorXd::Zero(width);
  s.scale = Eigen::RowVectorXd::Ones(width);
  return s;
}

Standardizer FitStandardizer(const MatrixXd& x, bool enabled) {
  return enabled ? Standardizer::Fit(x) : IdentityStandardizer(x.cols());
}

// fold_of[i] for a seeded shuffle of 0..n-1 dealt round-robin into k folds.
std::vector<int> AssignFolds(int n, int k, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i % k;
  }
  return fold_of;
}

MatrixXd SelectRows(const MatrixXd& m, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

struct Fold {
  std::vector<int> train;
  std::vector<int> held_out;
};

std::vector<Fold> MakeFolds(const std::vector<int>& fold_of, int k) {
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      (fold_of[i] == f ? folds[static_cast<std::size_t>(f)].held_out
                       : folds[static_cast<std::size_t>(f)].train)
          .push_back(static_cast<int>(i));
    }
  }
  return folds;
}

struct ElmChoice {
  double c = 1.0;
  double gamma = 1.0;
};

MatrixXd ElmDual(const MatrixXd& k_train, const MatrixXd& targets, double c) {
  MatrixXd system = k_train;
  system.diagonal().array() += 1.0 / c;
  Eigen::LLT<MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem, "ELM system is not positive definite");
  }
  return llt.solve(targets);
}

struct GroupFit {
  GroupModel model;
  MatrixXd oof;  // clipped out-of-fold predictions, train rows x 6
};

GroupFit FitGroup(const GroupConfig& group, const MatrixXd& raw, const MatrixXd& y,
                  const PipelineConfig& config, const std::vector<Fold>& folds) {
  GroupFit fit;
  GroupModel& model = fit.model;
  model.name = group.name;
  model.modalities = group.modalities;
  model.learner = config.learner;
  const Eigen::Index n = raw.rows();

  struct FoldData {
    MatrixXd train, held_out, y_train;
    Eigen::RowVectorXd offset;
  };
  std::vector<FoldData> data;
  for (const Fold& f : folds) {
    FoldData d;
    const MatrixXd tr = SelectRows(raw, f.train);
    const Standardizer s = FitStandardizer(tr, config.standardize);
    d.train = s.Apply(tr);
    d.held_out = s.Apply(SelectRows(raw, f.held_out));
    d.y_train = SelectRows(y, f.train);
    d.offset = config.elm.center_targets
                   ? Eigen::RowVectorXd(d.y_train.colwise().mean())
                   : Eigen::RowVectorXd::Zero(y.cols());
    data.push_back(std::move(d));
  }

  fit.oof = MatrixXd::Zero(n, y.cols());
  if (config.learner == LearnerKind::kElm) {
    std::vector<double> gammas = config.elm.gamma_grid;
    if (config.elm.kernel == KernelType::kLinear) gammas = {1.0};
    ElmChoice best;
    double best_err = std::numeric_limits<double>::infinity();
    MatrixXd best_oof;
    for (double gamma : gammas) {
      const Kernel kernel{config.elm.kernel, gamma};
      std::vector<MatrixXd> k_train, k_held;
      for (const FoldData& d : data) {
        k_train.push_back(KernelMatrix(d.train, d.train, kernel));
        k_held.push_back(KernelMatrix(d.held_out, d.train, kernel));
      }
      for (double c : config.elm.c_grid) {
        MatrixXd oof(n, y.cols());
        for (std::size_t f = 0; f < folds.size(); ++f) {
          const FoldData& d = data[f];
          const MatrixXd alpha =
              ElmDual(k_train[f], d.y_train.rowwise() - d.offset, c);
          const MatrixXd pred =
              Clip01((k_held[f] * alpha).rowwise() + d.offset);
          for (std::size_t i = 0; i < folds[f].held_out.size(); ++i) {
            oof.row(folds[f].held_out[i]) = pred.row(static_cast<Eigen::Index>(i));
          }
        }
        const double err = (oof - y).cwiseAbs().mean();
        if (err < best_err) {
          best_err = err;
          best = {c, gamma};
          best_oof = std::move(oof);
        }
      }
    }
    fit.oof = best_oof;
    model.cv_mae = best_err;
    model.standardizer = FitStandardizer(raw, config.standardize);
    model.elm = ElmFit(model.standardizer.Apply(raw), y,
                       Kernel{config.elm.kernel, best.gamma}, best.c,
                       config.elm.center_targets);
  } else {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const FoldData& d = data[f];
      const PcaLinRegModel m =
          PcaLinRegFit(d.train, d.y_train, config.retained_variance);
      const MatrixXd pred = Clip01(m.Predict(d.held_out));
      for (std::size_t i = 0; i < folds[f].held_out.size(); ++i) {
        fit.oof.row(folds[f].held_out[i]) = pred.row(static_cast<Eigen::Index>(i));
      }
    }
    model.cv_mae = (fit.oof - y).cwiseAbs().mean();
    model.standardizer = FitStandardizer(raw, config.standardize);
    model.pca = PcaLinRegFit(model.standardizer.Apply(raw), y,
                             config.retained_variance);
  }
  return fit;
}

MatrixXd StackColumns(const std::vector<MatrixXd>& groups) {
  Eigen::Index cols = 0;
  for (const MatrixXd& g : groups) cols += g.cols();
  MatrixXd out(groups.front().rows(), cols);
  Eigen::Index at = 0;
  for (const MatrixXd& g : groups) {
    out.middleCols(at, g.cols()) = g;
    at += g.cols();
  }
  return out;
}

std::vector<double> Column(const MatrixXd& m, Eigen::Index c) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, c);
  return out;
}

TraitVector RowToTraits(const MatrixXd& m, Eigen::Index row) {
  TraitVector t;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    t[d] = m(row, static_cast<Eigen::Index>(d));
  }
  return t;
}

std::vector<double> Octaves(int lo, int hi) {
  std::vector<double> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

[[noreturn]] void BadConfig(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

void CheckKeys(const json& j, std::initializer_list<std::string_view> allowed,
               const std::string& where) {
  if (!j.is_object()) BadConfig(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      BadConfig("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
std::vector<T> PositiveList(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) BadConfig(name + " must be a non-empty array");
  std::vector<T> out;
  for (const json& v : j) {
    if (!v.is_number()) BadConfig(name + " entries must be numbers");
    out.push_back(v.get<T>());
  }
  return out;
}

}  // namespace

std::string_view LearnerName(LearnerKind kind) {
  return kind == LearnerKind::kElm ? "elm" : "pca_linreg";
}

std::string_view FusionModeName(FusionMode mode) {
  switch (mode) {
    case FusionMode::kIdentity:
      return "identity";
    case FusionMode::kAverage:
      return "average";
    case FusionMode::kWeighted:
      return "weighted";
    case FusionMode::kForest:
      return "forest";
  }
  return "identity";
}

PipelineConfig::PipelineConfig() {
  elm.c_grid = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
  elm.gamma_grid = Octaves(-10, 2);
}

PipelineConfig ParsePipelineConfig(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    BadConfig(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(j,
            {"version", "seed", "metric", "learner", "groups", "elm",
             "retained_variance", "standardize", "folds", "fusion",
             "explanation_tree"},
            "config");
  PipelineConfig c;
  try {
    if (j.contains("version") && j["version"].get<int>() != 1) {
      BadConfig("unsupported config version");
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("metric")) {
      auto m = ParseMetricVariant(j["metric"].get<std::string>());
      if (!m) BadConfig("unknown metric '" + j["metric"].get<std::string>() + "'");
      c.metric.variant = *m;
    }
    if (j.contains("learner")) {
      const std::string l = j["learner"].get<std::string>();
      if (l == "elm") {
        c.learner = LearnerKind::kElm;
      } else if (l == "pca_linreg") {
        c.learner = LearnerKind::kPcaLinReg;
      } else {
        BadConfig("unknown learner '" + l + "'");
      }
    }
    if (!j.contains("groups") || !j["groups"].is_array() || j["groups"].empty()) {
      BadConfig("config needs a non-empty 'groups' array");
    }
    std::set<std::string> names;
    for (const json& g : j["groups"]) {
      CheckKeys(g, {"name", "modalities"}, "group");
      GroupConfig group;
      group.modalities = g.at("modalities").get<std::vector<std::string>>();
      if (group.modalities.empty()) BadConfig("group without modalities");
      group.name = g.contains("name") ? g["name"].get<std::string>()
                                      : group.modalities.front();
      if (!names.insert(group.name).second) {
        BadConfig("duplicate group name '" + group.name + "'");
      }
      c.groups.push_back(std::move(group));
    }
    if (j.contains("elm")) {
      const json& e = j["elm"];
      CheckKeys(e, {"kernel", "c_grid", "gamma_grid", "center_targets"}, "elm");
      if (e.contains("kernel")) {
        const std::string k = e["kernel"].get<std::string>();
        if (k == "rbf") {
          c.elm.kernel = KernelType::kRbf;
        } else if (k == "linear") {
          c.elm.kernel = KernelType::kLinear;
        } else {
          BadConfig("unknown kernel '" + k + "'");
        }
      }
      if (e.contains("c_grid")) c.elm.c_grid = PositiveList<double>(e["c_grid"], "c_grid");
      if (e.contains("gamma_grid")) {
        c.elm.gamma_grid = PositiveList<double>(e["gamma_grid"], "gamma_grid");
      }
      if (e.contains("center_targets")) {
        c.elm.center_targets = e["center_targets"].get<bool>();
      }
      for (double v : c.elm.c_grid) {
        if (!(v > 0.0)) BadConfig("C values must be positive");
      }
      for (double v : c.elm.gamma_grid) {
        if (!(v > 0.0)) BadConfig("gamma values must be positive");
      }
    }
    if (j.contains("retained_variance")) {
      c.retained_variance = j["retained_variance"].get<double>();
      if (!(c.retained_variance > 0.0 && c.retained_variance <= 1.0)) {
        BadConfig("retained_variance must be in (0,1]");
      }
    }
    if (j.contains("standardize")) c.standardize = j["standardize"].get<bool>();
    if (j.contains("folds")) {
      c.folds = j["folds"].get<int>();
      if (c.folds < 2) BadConfig("folds must be >= 2");
    }
    if (j.contains("fusion")) {
      const json& f = j["fusion"];
      CheckKeys(f, {"mode", "weight_step", "fixed_weight", "forest"}, "fusion");
      if (f.contains("mode")) {
        const std::string m = f["mode"].get<std::string>();
        if (m == "identity") {
          c.fusion = FusionMode::kIdentity;
        } else if (m == "average") {
          c.fusion = FusionMode::kAverage;
        } else if (m == "weighted") {
          c.fusion = FusionMode::kWeighted;
        } else if (m == "forest") {
          c.fusion = FusionMode::kForest;
        } else {
          BadConfig("unknown fusion mode '" + m + "'");
        }
      }
      if (f.contains("weight_step")) c.weight_step = f["weight_step"].get<double>();
      if (f.contains("fixed_weight")) {
        c.fixed_weight = f["fixed_weight"].get<double>();
        if (!(*c.fixed_weight >= 0.0 && *c.fixed_weight <= 1.0)) {
          BadConfig("fixed_weight must be in [0,1]");
        }
      }
      if (f.contains("forest")) {
        const json& r = f["forest"];
        CheckKeys(r, {"n_trees", "features_per_split", "max_depth", "min_leaf"},
                  "forest");
        if (r.contains("n_trees")) c.forest.n_trees = PositiveList<int>(r["n_trees"], "n_trees");
        if (r.contains("max_depth")) {
          c.forest.max_depth = PositiveList<int>(r["max_depth"], "max_depth");
        }
        if (r.contains("min_leaf")) c.forest.min_leaf = PositiveList<int>(r["min_leaf"], "min_leaf");
        if (r.contains("features_per_split")) {
          c.forest.features_per_split.clear();
          for (const json& v : r["features_per_split"]) {
            c.forest.features_per_split.push_back(
                v.is_string() ? v.get<std::string>() : std::to_string(v.get<int>()));
          }
          for (const auto& rule : c.forest.features_per_split) {
            ResolveFeatureRule(rule, 1);
          }
        }
      }
    }
    if (j.contains("explanation_tree")) {
      c.explanation_tree = j["explanation_tree"].get<bool>();
    }
  } catch (const json::exception& e) {
    BadConfig(std::string("bad config value: ") + e.what());
  }
  if (c.fusion == FusionMode::kIdentity && c.groups.size() != 1) {
    BadConfig("identity fusion needs exactly one group");
  }
  if (c.fusion == FusionMode::kWeighted && c.groups.size() != 2) {
    BadConfig("weighted fusion needs exactly two groups");
  }
  return c;
}

std::string FormatPipelineConfig(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["seed"] = c.seed;
  j["metric"] = MetricVariantName(c.metric.variant);
  j["learner"] = LearnerName(c.learner);
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : c.groups) {
    j["groups"].push_back({{"name", g.name}, {"modalities", g.modalities}});
  }
  j["elm"] = {{"kernel", KernelName(c.elm.kernel)},
              {"c_grid", c.elm.c_grid},
              {"gamma_grid", c.elm.gamma_grid},
              {"center_targets", c.elm.center_targets}};
  j["retained_variance"] = c.retained_variance;
  j["standardize"] = c.standardize;
  j["folds"] = c.folds;
  nlohmann::ordered_json fusion;
  fusion["mode"] = FusionModeName(c.fusion);
  fusion["weight_step"] = c.weight_step;
  if (c.fixed_weight) fusion["fixed_weight"] = *c.fixed_weight;
  fusion["forest"] = {{"n_trees", c.forest.n_trees},
                      {"features_per_split", c.forest.features_per_split},
                      {"max_depth", c.forest.max_depth},
                      {"min_leaf", c.forest.min_leaf}};
  j["fusion"] = fusion;
  j["explanation_tree"] = c.explanation_tree;
  return j.dump(2) + "\n";
}

MatrixXd GroupModel::Predict(const MatrixXd& raw_rows) const {
  const MatrixXd x = standardizer.Apply(raw_rows);
  return learner == LearnerKind::kElm ? elm.Predict(x) : pca.Predict(x);
}

MatrixXd GatherGroup(const GroupConfig& group,
                     const std::map<std::string, FeatureMatrix>& features,
                     const std::vector<std::string>& ids) {
  std::vector<MatrixXd> parts;
  for (const std::string& modality : group.modalities) {
    auto it = features.find(modality);
    if (it == features.end()) {
      throw Error(ErrorCode::kMissingRepresentation,
                  "no feature matrix for modality '" + modality + "'");
    }
    parts.push_back(it->second.Gather(ids));
  }
  return StackColumns(parts);
}

MatrixXd FuseGroupPredictions(const StackedPipeline& pipeline,
                              const std::vector<MatrixXd>& groups) {
  if (groups.size() != pipeline.groups.size() || groups.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "wrong number of group predictions");
  }
  const MatrixXd& first = groups.front();
  MatrixXd fused(first.rows(), first.cols());
  switch (pipeline.fusion) {
    case FusionMode::kIdentity:
      fused = first;
      break;
    case FusionMode::kAverage: {
      for (Eigen::Index i = 0; i < first.rows(); ++i) {
        std::vector<TraitVector> rows;
        for (const MatrixXd& g : groups) rows.push_back(RowToTraits(g, i));
        const TraitVector avg = LateFusionAverage(rows);
        for (std::size_t d = 0; d < kNumDimensions; ++d) {
          fused(i, static_cast<Eigen::Index>(d)) = avg[d];
        }
      }
      break;
    }
    case FusionMode::kWeighted:
      for (std::size_t d = 0; d < kNumDimensions; ++d) {
        const auto c = static_cast<Eigen::Index>(d);
        const double w = pipeline.weights[d];
        fused.col(c) = w * groups[0].col(c) + (1.0 - w) * groups[1].col(c);
      }
      break;
    case FusionMode::kForest: {
      const MatrixXd stacked = StackColumns(groups);
      for (std::size_t d = 0; d < kNumDimensions; ++d) {
        fused.col(static_cast<Eigen::Index>(d)) = pipeline.forests[d].Predict(stacked);
      }
      break;
    }
  }
  return Clip01(fused);
}

StackedPipeline PipelineTrain(const Dataset& dataset, const DatasetSplit& split,
                              const std::map<std::string, FeatureMatrix>& features,
                              const PipelineConfig& config) {
  if (config.groups.empty()) BadConfig("no modality groups configured");
  const std::vector<std::string> ids(split.train_ids.begin(), split.train_ids.end());
  if (ids.size() < 2) {
    throw Error(ErrorCode::kEmptyTrainSplit, "pipeline needs at least two train clips");
  }
  MatrixXd y(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(kNumDimensions));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const ClipRecord& r = dataset.Get(ids[i]);
    if (!r.labels) throw Error(ErrorCode::kUnlabeledTrainClip, ids[i]);
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = (*r.labels)[d];
    }
  }

  StackedPipeline pipeline;
  pipeline.config = config;
  pipeline.fusion = config.fusion;
  const int n = static_cast<int>(ids.size());
  const int k = std::min(config.folds, n);
  const std::vector<Fold> folds =
      MakeFolds(AssignFolds(n, k, DeriveSeed(config.seed, kFoldStream)), k);

  std::vector<MatrixXd> oof;
  for (const GroupConfig& group : config.groups) {
    const MatrixXd raw = GatherGroup(group, features, ids);
    GroupFit fit = FitGroup(group, raw, y, config, folds);
    for (const std::string& m : group.modalities) {
      const FeatureMatrix& fm = features.at(m);
      fit.model.modality_widths.push_back(fm.width());
      for (const std::string& col : fm.column_names()) {
        fit.model.columns.push_back(m + ":" + col);
      }
    }
    pipeline.groups.push_back(std::move(fit.model));
    oof.push_back(std::move(fit.oof));
  }

  MatrixXd fused_train;
  switch (config.fusion) {
    case FusionMode::kIdentity:
      if (oof.size() != 1) BadConfig("identity fusion needs exactly one group");
      break;
    case FusionMode::kAverage:
      break;
    case FusionMode::kWeighted:
      if (oof.size() != 2) BadConfig("weighted fusion needs exactly two groups");
      for (std::size_t d = 0; d < kNumDimensions; ++d) {
        const auto c = static_cast<Eigen::Index>(d);
        if (config.fixed_weight) {
          pipeline.weights[d] = *config.fixed_weight;
        } else {
          const auto a = Column(oof[0], c);
          const auto b = Column(oof[1], c);
          const auto t = Column(y, c);
          pipeline.weights[d] =
              WeightedFusionSearch(a, b, t, config.weight_step, config.metric).weight;
        }
      }
      break;
    case FusionMode::kForest: {
      const MatrixXd stacked = StackColumns(oof);
      fused_train.resize(y.rows(), y.cols());
      for (std::size_t d = 0; d < kNumDimensions; ++d) {
        const auto c = static_cast<Eigen::Index>(d);
        ForestSelection sel = FitForest(stacked, y.col(c), config.forest,
                                        DeriveSeed(config.seed, kForestStream + d));
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
          const double oob = sel.model.oob_predictions[static_cast<std::size_t>(i)];
          fused_train(i, c) =
              std::isnan(oob) ? sel.model.PredictRow(stacked.row(i)) : oob;
        }
        pipeline.forests.push_back(std::move(sel.model));
      }
      fused_train = Clip01(fused_train);
      break;
    }
  }
  if (config.fusion != FusionMode::kForest) {
    fused_train = FuseGroupPredictions(pipeline, oof);
  }

  std::vector<TraitVector> train_labels;
  for (Eigen::Index i = 0; i < y.rows(); ++i) train_labels.push_back(RowToTraits(y, i));
  pipeline.thresholds = ComputeThresholds(train_labels);

  if (config.explanation_tree) {
    std::vector<PersonalityBits> bits;
    std::vector<bool> invite;
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      bits.push_back(PersonalityBitsOf(
          Binarize(RowToTraits(fused_train, i), pipeline.thresholds)));
      invite.push_back(y(i, 0) >= pipeline.thresholds.values[0]);
    }
    pipeline.tree = FitExplanationTree(bits, invite);
    pipeline.tree_training_accuracy = TrainingAccuracy(*pipeline.tree, bits, invite);
  }
  return pipeline;
}

PipelineOutput PipelinePredict(const StackedPipeline& pipeline,
                               const std::map<std::string, FeatureMatrix>& features,
                               const std::vector<std::string>& ids) {
  PipelineOutput out;
  out.ids = ids;
  if (ids.empty()) return out;
  std::vector<MatrixXd> group_preds;
  for (const GroupModel& g : pipeline.groups) {
    GroupConfig gc{g.name, g.modalities};
    for (std::size_t m = 0; m < g.modalities.size(); ++m) {
      auto it = features.find(g.modalities[m]);
      if (it != features.end() && m < g.modality_widths.size() &&
          it->second.width() != g.modality_widths[m]) {
        throw Error(ErrorCode::kShapeMismatch,
                    "modality '" + g.modalities[m] + "' has " +
                        std::to_string(it->second.width()) + " columns, model expects " +
                        std::to_string(g.modality_widths[m]));
      }
    }
    group_preds.push_back(Clip01(g.Predict(GatherGroup(gc, features, ids))));
  }
  const MatrixXd fused = FuseGroupPredictions(pipeline, group_preds);
  out.per_group.resize(group_preds.size());
  for (Eigen::Index i = 0; i < fused.rows(); ++i) {
    out.fused.push_back(RowToTraits(fused, i));
    for (std::size_t g = 0; g < group_preds.size(); ++g) {
      out.per_group[g].push_back(RowToTraits(group_preds[g], i));
    }
  }
  return out;
}

std::string FormatPredictions(const std::vector<std::string>& ids,
                              const std::vector<TraitVector>& predictions) {
  std::string out = "clip_id";
  for (Dimension d : kAllDimensions) out += "," + std::string(DimensionColumn(d));
  out += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> fields = {ids[i]};
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      fields.push_back(FormatDouble(predictions[i][d]));
    }
    out += JoinRow(fields) + "\n";
  }
  return out;
}

std::map<std::string, TraitVector> LoadPredictions(
    const std::filesystem::path& path) {
  const Table table = ReadTable(path);
  std::vector<int> cols;
  const auto id_col = table.Column("clip_id");
  if (!id_col) throw Error(ErrorCode::kMalformedRow, path.string() + ": no clip_id column");
  for (Dimension d : kAllDimensions) {
    auto c = table.Column(std::string(DimensionColumn(d)));
    if (!c) {
      throw Error(ErrorCode::kMalformedRow,
                  path.string() + ": missing column " + std::string(DimensionColumn(d)));
    }
    cols.push_back(static_cast<int>(*c));
  }
  std::map<std::string, TraitVector> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    TraitVector t;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      auto v = ParseDouble(row[static_cast<std::size_t>(cols[d])]);
      if (!v) {
        throw Error(ErrorCode::kMalformedRow,
                    path.string() + ":" + std::to_string(table.line_numbers[r]));
      }
      t[d] = *v;
    }
    if (!out.emplace(row[*id_col], t).second) {
      throw Error(ErrorCode::kDuplicateId, row[*id_col]);
    }
  }
  return out;
}

}  // namespace impressions
