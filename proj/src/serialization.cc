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

#include "impressions/serialization.h"

#include <json.hpp>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Row-major {rows, cols, data}.
ordered_json MatrixToJson(const Eigen::MatrixXd& m) {
  ordered_json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  j["data"] = data;
  return j;
}

Eigen::MatrixXd MatrixFromJson(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorCode::kConfigError, "matrix payload has the wrong size");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  }
  return m;
}

ordered_json RowToJson(const Eigen::RowVectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::RowVectorXd RowFromJson(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Eigen::RowVectorXd v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) v(static_cast<Eigen::Index>(i)) = data[i];
  return v;
}

Eigen::VectorXd ColFromJson(const json& j) { return RowFromJson(j).transpose(); }

ordered_json ForestToJson(const RandomForestModel& f) {
  ordered_json j;
  j["n_trees"] = f.config.n_trees;
  j["features_per_split"] = f.config.features_per_split;
  j["max_depth"] = f.config.max_depth;
  j["min_leaf"] = f.config.min_leaf;
  j["bootstrap"] = f.config.bootstrap;
  j["seed"] = f.config.seed;
  j["oob_error"] = std::isnan(f.oob_error) ? ordered_json(nullptr)
                                           : ordered_json(f.oob_error);
  ordered_json trees = ordered_json::array();
  for (const RegressionTree& t : f.trees) {
    ordered_json nodes = ordered_json::array();
    for (const TreeNode& n : t.nodes()) {
      if (n.is_leaf()) {
        nodes.push_back({{"value", n.value}, {"count", n.count}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value},
                         {"count", n.count}});
      }
    }
    trees.push_back({{"nodes", nodes}, {"oob_rows", t.oob_rows}});
  }
  j["trees"] = trees;
  return j;
}

RandomForestModel ForestFromJson(const json& j) {
  RandomForestModel f;
  f.config.n_trees = j.at("n_trees").get<int>();
  f.config.features_per_split = j.at("features_per_split").get<int>();
  f.config.max_depth = j.at("max_depth").get<int>();
  f.config.min_leaf = j.at("min_leaf").get<int>();
  f.config.bootstrap = j.at("bootstrap").get<bool>();
  f.config.seed = j.at("seed").get<std::uint64_t>();
  f.oob_error = j.at("oob_error").is_null()
                    ? std::numeric_limits<double>::quiet_NaN()
                    : j["oob_error"].get<double>();
  for (const json& t : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const json& n : t.at("nodes")) {
      TreeNode node;
      node.value = n.at("value").get<double>();
      node.count = n.at("count").get<int>();
      if (n.contains("feature")) {
        node.feature = n["feature"].get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
      }
      nodes.push_back(node);
    }
    RegressionTree tree(std::move(nodes));
    tree.oob_rows = t.at("oob_rows").get<std::vector<int>>();
    f.trees.push_back(std::move(tree));
  }
  return f;
}

ordered_json TreeToJson(const ExplanationTree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const ExplanationNode& n : tree.nodes()) {
    ordered_json j = {{"n", n.n}, {"n_invite", n.n_invite}, {"invite", n.invite}};
    if (!n.is_leaf()) {
      j["trait"] = DimensionName(kPersonalityTraits[static_cast<std::size_t>(n.trait)]);
      j["gain"] = n.gain;
      j["low"] = n.low;
      j["high"] = n.high;
    }
    nodes.push_back(j);
  }
  return nodes;
}

ExplanationTree TreeFromJson(const json& j) {
  std::vector<ExplanationNode> nodes;
  for (const json& n : j) {
    ExplanationNode node;
    node.n = n.at("n").get<long>();
    node.n_invite = n.at("n_invite").get<long>();
    node.invite = n.at("invite").get<bool>();
    if (n.contains("trait")) {
      auto d = ParseDimension(n["trait"].get<std::string>());
      int idx = -1;
      for (std::size_t i = 0; i < kPersonalityTraits.size(); ++i) {
        if (d && kPersonalityTraits[i] == *d) idx = static_cast<int>(i);
      }
      if (idx < 0) throw Error(ErrorCode::kConfigError, "bad trait in explanation tree");
      node.trait = idx;
      node.gain = n.at("gain").get<double>();
      node.low = n.at("low").get<int>();
      node.high = n.at("high").get<int>();
    }
    nodes.push_back(node);
  }
  return ExplanationTree(std::move(nodes));
}

}  // namespace

std::string SerializePipeline(const StackedPipeline& p) {
  ordered_json j;
  j["format"] = kPipelineFormat;
  j["version"] = kPipelineFormatVersion;
  j["config"] = ordered_json::parse(FormatPipelineConfig(p.config));
  j["fusion"] = FusionModeName(p.fusion);
  ordered_json groups = ordered_json::array();
  for (const GroupModel& g : p.groups) {
    ordered_json gj;
    gj["name"] = g.name;
    gj["modalities"] = g.modalities;
    gj["modality_widths"] = g.modality_widths;
    gj["columns"] = g.columns;
    gj["standardizer"] = {{"mean", RowToJson(g.standardizer.mean)},
                          {"scale", RowToJson(g.standardizer.scale)}};
    gj["learner"] = LearnerName(g.learner);
    gj["cv_mae"] = g.cv_mae;
    if (g.learner == LearnerKind::kElm) {
      gj["elm"] = {{"kernel", KernelName(g.elm.kernel.type)},
                   {"gamma", g.elm.kernel.gamma},
                   {"c", g.elm.c},
                   {"target_offset", RowToJson(g.elm.target_offset)},
                   {"support_inputs", MatrixToJson(g.elm.support_inputs)},
                   {"dual_weights", MatrixToJson(g.elm.dual_weights)}};
    } else {
      const PcaModel& pca = g.pca.pca;
      gj["pca_linreg"] = {
          {"column_means", RowToJson(pca.column_means)},
          {"components", MatrixToJson(pca.components)},
          {"eigenvalues", RowToJson(pca.eigenvalues.transpose())},
          {"explained_variance_ratio", RowToJson(pca.explained_variance_ratio.transpose())},
          {"regression_coefficients", MatrixToJson(g.pca.regression_coefficients)},
          {"bias", RowToJson(g.pca.bias)}};
    }
    groups.push_back(gj);
  }
  j["groups"] = groups;
  if (p.fusion == FusionMode::kWeighted) {
    j["weights"] = std::vector<double>(p.weights.begin(), p.weights.end());
  }
  if (p.fusion == FusionMode::kForest) {
    ordered_json forests = ordered_json::array();
    for (const RandomForestModel& f : p.forests) forests.push_back(ForestToJson(f));
    j["forests"] = forests;
  }
  j["thresholds"] = std::vector<double>(p.thresholds.values.begin(),
                                        p.thresholds.values.end());
  if (p.tree) {
    j["explanation_tree"] = TreeToJson(*p.tree);
    j["tree_training_accuracy"] = p.tree_training_accuracy;
  }
  return j.dump() + "\n";
}

StackedPipeline DeserializePipeline(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("pipeline file is not JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kPipelineFormat) {
    throw Error(ErrorCode::kConfigError, "not a pipeline file");
  }
  if (j.value("version", 0) != kPipelineFormatVersion) {
    throw Error(ErrorCode::kConfigError, "unsupported pipeline version");
  }
  StackedPipeline p;
  try {
    p.config = ParsePipelineConfig(j.at("config").dump());
    p.fusion = p.config.fusion;
    for (const json& gj : j.at("groups")) {
      GroupModel g;
      g.name = gj.at("name").get<std::string>();
      g.modalities = gj.at("modalities").get<std::vector<std::string>>();
      g.modality_widths = gj.at("modality_widths").get<std::vector<std::size_t>>();
      g.columns = gj.at("columns").get<std::vector<std::string>>();
      g.standardizer.mean = RowFromJson(gj.at("standardizer").at("mean"));
      g.standardizer.scale = RowFromJson(gj.at("standardizer").at("scale"));
      g.cv_mae = gj.at("cv_mae").get<double>();
      const std::string learner = gj.at("learner").get<std::string>();
      if (learner == "elm") {
        g.learner = LearnerKind::kElm;
        const json& e = gj.at("elm");
        g.elm.kernel.type = e.at("kernel").get<std::string>() == "linear"
                                ? KernelType::kLinear
                                : KernelType::kRbf;
        g.elm.kernel.gamma = e.at("gamma").get<double>();
        g.elm.c = e.at("c").get<double>();
        g.elm.target_offset = RowFromJson(e.at("target_offset"));
        g.elm.support_inputs = MatrixFromJson(e.at("support_inputs"));
        g.elm.dual_weights = MatrixFromJson(e.at("dual_weights"));
      } else {
        g.learner = LearnerKind::kPcaLinReg;
        const json& e = gj.at("pca_linreg");
        g.pca.pca.column_means = RowFromJson(e.at("column_means"));
        g.pca.pca.components = MatrixFromJson(e.at("components"));
        g.pca.pca.eigenvalues = ColFromJson(e.at("eigenvalues"));
        g.pca.pca.explained_variance_ratio = ColFromJson(e.at("explained_variance_ratio"));
        g.pca.regression_coefficients = MatrixFromJson(e.at("regression_coefficients"));
        g.pca.bias = RowFromJson(e.at("bias"));
      }
      p.groups.push_back(std::move(g));
    }
    if (p.fusion == FusionMode::kWeighted) {
      const auto w = j.at("weights").get<std::vector<double>>();
      if (w.size() != kNumDimensions) throw Error(ErrorCode::kConfigError, "bad weights");
      std::copy(w.begin(), w.end(), p.weights.begin());
    }
    if (p.fusion == FusionMode::kForest) {
      for (const json& f : j.at("forests")) p.forests.push_back(ForestFromJson(f));
      if (p.forests.size() != kNumDimensions) {
        throw Error(ErrorCode::kConfigError, "pipeline needs one forest per dimension");
      }
    }
    const auto t = j.at("thresholds").get<std::vector<double>>();
    if (t.size() != kNumDimensions) throw Error(ErrorCode::kConfigError, "bad thresholds");
    std::copy(t.begin(), t.end(), p.thresholds.values.begin());
    if (j.contains("explanation_tree")) {
      p.tree = TreeFromJson(j["explanation_tree"]);
      p.tree_training_accuracy = j.at("tree_training_accuracy").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("malformed pipeline file: ") + e.what());
  }
  return p;
}

void SavePipeline(const StackedPipeline& pipeline,
                  const std::filesystem::path& path) {
  WriteStringToFile(path, SerializePipeline(pipeline));
}

StackedPipeline LoadPipeline(const std::filesystem::path& path) {
  return DeserializePipeline(ReadFileToString(path));
}

}  // namespace impressions
