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

// CART regression trees and a bagged random forest whose hyperparameters are
// selected by out-of-bag mean absolute error.

#ifndef IMPRESSIONS_FOREST_H_
#define IMPRESSIONS_FOREST_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impressions/rng.h"

namespace impressions {

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // rows with x[feature] <= threshold go left
  int left = -1;
  int right = -1;
  double value = 0.0;  // mean target of the node's rows
  int count = 0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeConfig {
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  int features_per_split = 0;  // 0 = all features
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes)
      : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  double Predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int Depth() const;

  // Rows of the training matrix not drawn into this tree's bootstrap sample.
  std::vector<int> oob_rows;

 private:
  std::vector<TreeNode> nodes_;
};

// Grows one tree on `bag` (row indices into x/y, repeats allowed). Each node
// samples features_per_split features without replacement, scans them in
// ascending index order and picks the split minimizing the summed squared
// error of the children over midpoints between consecutive distinct values.
// A node becomes a leaf when its targets are constant, it has fewer than
// 2 * min_leaf rows, max_depth is reached, or no split lowers the error.
RegressionTree GrowTree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const std::vector<int>& bag, const TreeConfig& config,
                        Rng& rng);

struct ForestConfig {
  int n_trees = 100;
  int features_per_split = 0;  // 0 = all features
  int max_depth = 0;           // 0 = unlimited
  int min_leaf = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RandomForestModel {
  std::vector<RegressionTree> trees;
  ForestConfig config;
  // Mean absolute error of the out-of-bag predictions; NaN without
  // bootstrapping or when no row was ever out of bag.
  double oob_error = 0.0;
  // Per training row, mean prediction of trees that did not see it; NaN
  // for rows that were in every bag.
  std::vector<double> oob_predictions;

  double PredictRow(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Eigen::VectorXd Predict(const Eigen::MatrixXd& x) const;
};

// Tree t uses the stream DeriveSeed(config.seed, t), so results do not
// depend on the order trees are grown in.
RandomForestModel TrainForest(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y,
                              const ForestConfig& config);

// Hyperparameter grid. Feature-count rules are "sqrt" (ceil(sqrt(d))),
// "third" (ceil(d/3)), "all", or a positive integer.
struct ForestGrid {
  std::vector<int> n_trees = {100, 300};
  std::vector<std::string> features_per_split = {"sqrt", "third"};
  std::vector<int> max_depth = {0, 8};
  std::vector<int> min_leaf = {1, 5};
};

int ResolveFeatureRule(const std::string& rule, int num_features);

struct ForestSelection {
  RandomForestModel model;
  // One entry per evaluated grid point, in grid order.
  std::vector<std::pair<ForestConfig, double>> oob_errors;
};

// Trains every grid point with the same master seed and keeps the lowest
// out-of-bag MAE (first in grid order on ties). Throws TooFewRows when
// rows < 2 * min_leaf for every grid point.
ForestSelection FitForest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const ForestGrid& grid, std::uint64_t seed);

}  // namespace impressions

#endif  // IMPRESSIONS_FOREST_H_
