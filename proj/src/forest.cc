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

#include "impressions/forest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Relative slack used when comparing split errors, so that candidates equal
// up to rounding resolve to the first one scanned.
bool Lower(double candidate, double best) {
  return candidate < best - 1e-12 * (1.0 + std::abs(best));
}

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
              const TreeConfig& config, Rng& rng)
      : x_(x), y_(y), config_(config), rng_(rng) {
    const int d = static_cast<int>(x.cols());
    m_ = config.features_per_split <= 0 ? d
                                        : std::min(config.features_per_split, d);
  }

  std::vector<TreeNode> Build(std::vector<int> rows) {
    Grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  int Grow(std::vector<int> rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    // Mean taken relative to the first target so a constant node is exact.
    const double base = y_(rows.front());
    double shift = 0.0, sum = 0.0;
    for (int r : rows) {
      shift += y_(r) - base;
      sum += y_(r);
    }
    const double n = static_cast<double>(rows.size());
    const double mean = base + shift / n;
    double sse = 0.0;
    for (int r : rows) sse += (y_(r) - mean) * (y_(r) - mean);
    nodes_[id].value = mean;
    nodes_[id].count = static_cast<int>(rows.size());

    const bool depth_done = config_.max_depth > 0 && depth >= config_.max_depth;
    if (sse <= 0.0 || depth_done ||
        rows.size() < 2 * static_cast<std::size_t>(config_.min_leaf)) {
      return id;
    }

    std::vector<int> features = SampleFeatures();
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_sse = sse;
    std::vector<int> order(rows);
    for (int f : features) {
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return x_(a, f) < x_(b, f); });
      double left_sum = 0.0, left_sq = 0.0;
      double total_sq = 0.0;
      for (int r : order) total_sq += y_(r) * y_(r);
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double yi = y_(order[i]);
        left_sum += yi;
        left_sq += yi * yi;
        const double lo = x_(order[i], f);
        const double hi = x_(order[i + 1], f);
        if (!(lo < hi)) continue;
        const std::size_t nl = i + 1;
        const std::size_t nr = order.size() - nl;
        if (nl < static_cast<std::size_t>(config_.min_leaf) ||
            nr < static_cast<std::size_t>(config_.min_leaf)) {
          continue;
        }
        const double right_sum = sum - left_sum;
        const double right_sq = total_sq - left_sq;
        const double split_sse =
            (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
            (right_sq - right_sum * right_sum / static_cast<double>(nr));
        if (Lower(split_sse, best_sse)) {
          best_sse = split_sse;
          best_feature = f;
          best_threshold = lo + (hi - lo) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      (x_(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    nodes_[id].feature = best_feature;
    nodes_[id].threshold = best_threshold;
    const int left = Grow(std::move(left_rows), depth + 1);
    nodes_[id].left = left;
    const int right = Grow(std::move(right_rows), depth + 1);
    nodes_[id].right = right;
    return id;
  }

  std::vector<int> SampleFeatures() {
    const int d = static_cast<int>(x_.cols());
    std::vector<int> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), 0);
    if (m_ >= d) return all;
    for (int i = 0; i < m_; ++i) {
      const int j = i + static_cast<int>(rng_.UniformInt(
                            static_cast<std::uint64_t>(d - i)));
      std::swap(all[static_cast<std::size_t>(i)],
                all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(m_));
    std::sort(all.begin(), all.end());
    return all;
  }

  const Eigen::MatrixXd& x_;
  const Eigen::VectorXd& y_;
  const TreeConfig& config_;
  Rng& rng_;
  int m_ = 0;
  std::vector<TreeNode> nodes_;
};

}  // namespace

double RegressionTree::Predict(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    id = row(node.feature) <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(id)].value;
}

int RegressionTree::Depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int depth = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    depth = std::max(depth, d);
    const TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return depth;
}

RegressionTree GrowTree(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const std::vector<int>& bag, const TreeConfig& config,
                        Rng& rng) {
  if (bag.empty()) throw Error(ErrorCode::kTooFewRows, "empty bag");
  if (config.min_leaf < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_leaf must be >= 1");
  }
  TreeBuilder builder(x, y, config, rng);
  return RegressionTree(builder.Build(bag));
}

double RandomForestModel::PredictRow(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  const double base = trees.front().Predict(row);
  double shift = 0.0;
  for (const RegressionTree& t : trees) shift += t.Predict(row) - base;
  return base + shift / static_cast<double>(trees.size());
}

Eigen::VectorXd RandomForestModel::Predict(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = PredictRow(x.row(i));
  return out;
}

RandomForestModel TrainForest(const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y,
                              const ForestConfig& config) {
  const int n = static_cast<int>(x.rows());
  if (n != y.size()) throw Error(ErrorCode::kShapeMismatch, "forest rows");
  if (config.n_trees < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_trees must be >= 1");
  }
  if (n < 2 * config.min_leaf) {
    throw Error(ErrorCode::kTooFewRows,
                std::to_string(n) + " rows for min_leaf " +
                    std::to_string(config.min_leaf));
  }
  RandomForestModel model;
  model.config = config;
  TreeConfig tree_config{config.max_depth, config.min_leaf,
                         config.features_per_split};
  // Per-row OOB sums are kept relative to the first OOB prediction.
  std::vector<double> oob_base(static_cast<std::size_t>(n), 0.0);
  std::vector<double> oob_sum(static_cast<std::size_t>(n), 0.0);
  std::vector<int> oob_count(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(DeriveSeed(config.seed, static_cast<std::uint64_t>(t)));
    std::vector<int> bag(static_cast<std::size_t>(n));
    std::vector<char> in_bag(static_cast<std::size_t>(n), 0);
    if (config.bootstrap) {
      for (int i = 0; i < n; ++i) {
        bag[static_cast<std::size_t>(i)] =
            static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(n)));
        in_bag[static_cast<std::size_t>(bag[static_cast<std::size_t>(i)])] = 1;
      }
      std::sort(bag.begin(), bag.end());
    } else {
      std::iota(bag.begin(), bag.end(), 0);
      std::fill(in_bag.begin(), in_bag.end(), 1);
    }
    RegressionTree tree = GrowTree(x, y, bag, tree_config, rng);
    for (int i = 0; i < n; ++i) {
      if (in_bag[static_cast<std::size_t>(i)]) continue;
      tree.oob_rows.push_back(i);
      const auto k = static_cast<std::size_t>(i);
      const double p = tree.Predict(x.row(i));
      if (oob_count[k] == 0) oob_base[k] = p;
      oob_sum[k] += p - oob_base[k];
      ++oob_count[k];
    }
    model.trees.push_back(std::move(tree));
  }
  model.oob_predictions.assign(static_cast<std::size_t>(n), kNaN);
  double abs_sum = 0.0;
  int covered = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (oob_count[k] == 0) continue;
    model.oob_predictions[k] = oob_base[k] + oob_sum[k] / oob_count[k];
    abs_sum += std::abs(model.oob_predictions[k] - y(i));
    ++covered;
  }
  model.oob_error = covered > 0 ? abs_sum / covered : kNaN;
  return model;
}

int ResolveFeatureRule(const std::string& rule, int num_features) {
  const int d = std::max(num_features, 1);
  if (rule == "sqrt") {
    return std::clamp(static_cast<int>(std::ceil(std::sqrt(d))), 1, d);
  }
  if (rule == "third") {
    return std::clamp((d + 2) / 3, 1, d);
  }
  if (rule == "all") return d;
  auto v = ParseDouble(rule);
  if (!v || *v < 1 || *v != std::floor(*v)) {
    throw Error(ErrorCode::kConfigError, "bad features_per_split rule '" +
                                             rule + "'");
  }
  return std::min(static_cast<int>(*v), d);
}

ForestSelection FitForest(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const ForestGrid& grid, std::uint64_t seed) {
  ForestSelection selection;
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  bool have_best = false;
  double best = std::numeric_limits<double>::infinity();
  for (int trees : grid.n_trees) {
    for (const std::string& rule : grid.features_per_split) {
      for (int depth : grid.max_depth) {
        for (int leaf : grid.min_leaf) {
          if (n < 2 * leaf) continue;
          ForestConfig config;
          config.n_trees = trees;
          config.features_per_split = ResolveFeatureRule(rule, d);
          config.max_depth = depth;
          config.min_leaf = leaf;
          config.bootstrap = true;
          config.seed = seed;
          RandomForestModel model = TrainForest(x, y, config);
          const double err = model.oob_error;
          selection.oob_errors.emplace_back(config, err);
          const bool better = std::isnan(best) || (!std::isnan(err) &&
                                                   err < best);
          if (!have_best || better) {
            best = err;
            selection.model = std::move(model);
            have_best = true;
          }
        }
      }
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::kTooFewRows,
                std::to_string(n) + " rows is too few for every grid point");
  }
  return selection;
}

}  // namespace impressions
