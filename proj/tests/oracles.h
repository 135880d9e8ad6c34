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

// Independent reference implementations shared by the unit and acceptance
// suites.

#ifndef IMPRESSIONS_TESTS_ORACLES_H_
#define IMPRESSIONS_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace impressions::testing {

// Exhaustive CART written without prefix sums: every candidate split's
// child errors are recomputed from scratch.
struct OracleNode {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  std::unique_ptr<OracleNode> left, right;
};

inline double Sse(const std::vector<double>& v) {
  double mean = 0.0;
  for (double y : v) mean += y;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double y : v) s += (y - mean) * (y - mean);
  return s;
}

inline std::unique_ptr<OracleNode> Cart(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const std::vector<int>& rows, int min_leaf) {
  auto node = std::make_unique<OracleNode>();
  std::vector<double> ys;
  double shift = 0.0;
  for (int r : rows) {
    ys.push_back(y(r));
    shift += y(r) - y(rows.front());
  }
  node->value = y(rows.front()) + shift / static_cast<double>(rows.size());
  const double parent = Sse(ys);
  if (parent <= 0.0 || static_cast<int>(rows.size()) < 2 * min_leaf) return node;
  double best = parent;
  for (int f = 0; f < x.cols(); ++f) {
    std::vector<double> values;
    for (int r : rows) values.push_back(x(r, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double thr = values[i] + (values[i + 1] - values[i]) / 2.0;
      std::vector<double> l, r;
      for (int row : rows) (x(row, f) <= thr ? l : r).push_back(y(row));
      if (static_cast<int>(l.size()) < min_leaf || static_cast<int>(r.size()) < min_leaf) {
        continue;
      }
      const double s = Sse(l) + Sse(r);
      if (s < best - 1e-12 * (1.0 + std::abs(best))) {
        best = s;
        node->feature = f;
        node->threshold = thr;
      }
    }
  }
  if (node->feature < 0) return node;
  std::vector<int> l, r;
  for (int row : rows) (x(row, node->feature) <= node->threshold ? l : r).push_back(row);
  node->left = Cart(x, y, l, min_leaf);
  node->right = Cart(x, y, r, min_leaf);
  return node;
}

inline double OraclePredict(const OracleNode& n, const Eigen::RowVectorXd& row) {
  if (n.feature < 0) return n.value;
  return OraclePredict(row(n.feature) <= n.threshold ? *n.left : *n.right, row);
}

// Solves the k x k normal equations of a degree-(k-1) polynomial fit on
// x = 0..T-1 by Gaussian elimination in long double. Returns coefficients
// lowest degree first.
inline std::vector<long double> PolyFit(const std::vector<double>& y, int k) {
  std::vector<std::vector<long double>> a(k, std::vector<long double>(k + 1, 0.0L));
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) a[r][c] += std::pow((long double)i, r + c);
      a[r][k] += std::pow((long double)i, r) * y[i];
    }
  }
  for (int p = 0; p < k; ++p) {
    int piv = p;
    for (int r = p + 1; r < k; ++r) {
      if (std::fabs(a[r][p]) > std::fabs(a[piv][p])) piv = r;
    }
    std::swap(a[p], a[piv]);
    for (int r = 0; r < k; ++r) {
      if (r == p) continue;
      const long double f = a[r][p] / a[p][p];
      for (int c = p; c <= k; ++c) a[r][c] -= f * a[p][c];
    }
  }
  std::vector<long double> out(k);
  for (int r = 0; r < k; ++r) out[r] = a[r][k] / a[r][r];
  return out;
}

// Normal equations on centered data, solved by Gauss-Jordan elimination in
// long double.
inline Eigen::MatrixXd NormalEquationsRidge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda) {
  const int d = static_cast<int>(x.cols());
  const int t = static_cast<int>(y.cols());
  const int n = static_cast<int>(x.rows());
  std::vector<long double> xm(d, 0), ym(t, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) xm[j] += x(i, j) / (long double)n;
    for (int j = 0; j < t; ++j) ym[j] += y(i, j) / (long double)n;
  }
  std::vector<std::vector<long double>> a(d, std::vector<long double>(d + t, 0));
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < d; ++r) {
      const long double xr = x(i, r) - xm[r];
      for (int c = 0; c < d; ++c) a[r][c] += xr * (x(i, c) - xm[c]);
      for (int c = 0; c < t; ++c) a[r][d + c] += xr * (y(i, c) - ym[c]);
    }
  }
  for (int r = 0; r < d; ++r) a[r][r] += lambda;
  for (int p = 0; p < d; ++p) {
    for (int r = 0; r < d; ++r) {
      if (r == p) continue;
      const long double f = a[r][p] / a[p][p];
      for (int c = p; c < d + t; ++c) a[r][c] -= f * a[p][c];
    }
  }
  Eigen::MatrixXd beta(d, t);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < t; ++c) beta(r, c) = static_cast<double>(a[r][d + c] / a[r][r]);
  }
  return beta;
}

}  // namespace impressions::testing

#endif  // IMPRESSIONS_TESTS_ORACLES_H_
