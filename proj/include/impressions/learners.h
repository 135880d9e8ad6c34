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

// Regression learners: ridge regression, kernel extreme learning machine and
// PCA-reduced linear regression. Inputs are row-per-sample matrices; targets
// may have several columns, which share one factorization.

#ifndef IMPRESSIONS_LEARNERS_H_
#define IMPRESSIONS_LEARNERS_H_

#include <string_view>

#include <Eigen/Dense>

namespace impressions {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

// Column-wise z-scoring fitted on training rows. Constant columns keep a
// unit scale and are only centered.
struct Standardizer {
  RowVectorXd mean;
  RowVectorXd scale;

  static Standardizer Fit(const MatrixXd& x);
  MatrixXd Apply(const MatrixXd& x) const;
};

struct RidgeModel {
  MatrixXd weights;  // features x targets
  RowVectorXd bias;  // one per target
  double penalty = 1.0;

  MatrixXd Predict(const MatrixXd& x) const;
};

// beta = (Xc^T Xc + lambda I)^-1 Xc^T Yc on centered data; the bias restores
// the means. When there are more features than rows the equivalent dual form
// Xc^T (Xc Xc^T + lambda I)^-1 Yc is solved instead.
RidgeModel RidgeFit(const MatrixXd& x, const MatrixXd& y, double lambda);

enum class KernelType { kLinear, kRbf };

struct Kernel {
  KernelType type = KernelType::kRbf;
  double gamma = 1.0;  // rbf only: exp(-gamma * |a - b|^2)
};

std::string_view KernelName(KernelType type);

// Gram matrix between the rows of `a` and the rows of `b`.
MatrixXd KernelMatrix(const MatrixXd& a, const MatrixXd& b,
                      const Kernel& kernel);

// f(x) = k(x, X)^T (I/C + K)^-1 T, plus an optional constant target offset.
struct KernelElmModel {
  Kernel kernel;
  double c = 1.0;
  MatrixXd support_inputs;
  MatrixXd dual_weights;      // rows x targets
  RowVectorXd target_offset;  // zero unless fitted with center_targets

  MatrixXd Predict(const MatrixXd& x) const;
};

// With center_targets the dual system is solved for T minus its column means
// and the means are added back at prediction time.
KernelElmModel ElmFit(const MatrixXd& x, const MatrixXd& targets,
                      const Kernel& kernel, double c,
                      bool center_targets = false);

inline constexpr double kDefaultRetainedVariance = 0.90;

struct PcaModel {
  RowVectorXd column_means;
  MatrixXd components;  // features x k, unit columns
  // All covariance eigenvalues, descending (clamped at zero).
  VectorXd eigenvalues;
  VectorXd explained_variance_ratio;  // first k

  int k() const { return static_cast<int>(components.cols()); }
  MatrixXd Transform(const MatrixXd& x) const;
  MatrixXd Reconstruct(const MatrixXd& x) const;
};

// Eigen-decomposition of the sample covariance of the centered rows. Each
// component's largest-magnitude loading is made positive. Keeps the smallest
// k whose cumulative explained variance reaches `retained_variance`.
// Throws TooFewRows for fewer than two rows, ZeroVariance if all rows match.
PcaModel PcaFit(const MatrixXd& x,
                double retained_variance = kDefaultRetainedVariance);

struct PcaLinRegModel {
  PcaModel pca;
  MatrixXd regression_coefficients;  // k x targets
  RowVectorXd bias;

  MatrixXd Predict(const MatrixXd& x) const;
  // Equivalent linear weights on the original (centered) features:
  // components * regression_coefficients, features x targets.
  MatrixXd TraceCoefficients() const;
};

PcaLinRegModel PcaLinRegFit(const MatrixXd& x, const MatrixXd& y,
                            double retained_variance = kDefaultRetainedVariance);

}  // namespace impressions

#endif  // IMPRESSIONS_LEARNERS_H_
