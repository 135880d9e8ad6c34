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

#include "impressions/learners.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "impressions/error.h"

namespace impressions {
namespace {

void CheckRows(const MatrixXd& x, const MatrixXd& y) {
  if (x.rows() != y.rows() || x.rows() < 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "inputs have " + std::to_string(x.rows()) +
                    " rows, targets have " + std::to_string(y.rows()));
  }
}

MatrixXd SolveSpd(const MatrixXd& a, const MatrixXd& b) {
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem,
                "system matrix is not positive definite");
  }
  return llt.solve(b);
}

// Flips each column so its largest-magnitude entry is positive (first such
// entry on ties).
void FixSigns(MatrixXd& components) {
  for (Eigen::Index c = 0; c < components.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < components.rows(); ++r) {
      const double v = std::abs(components(r, c));
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    if (components(arg, c) < 0.0) components.col(c) *= -1.0;
  }
}

}  // namespace

Standardizer Standardizer::Fit(const MatrixXd& x) {
  Standardizer s;
  const double n = static_cast<double>(std::max<Eigen::Index>(x.rows(), 1));
  s.mean = x.colwise().sum() / n;
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

MatrixXd Standardizer::Apply(const MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw Error(ErrorCode::kShapeMismatch, "standardizer width mismatch");
  }
  return (x.rowwise() - mean).array().rowwise() / scale.array();
}

MatrixXd RidgeModel::Predict(const MatrixXd& x) const {
  if (x.cols() != weights.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "ridge input width mismatch");
  }
  return (x * weights).rowwise() + bias;
}

RidgeModel RidgeFit(const MatrixXd& x, const MatrixXd& y, double lambda) {
  CheckRows(x, y);
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge penalty must be positive");
  }
  const double n = static_cast<double>(x.rows());
  const RowVectorXd x_mean = x.colwise().sum() / n;
  const RowVectorXd y_mean = y.colwise().sum() / n;
  const MatrixXd xc = x.rowwise() - x_mean;
  const MatrixXd yc = y.rowwise() - y_mean;

  RidgeModel model;
  model.penalty = lambda;
  if (x.cols() <= x.rows()) {
    MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    model.weights = SolveSpd(gram, xc.transpose() * yc);
  } else {
    MatrixXd gram = xc * xc.transpose();
    gram.diagonal().array() += lambda;
    model.weights = xc.transpose() * SolveSpd(gram, yc);
  }
  model.bias = y_mean - x_mean * model.weights;
  return model;
}

std::string_view KernelName(KernelType type) {
  return type == KernelType::kLinear ? "linear" : "rbf";
}

MatrixXd KernelMatrix(const MatrixXd& a, const MatrixXd& b,
                      const Kernel& kernel) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "kernel input width mismatch");
  }
  MatrixXd k = a * b.transpose();
  if (kernel.type == KernelType::kLinear) return k;
  const VectorXd a_norm = a.rowwise().squaredNorm();
  const VectorXd b_norm = b.rowwise().squaredNorm();
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      const double d2 = std::max(0.0, a_norm(i) + b_norm(j) - 2.0 * k(i, j));
      k(i, j) = std::exp(-kernel.gamma * d2);
    }
  }
  return k;
}

MatrixXd KernelElmModel::Predict(const MatrixXd& x) const {
  return (KernelMatrix(x, support_inputs, kernel) * dual_weights).rowwise() +
         target_offset;
}

KernelElmModel ElmFit(const MatrixXd& x, const MatrixXd& targets,
                      const Kernel& kernel, double c, bool center_targets) {
  CheckRows(x, targets);
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument, "C must be positive and finite");
  }
  if (kernel.type == KernelType::kRbf && !(kernel.gamma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rbf gamma must be positive");
  }
  KernelElmModel model;
  model.kernel = kernel;
  model.c = c;
  model.support_inputs = x;
  model.target_offset = RowVectorXd::Zero(targets.cols());
  if (center_targets) {
    model.target_offset =
        targets.colwise().sum() / static_cast<double>(targets.rows());
  }
  MatrixXd system = KernelMatrix(x, x, kernel);
  system.diagonal().array() += 1.0 / c;
  model.dual_weights =
      SolveSpd(system, targets.rowwise() - model.target_offset);
  return model;
}

MatrixXd PcaModel::Transform(const MatrixXd& x) const {
  if (x.cols() != column_means.size()) {
    throw Error(ErrorCode::kShapeMismatch, "PCA input width mismatch");
  }
  return (x.rowwise() - column_means) * components;
}

MatrixXd PcaModel::Reconstruct(const MatrixXd& x) const {
  return (Transform(x) * components.transpose()).rowwise() + column_means;
}

PcaModel PcaFit(const MatrixXd& x, double retained_variance) {
  if (x.rows() < 2) {
    throw Error(ErrorCode::kTooFewRows, "PCA needs at least two rows");
  }
  if (!(retained_variance > 0.0 && retained_variance <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "retained variance outside (0,1]");
  }
  const double n = static_cast<double>(x.rows());
  PcaModel model;
  model.column_means = x.colwise().sum() / n;
  const MatrixXd xc = x.rowwise() - model.column_means;

  VectorXd values;
  MatrixXd vectors;
  if (x.cols() <= x.rows()) {
    const MatrixXd cov = (xc.transpose() * xc) / (n - 1.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(cov);
    values = solver.eigenvalues().reverse();
    vectors = solver.eigenvectors().rowwise().reverse();
  } else {
    // More features than rows: diagonalize the row Gram matrix and map its
    // eigenvectors back to feature space.
    const MatrixXd gram = (xc * xc.transpose()) / (n - 1.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(gram);
    values = solver.eigenvalues().reverse();
    const MatrixXd u = solver.eigenvectors().rowwise().reverse();
    vectors = MatrixXd::Zero(x.cols(), u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      if (values(j) > 0.0) {
        vectors.col(j) = xc.transpose() * u.col(j);
        vectors.col(j).normalize();
      }
    }
  }
  values = values.cwiseMax(0.0);
  const double total = values.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kZeroVariance, "all rows are identical");
  }
  model.eigenvalues = values;

  Eigen::Index k = 0;
  double cumulative = 0.0;
  while (k < values.size()) {
    cumulative += values(k) / total;
    ++k;
    if (cumulative >= retained_variance - 1e-12) break;
  }
  model.components = vectors.leftCols(k);
  FixSigns(model.components);
  model.explained_variance_ratio = values.head(k) / total;
  return model;
}

MatrixXd PcaLinRegModel::Predict(const MatrixXd& x) const {
  return (pca.Transform(x) * regression_coefficients).rowwise() + bias;
}

MatrixXd PcaLinRegModel::TraceCoefficients() const {
  return pca.components * regression_coefficients;
}

PcaLinRegModel PcaLinRegFit(const MatrixXd& x, const MatrixXd& y,
                            double retained_variance) {
  CheckRows(x, y);
  PcaLinRegModel model;
  model.pca = PcaFit(x, retained_variance);
  const double n = static_cast<double>(x.rows());
  model.bias = y.colwise().sum() / n;
  const MatrixXd z = model.pca.Transform(x);
  const MatrixXd yc = y.rowwise() - model.bias;
  model.regression_coefficients = z.colPivHouseholderQr().solve(yc);
  return model;
}

}  // namespace impressions
