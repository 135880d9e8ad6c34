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

#ifndef IMPRESSIONS_FEATURE_MATRIX_H_
#define IMPRESSIONS_FEATURE_MATRIX_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace impressions {

// Named numeric columns keyed by clip id, for one modality.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::string modality, std::vector<std::string> column_names);

  const std::string& modality() const { return modality_; }
  const std::vector<std::string>& column_names() const { return columns_; }
  std::size_t width() const { return columns_.size(); }
  std::size_t size() const { return rows_.size(); }
  const std::map<std::string, std::vector<double>>& rows() const {
    return rows_;
  }

  // Throws ShapeMismatch on a wrong-length row, DuplicateId on a repeat.
  void AddRow(const std::string& clip_id, std::vector<double> values);
  bool Contains(const std::string& clip_id) const;
  // Throws UnknownId.
  const std::vector<double>& Row(const std::string& clip_id) const;
  std::set<std::string> Ids() const;

  // Dense matrix with one row per requested id, in the given order.
  Eigen::MatrixXd Gather(const std::vector<std::string>& ids) const;

  void set_modality(std::string modality) { modality_ = std::move(modality); }

 private:
  std::string modality_;
  std::vector<std::string> columns_;
  std::map<std::string, std::vector<double>> rows_;
};

enum class NonFinitePolicy { kReject, kImputeMean };

// Header: clip_id followed by column names. Non-finite or empty cells are
// rejected unless policy is kImputeMean, which fills them with the column
// mean of the finite entries.
FeatureMatrix LoadFeatureMatrix(const std::filesystem::path& path,
                                const std::string& modality,
                                NonFinitePolicy policy = NonFinitePolicy::kReject);

std::string FormatFeatureMatrix(const FeatureMatrix& matrix);
void SaveFeatureMatrix(const FeatureMatrix& matrix,
                       const std::filesystem::path& path);

}  // namespace impressions

#endif  // IMPRESSIONS_FEATURE_MATRIX_H_
