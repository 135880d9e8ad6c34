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

#include "impressions/feature_matrix.h"

#include <cmath>
#include <limits>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {

FeatureMatrix::FeatureMatrix(std::string modality,
                             std::vector<std::string> column_names)
    : modality_(std::move(modality)), columns_(std::move(column_names)) {}

void FeatureMatrix::AddRow(const std::string& clip_id,
                           std::vector<double> values) {
  if (values.size() != columns_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                modality_ + "/" + clip_id + ": row has " +
                    std::to_string(values.size()) + " values, expected " +
                    std::to_string(columns_.size()));
  }
  if (!rows_.emplace(clip_id, std::move(values)).second) {
    throw Error(ErrorCode::kDuplicateId, modality_ + "/" + clip_id);
  }
}

bool FeatureMatrix::Contains(const std::string& clip_id) const {
  return rows_.count(clip_id) != 0;
}

const std::vector<double>& FeatureMatrix::Row(const std::string& clip_id) const {
  auto it = rows_.find(clip_id);
  if (it == rows_.end()) {
    throw Error(ErrorCode::kUnknownId, modality_ + " has no row for " + clip_id);
  }
  return it->second;
}

std::set<std::string> FeatureMatrix::Ids() const {
  std::set<std::string> ids;
  for (const auto& [id, unused] : rows_) ids.insert(id);
  return ids;
}

Eigen::MatrixXd FeatureMatrix::Gather(const std::vector<std::string>& ids) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()),
                      static_cast<Eigen::Index>(width()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::vector<double>& row = Row(ids[i]);
    for (std::size_t j = 0; j < row.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return out;
}

FeatureMatrix LoadFeatureMatrix(const std::filesystem::path& path,
                                const std::string& modality,
                                NonFinitePolicy policy) {
  const Table table = ReadTable(path);
  if (table.header.empty() || table.header[0] != "clip_id") {
    throw Error(ErrorCode::kMalformedRow,
                path.string() + ": first column must be clip_id");
  }
  std::vector<std::string> columns(table.header.begin() + 1,
                                   table.header.end());
  const std::size_t width = columns.size();

  std::vector<std::vector<double>> values(table.rows.size());
  std::vector<double> column_sum(width, 0.0);
  std::vector<std::size_t> column_count(width, 0);
  bool any_missing = false;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    values[r].resize(width);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = table.rows[r][c + 1];
      std::optional<double> v = cell.empty() ? std::nullopt : ParseDouble(cell);
      if (cell.empty() || (v && !std::isfinite(*v))) {
        if (policy == NonFinitePolicy::kReject) {
          throw Error(ErrorCode::kNonFiniteValue,
                      path.string() + ":" +
                          std::to_string(table.line_numbers[r]) + ": column " +
                          columns[c]);
        }
        values[r][c] = std::numeric_limits<double>::quiet_NaN();
        any_missing = true;
        continue;
      }
      if (!v) {
        throw Error(ErrorCode::kMalformedRow,
                    path.string() + ":" +
                        std::to_string(table.line_numbers[r]) + ": '" + cell +
                        "' is not a number");
      }
      values[r][c] = *v;
      column_sum[c] += *v;
      ++column_count[c];
    }
  }
  if (any_missing) {
    for (auto& row : values) {
      for (std::size_t c = 0; c < width; ++c) {
        if (std::isnan(row[c])) {
          row[c] = column_count[c] > 0
                       ? column_sum[c] / static_cast<double>(column_count[c])
                       : 0.0;
        }
      }
    }
  }

  FeatureMatrix matrix(modality, std::move(columns));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    matrix.AddRow(table.rows[r][0], std::move(values[r]));
  }
  return matrix;
}

std::string FormatFeatureMatrix(const FeatureMatrix& matrix) {
  std::vector<std::string> header = {"clip_id"};
  header.insert(header.end(), matrix.column_names().begin(),
                matrix.column_names().end());
  std::string out = JoinRow(header) + "\n";
  for (const auto& [id, row] : matrix.rows()) {
    std::vector<std::string> fields = {id};
    for (double v : row) fields.push_back(FormatDouble(v));
    out += JoinRow(fields) + "\n";
  }
  return out;
}

void SaveFeatureMatrix(const FeatureMatrix& matrix,
                       const std::filesystem::path& path) {
  WriteStringToFile(path, FormatFeatureMatrix(matrix));
}

}  // namespace impressions
