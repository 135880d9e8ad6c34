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

#include "impressions/dataset.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

constexpr std::array<std::string_view, 13> kManifestHeader = {
    "clip_id", "source_video_id", "user_id", "gender",  "ethnicity",
    "age_group", "interview",     "O",       "C",       "E",
    "A",       "N",               "transcript_path"};

std::string Where(const std::filesystem::path& path, int line) {
  return path.string() + ":" + std::to_string(line);
}

// Sums in sorted order so the result does not depend on input order.
double OrderIndependentMean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view GenderName(Gender g) {
  switch (g) {
    case Gender::kMale: return "male";
    case Gender::kFemale: return "female";
    case Gender::kUnknown: break;
  }
  return "";
}

std::string_view EthnicityName(Ethnicity e) {
  switch (e) {
    case Ethnicity::kAsian: return "asian";
    case Ethnicity::kCaucasian: return "caucasian";
    case Ethnicity::kAfroAmerican: return "afro_american";
    case Ethnicity::kOther: return "other";
    case Ethnicity::kUnknown: break;
  }
  return "";
}

std::string_view AgeGroupName(AgeGroup a) {
  switch (a) {
    case AgeGroup::k0To6: return "0-6";
    case AgeGroup::k7To13: return "7-13";
    case AgeGroup::k14To18: return "14-18";
    case AgeGroup::k19To24: return "19-24";
    case AgeGroup::k25To32: return "25-32";
    case AgeGroup::k33To45: return "33-45";
    case AgeGroup::k46To60: return "46-60";
    case AgeGroup::k61Plus: return "61+";
    case AgeGroup::kUnknown: break;
  }
  return "";
}

std::optional<Gender> ParseGender(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v.empty() || v == "unknown") return Gender::kUnknown;
  if (v == "male" || v == "m") return Gender::kMale;
  if (v == "female" || v == "f") return Gender::kFemale;
  return std::nullopt;
}

std::optional<Ethnicity> ParseEthnicity(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v.empty() || v == "unknown") return Ethnicity::kUnknown;
  if (v == "asian") return Ethnicity::kAsian;
  if (v == "caucasian") return Ethnicity::kCaucasian;
  if (v == "afro_american" || v == "afro-american" || v == "african_american") {
    return Ethnicity::kAfroAmerican;
  }
  if (v == "other") return Ethnicity::kOther;
  return std::nullopt;
}

std::optional<AgeGroup> ParseAgeGroup(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v.empty() || v == "unknown") return AgeGroup::kUnknown;
  for (int i = 0; i < kNumAgeGroups; ++i) {
    const auto group = static_cast<AgeGroup>(i);
    if (v == AgeGroupName(group)) return group;
  }
  return std::nullopt;
}

Dataset::Dataset(std::vector<ClipRecord> records, std::filesystem::path base_dir)
    : records_(std::move(records)), base_dir_(std::move(base_dir)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const ClipRecord& r = records_[i];
    if (r.clip_id.empty()) {
      throw Error(ErrorCode::kMalformedRow, "empty clip_id");
    }
    if (!index_.emplace(r.clip_id, i).second) {
      throw Error(ErrorCode::kDuplicateId, r.clip_id);
    }
    if (r.labels && !r.labels->IsValid()) {
      throw Error(ErrorCode::kLabelOutOfRange, r.clip_id);
    }
  }
}

const ClipRecord* Dataset::Find(std::string_view clip_id) const {
  auto it = index_.find(clip_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

const ClipRecord& Dataset::Get(std::string_view clip_id) const {
  const ClipRecord* r = Find(clip_id);
  if (r == nullptr) throw Error(ErrorCode::kUnknownId, std::string(clip_id));
  return *r;
}

bool Dataset::Contains(std::string_view clip_id) const {
  return index_.find(clip_id) != index_.end();
}

std::set<std::string> Dataset::Ids() const {
  std::set<std::string> ids;
  for (const auto& [id, unused] : index_) ids.insert(id);
  return ids;
}

std::optional<std::filesystem::path> Dataset::TranscriptPath(
    const ClipRecord& record) const {
  if (!record.transcript_path) return std::nullopt;
  std::filesystem::path p(*record.transcript_path);
  if (p.is_relative()) p = base_dir_ / p;
  return p;
}

Dataset LoadManifest(const std::filesystem::path& manifest_path) {
  const Table table = ReadTable(manifest_path);
  std::array<std::size_t, kManifestHeader.size()> col{};
  for (std::size_t i = 0; i < kManifestHeader.size(); ++i) {
    auto c = table.Column(kManifestHeader[i]);
    if (!c) {
      throw Error(ErrorCode::kMalformedRow,
                  manifest_path.string() + ": missing column '" +
                      std::string(kManifestHeader[i]) + "'");
    }
    col[i] = *c;
  }

  const std::filesystem::path base_dir = manifest_path.parent_path();
  std::vector<ClipRecord> records;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.line_numbers[r];
    ClipRecord rec;
    rec.clip_id = row[col[0]];
    if (rec.clip_id.empty()) {
      throw Error(ErrorCode::kMalformedRow,
                  Where(manifest_path, line) + ": empty clip_id");
    }
    if (!seen.insert(rec.clip_id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  Where(manifest_path, line) + ": " + rec.clip_id);
    }
    rec.source_video_id = row[col[1]];
    if (!row[col[2]].empty()) rec.user_id = row[col[2]];

    auto gender = ParseGender(row[col[3]]);
    auto ethnicity = ParseEthnicity(row[col[4]]);
    auto age = ParseAgeGroup(row[col[5]]);
    if (!gender || !ethnicity || !age) {
      throw Error(ErrorCode::kMalformedRow,
                  Where(manifest_path, line) + ": bad demographic value");
    }
    rec.gender = *gender;
    rec.ethnicity = *ethnicity;
    rec.age_group = *age;

    int present = 0;
    TraitVector labels;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      const std::string& cell = row[col[6 + d]];
      if (cell.empty()) continue;
      auto v = ParseDouble(cell);
      if (!v) {
        throw Error(ErrorCode::kMalformedRow,
                    Where(manifest_path, line) + ": bad label '" + cell + "'");
      }
      if (!std::isfinite(*v) || *v < 0.0 || *v > 1.0) {
        throw Error(ErrorCode::kLabelOutOfRange,
                    Where(manifest_path, line) + ": " + cell);
      }
      labels.values[d] = *v;
      ++present;
    }
    if (present == static_cast<int>(kNumDimensions)) {
      rec.labels = labels;
    } else if (present != 0) {
      throw Error(ErrorCode::kMalformedRow,
                  Where(manifest_path, line) + ": partial label row");
    }

    if (!row[col[12]].empty()) {
      rec.transcript_path = row[col[12]];
      std::filesystem::path p(*rec.transcript_path);
      if (p.is_relative()) p = base_dir / p;
      if (!std::filesystem::exists(p)) {
        throw Error(ErrorCode::kMissingFile,
                    Where(manifest_path, line) + ": " + p.string());
      }
    }
    records.push_back(std::move(rec));
  }
  return Dataset(std::move(records), base_dir);
}

LoadedDataset LoadDataset(
    const std::filesystem::path& manifest_path,
    const std::optional<std::filesystem::path>& split_path) {
  LoadedDataset out;
  out.dataset = LoadManifest(manifest_path);
  if (split_path) {
    out.split = LoadSplit(*split_path);
    ValidateSplit(out.split, out.dataset);
  } else {
    out.split.train_ids = out.dataset.Ids();
  }
  return out;
}

std::string FormatManifest(const std::vector<ClipRecord>& records) {
  std::string out;
  out += JoinRow(std::vector<std::string>(kManifestHeader.begin(),
                                          kManifestHeader.end()));
  out += '\n';
  for (const ClipRecord& r : records) {
    std::vector<std::string> fields;
    fields.push_back(r.clip_id);
    fields.push_back(r.source_video_id);
    fields.push_back(r.user_id.value_or(""));
    fields.emplace_back(GenderName(r.gender));
    fields.emplace_back(EthnicityName(r.ethnicity));
    fields.emplace_back(AgeGroupName(r.age_group));
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      fields.push_back(r.labels ? FormatDouble(r.labels->values[d]) : "");
    }
    fields.push_back(r.transcript_path.value_or(""));
    out += JoinRow(fields);
    out += '\n';
  }
  return out;
}

void SaveManifest(const std::vector<ClipRecord>& records,
                  const std::filesystem::path& path) {
  WriteStringToFile(path, FormatManifest(records));
}

DatasetSplit LoadSplit(const std::filesystem::path& path) {
  const Table table = ReadTable(path);
  auto id_col = table.Column("clip_id");
  auto split_col = table.Column("split");
  if (!id_col || !split_col) {
    throw Error(ErrorCode::kMalformedRow,
                path.string() + ": expected header clip_id,split");
  }
  DatasetSplit split;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& id = table.rows[r][*id_col];
    const std::string which = ToLower(table.rows[r][*split_col]);
    std::set<std::string>* target = nullptr;
    if (which == "train" || which == "training" || which == "dev") {
      target = &split.train_ids;
    } else if (which == "validation" || which == "val") {
      target = &split.validation_ids;
    } else if (which == "test") {
      target = &split.test_ids;
    } else {
      throw Error(ErrorCode::kMalformedRow,
                  Where(path, table.line_numbers[r]) + ": unknown split '" +
                      which + "'");
    }
    if (!target->insert(id).second) {
      throw Error(ErrorCode::kDuplicateId, Where(path, table.line_numbers[r]) +
                                               ": " + id);
    }
  }
  return split;
}

namespace {

std::set<std::string> ReadIdList(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    std::string id = Trim(line);
    if (id.empty()) continue;
    if (!ids.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId, path.string() + ": " + id);
    }
  }
  return ids;
}

}  // namespace

DatasetSplit LoadSplitLists(const std::filesystem::path& train,
                            const std::filesystem::path& validation,
                            const std::filesystem::path& test) {
  DatasetSplit split;
  split.train_ids = ReadIdList(train);
  split.validation_ids = ReadIdList(validation);
  split.test_ids = ReadIdList(test);
  return split;
}

std::string FormatSplit(const DatasetSplit& split) {
  std::string out = "clip_id,split\n";
  for (const auto& id : split.train_ids) out += EscapeField(id) + ",train\n";
  for (const auto& id : split.validation_ids) {
    out += EscapeField(id) + ",validation\n";
  }
  for (const auto& id : split.test_ids) out += EscapeField(id) + ",test\n";
  return out;
}

void ValidateSplit(const DatasetSplit& split, const Dataset& dataset) {
  const std::array<const std::set<std::string>*, 3> parts = {
      &split.train_ids, &split.validation_ids, &split.test_ids};
  for (std::size_t a = 0; a < parts.size(); ++a) {
    for (const auto& id : *parts[a]) {
      if (!dataset.Contains(id)) {
        throw Error(ErrorCode::kUnknownId, "split references " + id);
      }
      for (std::size_t b = a + 1; b < parts.size(); ++b) {
        if (parts[b]->count(id) != 0) {
          throw Error(ErrorCode::kDuplicateId, id + " is in two splits");
        }
      }
    }
  }
}

BinarizationThresholds ComputeThresholds(const Dataset& dataset,
                                         const DatasetSplit& split) {
  if (split.train_ids.empty()) {
    throw Error(ErrorCode::kEmptyTrainSplit, "no training clips");
  }
  std::vector<TraitVector> labels;
  labels.reserve(split.train_ids.size());
  for (const auto& id : split.train_ids) {
    const ClipRecord& r = dataset.Get(id);
    if (!r.labels) throw Error(ErrorCode::kUnlabeledTrainClip, id);
    labels.push_back(*r.labels);
  }
  return ComputeThresholds(labels);
}

BinarizationThresholds ComputeThresholds(
    const std::vector<TraitVector>& train_labels) {
  if (train_labels.empty()) {
    throw Error(ErrorCode::kEmptyTrainSplit, "no training labels");
  }
  BinarizationThresholds thr;
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    std::vector<double> column;
    column.reserve(train_labels.size());
    for (const TraitVector& t : train_labels) column.push_back(t.values[d]);
    thr.values[d] = OrderIndependentMean(std::move(column));
  }
  return thr;
}

TraitBits Binarize(const TraitVector& values,
                   const BinarizationThresholds& thresholds) {
  TraitBits bits{};
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    bits[d] = values.values[d] >= thresholds.values[d];
  }
  return bits;
}

}  // namespace impressions
