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

// Clip manifests, dataset splits and training-mean binarization.
//
// Manifest format (comma separated, header required):
//
//   clip_id,source_video_id,user_id,gender,ethnicity,age_group,
//   interview,O,C,E,A,N,transcript_path
//
// An empty cell means unknown or absent. The six label cells must be either
// all present or all empty. Transcript paths are resolved relative to the
// manifest's directory.

#ifndef IMPRESSIONS_DATASET_H_
#define IMPRESSIONS_DATASET_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "impressions/traits.h"

namespace impressions {

enum class Gender { kUnknown, kMale, kFemale };
enum class Ethnicity { kUnknown, kAsian, kCaucasian, kAfroAmerican, kOther };

// The eight annotated age bands plus unknown. Enumerator order is the ordinal
// used for age correlations.
enum class AgeGroup {
  k0To6 = 0,
  k7To13,
  k14To18,
  k19To24,
  k25To32,
  k33To45,
  k46To60,
  k61Plus,
  kUnknown,
};
inline constexpr int kNumAgeGroups = 8;

std::string_view GenderName(Gender g);
std::string_view EthnicityName(Ethnicity e);
std::string_view AgeGroupName(AgeGroup a);
std::optional<Gender> ParseGender(std::string_view text);
std::optional<Ethnicity> ParseEthnicity(std::string_view text);
std::optional<AgeGroup> ParseAgeGroup(std::string_view text);

struct ClipRecord {
  std::string clip_id;
  std::string source_video_id;
  std::optional<std::string> user_id;
  Gender gender = Gender::kUnknown;
  Ethnicity ethnicity = Ethnicity::kUnknown;
  AgeGroup age_group = AgeGroup::kUnknown;
  std::optional<TraitVector> labels;
  // Stored as written in the manifest; resolve with Dataset::TranscriptPath.
  std::optional<std::string> transcript_path;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

struct DatasetSplit {
  std::set<std::string> train_ids;
  std::set<std::string> validation_ids;
  std::set<std::string> test_ids;
};

class Dataset {
 public:
  Dataset() = default;
  // Validates id uniqueness and label ranges.
  Dataset(std::vector<ClipRecord> records, std::filesystem::path base_dir);

  const std::vector<ClipRecord>& records() const { return records_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  // nullptr when the id is unknown.
  const ClipRecord* Find(std::string_view clip_id) const;
  const ClipRecord& Get(std::string_view clip_id) const;
  bool Contains(std::string_view clip_id) const;
  std::set<std::string> Ids() const;

  std::optional<std::filesystem::path> TranscriptPath(
      const ClipRecord& record) const;

 private:
  std::vector<ClipRecord> records_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::filesystem::path base_dir_;
};

// Loads and validates a manifest. Without a split file every clip is placed
// in the training split.
struct LoadedDataset {
  Dataset dataset;
  DatasetSplit split;
};
LoadedDataset LoadDataset(const std::filesystem::path& manifest_path,
                          const std::optional<std::filesystem::path>&
                              split_path = std::nullopt);

Dataset LoadManifest(const std::filesystem::path& manifest_path);

// Serializes records in manifest format. Scores use the shortest round-trip
// decimal form, so save followed by load is bit-exact.
std::string FormatManifest(const std::vector<ClipRecord>& records);
void SaveManifest(const std::vector<ClipRecord>& records,
                  const std::filesystem::path& path);

// Two-column split file: clip_id,split with split in {train, validation,
// test} ("val" and "dev" are accepted aliases).
DatasetSplit LoadSplit(const std::filesystem::path& path);
// Three newline-separated id lists.
DatasetSplit LoadSplitLists(const std::filesystem::path& train,
                            const std::filesystem::path& validation,
                            const std::filesystem::path& test);
std::string FormatSplit(const DatasetSplit& split);

// Checks pairwise disjointness and that all ids exist in the dataset.
void ValidateSplit(const DatasetSplit& split, const Dataset& dataset);

struct BinarizationThresholds {
  PerDimension<double> values{};
};

// Per-dimension arithmetic mean of the training labels. Throws
// EmptyTrainSplit or UnlabeledTrainClip.
BinarizationThresholds ComputeThresholds(const Dataset& dataset,
                                         const DatasetSplit& split);
BinarizationThresholds ComputeThresholds(
    const std::vector<TraitVector>& train_labels);

// bit = value >= threshold.
TraitBits Binarize(const TraitVector& values,
                   const BinarizationThresholds& thresholds);

}  // namespace impressions

#endif  // IMPRESSIONS_DATASET_H_
