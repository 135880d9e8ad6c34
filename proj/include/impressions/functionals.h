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

// Temporal functionals that turn per-frame feature contours into a
// fixed-length clip descriptor.

#ifndef IMPRESSIONS_FUNCTIONALS_H_
#define IMPRESSIONS_FUNCTIONALS_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impressions/feature_matrix.h"

namespace impressions {

struct FrameSequenceFeatures {
  std::string clip_id;
  // Strictly increasing.
  std::vector<long> frame_index;
  // frames x feature dims.
  Eigen::MatrixXd values;
};

// Functionals of one contour. The polynomial fits use x = 0..T-1.
struct ContourFunctionals {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double offset = 0.0;
  double slope = 0.0;
  double curvature = 0.0;  // leading coefficient of the quadratic fit
};

inline constexpr int kNumFunctionals = 5;

struct FunctionalDescriptor {
  std::vector<ContourFunctionals> per_dimension;
  // Set when T < 3 and the short-sequence fallback was used.
  bool degraded = false;

  // Flattened as [d0.mean, d0.std, d0.offset, d0.slope, d0.curvature, d1...].
  std::vector<double> Flatten() const;
};

// Throws TooFewFrames on an empty contour, or when `strict` and T < 3.
// Otherwise T == 2 gives the two-point line and zero curvature, T == 1 gives
// zero slope and curvature; both set `degraded`.
ContourFunctionals ComputeContourFunctionals(std::span<const double> contour,
                                             bool strict, bool* degraded);

FunctionalDescriptor ComputeFunctionals(const FrameSequenceFeatures& seq,
                                        bool strict = false);

// Column names for a descriptor over `dims` input dimensions.
std::vector<std::string> FunctionalColumnNames(
    const std::vector<std::string>& input_names);

// Per-frame feature file: clip_id,frame_index,f0..fK. Rows of one clip may
// appear in any order; they are sorted by frame_index, and repeated indices
// are rejected.
std::vector<FrameSequenceFeatures> LoadFrameFeatures(
    const std::filesystem::path& path, std::vector<std::string>* feature_names);

}  // namespace impressions

#endif  // IMPRESSIONS_FUNCTIONALS_H_
