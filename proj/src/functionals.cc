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

#include "impressions/functionals.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {

// The fits use the discrete orthogonal polynomials on x = 0..T-1:
//   p1(x) = x - c,   p2(x) = (x - c)^2 - m2,   c = (T-1)/2,
// with m2 the mean of (x - c)^2. p2 is monic, so the coefficient of p2 in the
// least-squares expansion is the leading coefficient of the quadratic fit,
// and the projections never form an ill-conditioned normal matrix.
ContourFunctionals ComputeContourFunctionals(std::span<const double> contour,
                                             bool strict, bool* degraded) {
  const std::size_t t = contour.size();
  if (t == 0) throw Error(ErrorCode::kTooFewFrames, "empty contour");
  if (strict && t < 3) {
    throw Error(ErrorCode::kTooFewFrames,
                std::to_string(t) + " frames, curvature needs 3");
  }
  ContourFunctionals f;
  // Accumulate relative to the first sample so a constant contour is exact.
  const double base = contour[0];
  double shift = 0.0;
  for (double y : contour) shift += y - base;
  shift /= static_cast<double>(t);
  f.mean = base + shift;

  double sq = 0.0;
  for (double y : contour) {
    const double d = (y - base) - shift;
    sq += d * d;
  }
  f.std = std::sqrt(sq / static_cast<double>(t));

  if (t == 1) {
    f.offset = f.mean;
    if (degraded) *degraded = true;
    return f;
  }
  if (t == 2) {
    f.slope = contour[1] - contour[0];
    f.offset = contour[0];
    if (degraded) *degraded = true;
    return f;
  }

  const double center = static_cast<double>(t - 1) / 2.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const double u = static_cast<double>(i) - center;
    m2 += u * u;
  }
  m2 /= static_cast<double>(t);

  double p1y = 0.0, p1p1 = 0.0, p2y = 0.0, p2p2 = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    const double u = static_cast<double>(i) - center;
    const double p2 = u * u - m2;
    const double d = (contour[i] - base) - shift;
    p1y += u * d;
    p1p1 += u * u;
    p2y += p2 * d;
    p2p2 += p2 * p2;
  }
  f.slope = p1y / p1p1;
  f.offset = f.mean - f.slope * center;
  f.curvature = p2y / p2p2;
  return f;
}

std::vector<double> FunctionalDescriptor::Flatten() const {
  std::vector<double> out;
  out.reserve(per_dimension.size() * kNumFunctionals);
  for (const ContourFunctionals& f : per_dimension) {
    out.insert(out.end(), {f.mean, f.std, f.offset, f.slope, f.curvature});
  }
  return out;
}

FunctionalDescriptor ComputeFunctionals(const FrameSequenceFeatures& seq,
                                        bool strict) {
  if (seq.values.rows() == 0) {
    throw Error(ErrorCode::kTooFewFrames, seq.clip_id + ": no frames");
  }
  if (!seq.frame_index.empty()) {
    if (seq.frame_index.size() != static_cast<std::size_t>(seq.values.rows())) {
      throw Error(ErrorCode::kShapeMismatch, seq.clip_id + ": frame_index size");
    }
    for (std::size_t i = 1; i < seq.frame_index.size(); ++i) {
      if (seq.frame_index[i] <= seq.frame_index[i - 1]) {
        throw Error(ErrorCode::kInvalidArgument,
                    seq.clip_id + ": frame_index not strictly increasing");
      }
    }
  }
  FunctionalDescriptor desc;
  std::vector<double> contour(static_cast<std::size_t>(seq.values.rows()));
  for (Eigen::Index d = 0; d < seq.values.cols(); ++d) {
    for (Eigen::Index t = 0; t < seq.values.rows(); ++t) {
      contour[static_cast<std::size_t>(t)] = seq.values(t, d);
    }
    desc.per_dimension.push_back(
        ComputeContourFunctionals(contour, strict, &desc.degraded));
  }
  return desc;
}

std::vector<std::string> FunctionalColumnNames(
    const std::vector<std::string>& input_names) {
  static constexpr const char* kSuffix[kNumFunctionals] = {
      "mean", "std", "offset", "slope", "curvature"};
  std::vector<std::string> out;
  for (const auto& name : input_names) {
    for (const char* s : kSuffix) out.push_back(name + "_" + s);
  }
  return out;
}

std::vector<FrameSequenceFeatures> LoadFrameFeatures(
    const std::filesystem::path& path, std::vector<std::string>* feature_names) {
  const Table table = ReadTable(path);
  if (table.header.size() < 3 || table.header[0] != "clip_id" ||
      table.header[1] != "frame_index") {
    throw Error(ErrorCode::kMalformedRow,
                path.string() +
                    ": expected header clip_id,frame_index,<features...>");
  }
  const std::size_t dims = table.header.size() - 2;
  if (feature_names) {
    feature_names->assign(table.header.begin() + 2, table.header.end());
  }
  std::map<std::string, std::map<long, std::vector<double>>> frames;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where =
        path.string() + ":" + std::to_string(table.line_numbers[r]);
    auto idx = ParseDouble(row[1]);
    if (!idx || *idx != std::floor(*idx)) {
      throw Error(ErrorCode::kMalformedRow, where + ": bad frame_index");
    }
    std::vector<double> values(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      auto v = ParseDouble(row[d + 2]);
      if (!v) throw Error(ErrorCode::kMalformedRow, where + ": bad value");
      if (!std::isfinite(*v)) {
        throw Error(ErrorCode::kNonFiniteValue, where + ": " + row[d + 2]);
      }
      values[d] = *v;
    }
    if (!frames[row[0]].emplace(static_cast<long>(*idx), std::move(values))
             .second) {
      throw Error(ErrorCode::kMalformedRow, where + ": repeated frame_index");
    }
  }
  std::vector<FrameSequenceFeatures> out;
  for (auto& [clip, by_index] : frames) {
    FrameSequenceFeatures seq;
    seq.clip_id = clip;
    seq.values.resize(static_cast<Eigen::Index>(by_index.size()),
                      static_cast<Eigen::Index>(dims));
    Eigen::Index t = 0;
    for (auto& [index, values] : by_index) {
      seq.frame_index.push_back(index);
      for (std::size_t d = 0; d < dims; ++d) {
        seq.values(t, static_cast<Eigen::Index>(d)) = values[d];
      }
      ++t;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace impressions
