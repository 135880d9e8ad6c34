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

#ifndef IMPRESSIONS_TRAITS_H_
#define IMPRESSIONS_TRAITS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace impressions {

// The six regression targets. The order is fixed and is the column order of
// every file this library writes.
enum class Dimension : int {
  kInterview = 0,
  kOpenness = 1,
  kConscientiousness = 2,
  kExtroversion = 3,
  kAgreeableness = 4,
  kNonNeuroticism = 5,
};

inline constexpr std::size_t kNumDimensions = 6;

inline constexpr std::array<Dimension, kNumDimensions> kAllDimensions = {
    Dimension::kInterview,     Dimension::kOpenness,
    Dimension::kConscientiousness, Dimension::kExtroversion,
    Dimension::kAgreeableness, Dimension::kNonNeuroticism};

inline constexpr std::size_t Index(Dimension d) {
  return static_cast<std::size_t>(d);
}

// Long lowercase name, e.g. "non_neuroticism".
std::string_view DimensionName(Dimension d);
// Manifest column header: interview, O, C, E, A, N.
std::string_view DimensionColumn(Dimension d);
// Accepts either the long name or the column header (case-insensitive).
std::optional<Dimension> ParseDimension(std::string_view text);

template <typename T>
using PerDimension = std::array<T, kNumDimensions>;

// Scores for the six dimensions, each expected in [0,1].
struct TraitVector {
  PerDimension<double> values{};

  double& operator[](Dimension d) { return values[Index(d)]; }
  double operator[](Dimension d) const { return values[Index(d)]; }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  // True when every value is finite and inside [0,1].
  bool IsValid() const;

  friend bool operator==(const TraitVector&, const TraitVector&) = default;
};

using TraitBits = PerDimension<bool>;

// The five personality traits, in explanation-tree feature order.
inline constexpr std::array<Dimension, 5> kPersonalityTraits = {
    Dimension::kOpenness, Dimension::kConscientiousness,
    Dimension::kExtroversion, Dimension::kAgreeableness,
    Dimension::kNonNeuroticism};

}  // namespace impressions

#endif  // IMPRESSIONS_TRAITS_H_
