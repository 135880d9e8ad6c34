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

// Bradley-Terry-Luce aggregation of pairwise annotator judgments.
//
// Strengths are fitted with the minorization-maximization update of Hunter
// (2004):
//
//   pi_i <- W_i / sum_{j != i} n_ij / (pi_i + pi_j)
//
// where W_i counts effective wins of i and n_ij effective comparisons between
// i and j. A "don't know" answer is half a win for each side. Every item also
// plays prior_count wins and prior_count losses against a phantom item whose
// strength is the mean strength, which keeps all strengths positive and the
// comparison graph connected.

#ifndef IMPRESSIONS_BTL_H_
#define IMPRESSIONS_BTL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "impressions/traits.h"

namespace impressions {

enum class Outcome { kLeft, kRight, kDontKnow };

std::string_view OutcomeName(Outcome o);
std::optional<Outcome> ParseOutcome(std::string_view text);

struct PairwiseJudgment {
  std::string left_id;
  std::string right_id;
  Dimension dimension = Dimension::kInterview;
  Outcome outcome = Outcome::kDontKnow;
  std::optional<std::string> annotator_id;
};

struct BtlConfig {
  int max_iter = 10000;
  // Maximum relative change of any strength between iterations.
  double tol = 1e-10;
  double prior_count = 0.1;
};

struct BtlScores {
  Dimension dimension = Dimension::kInterview;
  // Positive, summing to one.
  std::map<std::string, double> strengths;
  // Min-max rescaled log-strengths; all 0.5 when strengths are equal.
  std::map<std::string, double> cardinal;
  int iterations = 0;
  // False when max_iter was reached first; the last iterate is returned.
  bool converged = false;
};

// Fits one dimension. All judgments must share a dimension and reference ids
// in `items`. Throws NoJudgments when no left/right judgment is present,
// UnknownId for ids outside `items`.
BtlScores FitBtl(const std::vector<PairwiseJudgment>& judgments,
                 const std::set<std::string>& items, const BtlConfig& config);

// Splits judgments by dimension and fits each one independently.
std::map<Dimension, BtlScores> FitBtlPerDimension(
    const std::vector<PairwiseJudgment>& judgments,
    const std::set<std::string>& items, const BtlConfig& config);

// Fraction of left/right judgments (of the scores' dimension) whose winner
// has the strictly larger cardinal score; exact ties count one half.
// Throws NoInformativeJudgments.
double ReconstructionAccuracy(const BtlScores& scores,
                              const std::vector<PairwiseJudgment>& judgments);

// Watts-Strogatz ring lattice over `items` (in sorted order) with each edge
// rewired with probability rewire_prob. Rewirings that disconnect the graph
// are re-sampled up to 100 times. Pairs are returned sorted, each pair
// ordered by ring position, without duplicates or self pairs.
std::vector<std::pair<std::string, std::string>> SampleSmallWorldPairs(
    const std::set<std::string>& items, int degree, double rewire_prob,
    std::uint64_t seed);

// Unordered clip pair for one dimension; `first` < `second`.
struct PairKey {
  Dimension dimension = Dimension::kInterview;
  std::string first;
  std::string second;

  friend auto operator<=>(const PairKey&, const PairKey&) = default;
};

// Groups judgments by unordered pair. Outcomes are re-oriented so that kLeft
// always means `first` won.
std::map<PairKey, std::vector<Outcome>> GroupByPair(
    const std::vector<PairwiseJudgment>& judgments);

// Mean binary (base 2) entropy of the left/right vote split per dimension.
// Don't-know votes are dropped and pairs with fewer than two remaining votes
// are skipped. Dimensions without usable pairs are absent from the result;
// throws NoUsablePairs if no dimension has one.
std::map<Dimension, double> ConsistencyEntropy(
    const std::map<PairKey, std::vector<Outcome>>& judgments_by_pair);

// Binary entropy in bits of a split with `a` and `b` votes.
double BinaryEntropy(double a, double b);

// Header: left_id,right_id,dimension,outcome,annotator_id.
std::vector<PairwiseJudgment> LoadJudgments(const std::filesystem::path& path);
std::string FormatJudgments(const std::vector<PairwiseJudgment>& judgments);

}  // namespace impressions

#endif  // IMPRESSIONS_BTL_H_
