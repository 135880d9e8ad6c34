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

// Decision explanations: an information-gain tree from binarized personality
// traits to the invite decision, rendered as a root-to-leaf narrative, and
// percentile reports traced through PCA regression coefficients.

#ifndef IMPRESSIONS_EXPLAINER_H_
#define IMPRESSIONS_EXPLAINER_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "impressions/dataset.h"
#include "impressions/learners.h"
#include "impressions/traits.h"

namespace impressions {

// Five bits in kPersonalityTraits order (O, C, E, A, non-N).
using PersonalityBits = std::array<bool, 5>;

PersonalityBits PersonalityBitsOf(const TraitBits& bits);

struct ExplanationNode {
  int trait = -1;  // index into kPersonalityTraits; -1 for a leaf
  int low = -1;    // child for bit 0
  int high = -1;   // child for bit 1
  bool invite = false;  // majority label (leaves; also kept for inner nodes)
  long n = 0;
  long n_invite = 0;
  double gain = 0.0;  // information gain of this node's split, in bits

  bool is_leaf() const { return trait < 0; }
};

struct PathStep {
  Dimension trait;
  bool high = false;

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

class ExplanationTree {
 public:
  ExplanationTree() : nodes_(1) {}
  explicit ExplanationTree(std::vector<ExplanationNode> nodes)
      : nodes_(std::move(nodes)) {}

  const std::vector<ExplanationNode>& nodes() const { return nodes_; }
  bool Classify(const PersonalityBits& bits) const;
  // Root-first list of the traits tested on the way to the leaf.
  std::vector<PathStep> Path(const PersonalityBits& bits) const;
  int Depth() const;

 private:
  std::vector<ExplanationNode> nodes_;
};

// Greedy ID3 with Shannon entropy. A node becomes a leaf when pure, when no
// trait is left on its path, or when the best gain is <= 1e-12. Gain ties go
// to the lower trait index; leaf label ties go to "not invited".
ExplanationTree FitExplanationTree(const std::vector<PersonalityBits>& traits,
                                   const std::vector<bool>& invite);

double TrainingAccuracy(const ExplanationTree& tree,
                        const std::vector<PersonalityBits>& traits,
                        const std::vector<bool>& invite);

inline constexpr std::string_view kNarrativeTemplateVersion = "narrative-v1";

struct TraceExplanation {
  std::string clip_id;
  std::vector<PathStep> path;
  bool invite = false;
  std::string narrative;
  // Optional sentence naming the modality group closest to the fused score.
  std::optional<std::string> attribution;
  // (dimension name, predicted score minus its binarization threshold).
  std::array<std::pair<std::string, double>, kNumDimensions> score_bars;
};

// Binarizes `predicted`, walks the tree and renders
//   "Candidate <id> is [not ]invited for an interview due to <level>
//    apparent <trait>, ... and <level> apparent <trait>."
// or "... with no deciding trait." for a single-leaf tree.
TraceExplanation ExplainDecision(const ExplanationTree& tree,
                                 const std::string& clip_id,
                                 const TraitVector& predicted,
                                 const BinarizationThresholds& thresholds);

// Sets `explanation.attribution` to the group whose interview prediction is
// closest to the fused one (first group on ties). No-op for empty input.
void AttributeToGroup(
    TraceExplanation& explanation, const TraitVector& fused,
    const std::vector<std::pair<std::string, TraitVector>>& group_predictions);

struct ParsedNarrative {
  std::string clip_id;
  bool invite = false;
  std::vector<PathStep> path;
};

// Inverse of the narrative template; nullopt for text outside the grammar.
std::optional<ParsedNarrative> ParseNarrative(std::string_view text);

// Horizontal bar chart of the six score bars, centered at zero.
std::string RenderScoreBarsSvg(const TraceExplanation& explanation);

std::string FormatExplanationJson(const TraceExplanation& explanation);

// 100 * rank / N, where rank is the mean rank of `value` among the train
// values when it ties some of them and the count of smaller values
// otherwise. Clamped to [0, 100]. Throws EmptyInput.
double PercentileRank(std::span<const double> train, double value);

struct PercentileEntry {
  std::string feature;
  int component = 0;         // PCA dimension the feature was traced from
  double coefficient = 0.0;  // regression coefficient of that dimension
  double loading = 0.0;      // feature's loading on that dimension
  double value = 0.0;
  double train_min = 0.0;
  double train_max = 0.0;
  double percentile = 0.0;
  bool raises_score = false;  // sign of loading * coefficient
  std::string range_sentence;
  std::string direction_sentence;
};

struct RepresentationReport {
  std::string representation;
  bool missing = false;
  std::string notice;
  std::vector<PercentileEntry> entries;
};

struct RepresentationInput {
  std::string name;
  const PcaLinRegModel* model = nullptr;
  Eigen::MatrixXd train;  // raw training rows, same columns as the model
  std::vector<std::string> feature_names;
  // Absent when the clip lacks this representation.
  std::optional<std::vector<double>> clip_values;
};

// Picks the `top_k` largest-|coefficient| PCA dimensions for `target`, traces
// each to its largest-|loading| feature (deduplicated, first occurrence
// kept) and reports range, percentile and direction. A representation with
// no clip values is returned with missing = true and a notice.
RepresentationReport ReportRepresentation(const RepresentationInput& input,
                                          Dimension target, int top_k = 2);

struct PercentileReport {
  std::string clip_id;
  Dimension target = Dimension::kInterview;
  std::vector<RepresentationReport> representations;
};

std::string FormatPercentileReportText(const PercentileReport& report);
std::string FormatPercentileReportJson(const PercentileReport& report);

}  // namespace impressions

#endif  // IMPRESSIONS_EXPLAINER_H_
