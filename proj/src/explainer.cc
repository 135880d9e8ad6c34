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

#include "impressions/explainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

double Entropy(long positives, long n) {
  if (n == 0 || positives == 0 || positives == n) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(n);
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

class Id3Builder {
 public:
  Id3Builder(const std::vector<PersonalityBits>& traits,
             const std::vector<bool>& invite)
      : traits_(traits), invite_(invite) {}

  std::vector<ExplanationNode> Build() {
    std::vector<std::size_t> rows(traits_.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    Grow(rows, {});
    return std::move(nodes_);
  }

 private:
  int Grow(const std::vector<std::size_t>& rows, std::array<bool, 5> used) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    long positives = 0;
    for (std::size_t r : rows) positives += invite_[r] ? 1 : 0;
    const long n = static_cast<long>(rows.size());
    nodes_[id].n = n;
    nodes_[id].n_invite = positives;
    nodes_[id].invite = 2 * positives > n;
    const double parent = Entropy(positives, n);
    if (parent == 0.0) return id;

    int best = -1;
    double best_gain = 1e-12;
    for (int t = 0; t < 5; ++t) {
      if (used[static_cast<std::size_t>(t)]) continue;
      long n_high = 0, pos_high = 0;
      for (std::size_t r : rows) {
        if (traits_[r][static_cast<std::size_t>(t)]) {
          ++n_high;
          pos_high += invite_[r] ? 1 : 0;
        }
      }
      const long n_low = n - n_high;
      const long pos_low = positives - pos_high;
      const double children =
          (static_cast<double>(n_high) * Entropy(pos_high, n_high) +
           static_cast<double>(n_low) * Entropy(pos_low, n_low)) /
          static_cast<double>(n);
      const double gain = parent - children;
      if (gain > best_gain) {
        best_gain = gain;
        best = t;
      }
    }
    if (best < 0) return id;

    std::vector<std::size_t> low, high;
    for (std::size_t r : rows) {
      (traits_[r][static_cast<std::size_t>(best)] ? high : low).push_back(r);
    }
    used[static_cast<std::size_t>(best)] = true;
    nodes_[id].trait = best;
    nodes_[id].gain = best_gain;
    const int low_id = Grow(low, used);
    nodes_[id].low = low_id;
    const int high_id = Grow(high, used);
    nodes_[id].high = high_id;
    return id;
  }

  const std::vector<PersonalityBits>& traits_;
  const std::vector<bool>& invite_;
  std::vector<ExplanationNode> nodes_;
};

std::string TraitPhrase(Dimension d) {
  std::string name(DimensionName(d));
  std::replace(name.begin(), name.end(), '_', '-');
  return name;
}

std::optional<Dimension> ParseTraitPhrase(const std::string& phrase) {
  for (Dimension d : kPersonalityTraits) {
    if (TraitPhrase(d) == phrase) return d;
  }
  return std::nullopt;
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

PersonalityBits PersonalityBitsOf(const TraitBits& bits) {
  PersonalityBits out{};
  for (std::size_t i = 0; i < kPersonalityTraits.size(); ++i) {
    out[i] = bits[Index(kPersonalityTraits[i])];
  }
  return out;
}

bool ExplanationTree::Classify(const PersonalityBits& bits) const {
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const ExplanationNode& node = nodes_[static_cast<std::size_t>(id)];
    id = bits[static_cast<std::size_t>(node.trait)] ? node.high : node.low;
  }
  return nodes_[static_cast<std::size_t>(id)].invite;
}

std::vector<PathStep> ExplanationTree::Path(const PersonalityBits& bits) const {
  std::vector<PathStep> path;
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const ExplanationNode& node = nodes_[static_cast<std::size_t>(id)];
    const bool high = bits[static_cast<std::size_t>(node.trait)];
    path.push_back({kPersonalityTraits[static_cast<std::size_t>(node.trait)],
                    high});
    id = high ? node.high : node.low;
  }
  return path;
}

int ExplanationTree::Depth() const {
  int depth = 0;
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    depth = std::max(depth, d);
    const ExplanationNode& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.low, d + 1);
      stack.emplace_back(node.high, d + 1);
    }
  }
  return depth;
}

ExplanationTree FitExplanationTree(const std::vector<PersonalityBits>& traits,
                                   const std::vector<bool>& invite) {
  if (traits.size() != invite.size()) {
    throw Error(ErrorCode::kLengthMismatch, "traits and labels differ in length");
  }
  return ExplanationTree(Id3Builder(traits, invite).Build());
}

double TrainingAccuracy(const ExplanationTree& tree,
                        const std::vector<PersonalityBits>& traits,
                        const std::vector<bool>& invite) {
  if (traits.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < traits.size(); ++i) {
    correct += tree.Classify(traits[i]) == invite[i];
  }
  return static_cast<double>(correct) / static_cast<double>(traits.size());
}

TraceExplanation ExplainDecision(const ExplanationTree& tree,
                                 const std::string& clip_id,
                                 const TraitVector& predicted,
                                 const BinarizationThresholds& thresholds) {
  const PersonalityBits bits = PersonalityBitsOf(Binarize(predicted, thresholds));
  TraceExplanation e;
  e.clip_id = clip_id;
  e.invite = tree.Classify(bits);
  e.path = tree.Path(bits);
  std::string text = "Candidate " + clip_id + " is " +
                     (e.invite ? "" : "not ") + "invited for an interview ";
  if (e.path.empty()) {
    text += "with no deciding trait.";
  } else {
    text += "due to ";
    for (std::size_t i = 0; i < e.path.size(); ++i) {
      if (i > 0) text += i + 1 == e.path.size() ? " and " : ", ";
      text += std::string(e.path[i].high ? "high" : "low") + " apparent " +
              TraitPhrase(e.path[i].trait);
    }
    text += ".";
  }
  e.narrative = std::move(text);
  for (std::size_t d = 0; d < kNumDimensions; ++d) {
    e.score_bars[d] = {std::string(DimensionName(kAllDimensions[d])),
                       predicted[d] - thresholds.values[d]};
  }
  return e;
}

void AttributeToGroup(
    TraceExplanation& explanation, const TraitVector& fused,
    const std::vector<std::pair<std::string, TraitVector>>& group_predictions) {
  if (group_predictions.empty()) return;
  std::size_t best = 0;
  double best_gap = std::abs(group_predictions[0].second[Dimension::kInterview] -
                             fused[Dimension::kInterview]);
  for (std::size_t i = 1; i < group_predictions.size(); ++i) {
    const double gap = std::abs(group_predictions[i].second[Dimension::kInterview] -
                                fused[Dimension::kInterview]);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  explanation.attribution = "This impression is primarily gained from " +
                            group_predictions[best].first + " features.";
}

std::optional<ParsedNarrative> ParseNarrative(std::string_view text) {
  static const std::regex kSentence(
      R"(^Candidate (\S+) is (not )?invited for an interview (?:due to (.+)|with no deciding trait)\.$)");
  static const std::regex kStep(R"(^(high|low) apparent ([a-z-]+)$)");
  std::smatch m;
  const std::string s(text);
  if (!std::regex_match(s, m, kSentence)) return std::nullopt;
  ParsedNarrative parsed;
  parsed.clip_id = m[1].str();
  parsed.invite = !m[2].matched;
  if (!m[3].matched) return parsed;

  std::vector<std::string> parts;
  std::string clauses = m[3].str();
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = clauses.find(", ", pos);
    if (comma == std::string::npos) break;
    parts.push_back(clauses.substr(pos, comma - pos));
    pos = comma + 2;
  }
  const std::string tail = clauses.substr(pos);
  const std::size_t and_pos = tail.find(" and ");
  if (and_pos == std::string::npos) {
    if (!parts.empty()) return std::nullopt;
    parts.push_back(tail);
  } else {
    parts.push_back(tail.substr(0, and_pos));
    parts.push_back(tail.substr(and_pos + 5));
  }
  for (const std::string& part : parts) {
    std::smatch sm;
    if (!std::regex_match(part, sm, kStep)) return std::nullopt;
    auto trait = ParseTraitPhrase(sm[2].str());
    if (!trait) return std::nullopt;
    for (const PathStep& step : parsed.path) {
      if (step.trait == *trait) return std::nullopt;
    }
    parsed.path.push_back({*trait, sm[1].str() == "high"});
  }
  return parsed;
}

std::string RenderScoreBarsSvg(const TraceExplanation& explanation) {
  constexpr int kWidth = 420;
  constexpr int kRow = 28;
  constexpr int kLabel = 140;
  constexpr double kCenter = kLabel + (kWidth - kLabel) / 2.0;
  constexpr double kScale = (kWidth - kLabel) / 2.0 - 10.0;
  const int height = kRow * static_cast<int>(kNumDimensions) + 20;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << height << "\" font-family=\"sans-serif\" "
      << "font-size=\"12\">\n";
  out << "  <line x1=\"" << Fixed(kCenter, 1) << "\" y1=\"5\" x2=\""
      << Fixed(kCenter, 1) << "\" y2=\"" << height - 5
      << "\" stroke=\"#444\"/>\n";
  for (std::size_t i = 0; i < explanation.score_bars.size(); ++i) {
    const auto& [name, value] = explanation.score_bars[i];
    const double v = std::clamp(value, -1.0, 1.0);
    const double y = 10.0 + kRow * static_cast<double>(i);
    const double w = std::abs(v) * kScale;
    const double x = v >= 0.0 ? kCenter : kCenter - w;
    out << "  <text x=\"4\" y=\"" << Fixed(y + 14.0, 1) << "\">" << name
        << "</text>\n";
    out << "  <rect x=\"" << Fixed(x, 2) << "\" y=\"" << Fixed(y, 1)
        << "\" width=\"" << Fixed(w, 2) << "\" height=\"" << kRow - 8
        << "\" fill=\"" << (v >= 0.0 ? "#3a7d44" : "#b03a2e") << "\"/>\n";
    out << "  <text x=\"" << Fixed(kCenter + (v >= 0.0 ? -44.0 : 4.0), 1)
        << "\" y=\"" << Fixed(y + 14.0, 1) << "\">" << Fixed(value, 3)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string FormatExplanationJson(const TraceExplanation& e) {
  nlohmann::ordered_json j;
  j["clip_id"] = e.clip_id;
  j["template_version"] = kNarrativeTemplateVersion;
  j["decision"] = e.invite ? "invite" : "no_invite";
  nlohmann::ordered_json path = nlohmann::ordered_json::array();
  for (const PathStep& s : e.path) {
    path.push_back({{"trait", DimensionName(s.trait)},
                    {"level", s.high ? "high" : "low"}});
  }
  j["path"] = path;
  j["narrative"] = e.narrative;
  j["attribution"] = e.attribution ? nlohmann::ordered_json(*e.attribution)
                                   : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json bars;
  for (const auto& [name, value] : e.score_bars) bars[name] = value;
  j["score_bars"] = bars;
  return j.dump(2) + "\n";
}

double PercentileRank(std::span<const double> train, double value) {
  if (train.empty()) throw Error(ErrorCode::kEmptyInput, "no train values");
  long less = 0, equal = 0;
  for (double t : train) {
    if (t < value) {
      ++less;
    } else if (t == value) {
      ++equal;
    }
  }
  const double rank = equal > 0 ? static_cast<double>(less) +
                                      (static_cast<double>(equal) + 1.0) / 2.0
                                : static_cast<double>(less);
  return std::clamp(100.0 * rank / static_cast<double>(train.size()), 0.0,
                    100.0);
}

RepresentationReport ReportRepresentation(const RepresentationInput& input,
                                          Dimension target, int top_k) {
  RepresentationReport report;
  report.representation = input.name;
  if (input.model == nullptr || !input.clip_values) {
    report.missing = true;
    report.notice = "No " + input.name +
                    " features are available for this video; this "
                    "representation is skipped.";
    return report;
  }
  const PcaLinRegModel& model = *input.model;
  const std::size_t d = input.feature_names.size();
  if (input.clip_values->size() != d ||
      static_cast<std::size_t>(model.pca.components.rows()) != d ||
      static_cast<std::size_t>(input.train.cols()) != d) {
    throw Error(ErrorCode::kShapeMismatch,
                "representation '" + input.name + "' has inconsistent widths");
  }
  const Eigen::VectorXd coefs =
      model.regression_coefficients.col(static_cast<Eigen::Index>(Index(target)));
  std::vector<int> dims(static_cast<std::size_t>(coefs.size()));
  for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = static_cast<int>(i);
  std::stable_sort(dims.begin(), dims.end(), [&](int a, int b) {
    return std::abs(coefs(a)) > std::abs(coefs(b));
  });
  dims.resize(std::min<std::size_t>(dims.size(),
                                    static_cast<std::size_t>(std::max(top_k, 0))));
  std::vector<int> seen;
  for (int k : dims) {
    const Eigen::VectorXd loadings = model.pca.components.col(k);
    Eigen::Index feature = 0;
    loadings.cwiseAbs().maxCoeff(&feature);
    if (std::find(seen.begin(), seen.end(), feature) != seen.end()) continue;
    seen.push_back(static_cast<int>(feature));

    PercentileEntry entry;
    entry.feature = input.feature_names[static_cast<std::size_t>(feature)];
    entry.component = k;
    entry.coefficient = coefs(k);
    entry.loading = loadings(feature);
    entry.value = (*input.clip_values)[static_cast<std::size_t>(feature)];
    const Eigen::VectorXd column = input.train.col(feature);
    entry.train_min = column.minCoeff();
    entry.train_max = column.maxCoeff();
    entry.percentile = PercentileRank(
        std::span<const double>(column.data(), static_cast<std::size_t>(column.size())),
        entry.value);
    entry.raises_score = entry.loading * entry.coefficient > 0.0;
    entry.range_sentence = "This feature typically ranges between " +
                           Fixed(entry.train_min, 6) + " and " +
                           Fixed(entry.train_max, 6) +
                           ". The score for this video is " +
                           Fixed(entry.value, 6) + " (percentile: " +
                           Fixed(entry.percentile, 0) + ").";
    entry.direction_sentence =
        std::string("In our model, a higher score on this feature typically "
                    "leads to a ") +
        (entry.raises_score ? "higher" : "lower") +
        " overall assessment score.";
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::string FormatPercentileReportText(const PercentileReport& report) {
  std::ostringstream out;
  out << "Report for " << report.clip_id << " ("
      << DimensionName(report.target) << ")\n";
  for (const RepresentationReport& r : report.representations) {
    out << "\n** " << r.representation << " **\n";
    if (r.missing) {
      out << r.notice << "\n";
      continue;
    }
    for (const PercentileEntry& e : r.entries) {
      out << "\n*** " << e.feature << " ***\n" << e.range_sentence << "\n"
          << e.direction_sentence << "\n";
    }
  }
  return out.str();
}

std::string FormatPercentileReportJson(const PercentileReport& report) {
  nlohmann::ordered_json j;
  j["clip_id"] = report.clip_id;
  j["target"] = DimensionName(report.target);
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (const RepresentationReport& r : report.representations) {
    nlohmann::ordered_json rep;
    rep["representation"] = r.representation;
    rep["missing"] = r.missing;
    if (r.missing) rep["notice"] = r.notice;
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const PercentileEntry& e : r.entries) {
      entries.push_back({{"feature", e.feature},
                         {"component", e.component},
                         {"coefficient", e.coefficient},
                         {"loading", e.loading},
                         {"value", e.value},
                         {"train_min", e.train_min},
                         {"train_max", e.train_max},
                         {"percentile", e.percentile},
                         {"raises_score", e.raises_score}});
    }
    rep["entries"] = entries;
    reps.push_back(rep);
  }
  j["representations"] = reps;
  return j.dump(2) + "\n";
}

}  // namespace impressions
