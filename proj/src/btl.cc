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

#include "impressions/btl.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "impressions/error.h"
#include "impressions/rng.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

constexpr double kMinStrength = 1e-300;
constexpr int kMaxRewireAttempts = 100;

struct Edge {
  std::size_t other;
  double comparisons;
};

bool IsConnected(const std::vector<std::set<std::size_t>>& adjacency) {
  if (adjacency.empty()) return true;
  std::vector<bool> seen(adjacency.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t visited = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++visited;
        frontier.push(v);
      }
    }
  }
  return visited == adjacency.size();
}

// One Watts-Strogatz draw, following the usual lattice-then-rewire order:
// for each ring offset, for each node, maybe move the edge's far end.
std::vector<std::set<std::size_t>> WattsStrogatz(std::size_t n, int degree,
                                                 double rewire_prob, Rng& rng) {
  std::vector<std::set<std::size_t>> adj(n);
  const std::size_t half = static_cast<std::size_t>(degree / 2);
  for (std::size_t j = 1; j <= half; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t v = (u + j) % n;
      adj[u].insert(v);
      adj[v].insert(u);
    }
  }
  if (rewire_prob <= 0.0) return adj;
  for (std::size_t j = 1; j <= half; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t v = (u + j) % n;
      if (!rng.Bernoulli(rewire_prob)) continue;
      if (adj[u].size() >= n - 1) continue;
      if (adj[u].count(v) == 0) continue;  // already rewired away
      std::size_t w = static_cast<std::size_t>(rng.UniformInt(n));
      while (w == u || adj[u].count(w) != 0) {
        w = static_cast<std::size_t>(rng.UniformInt(n));
      }
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  }
  return adj;
}

}  // namespace

std::string_view OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kLeft: return "left";
    case Outcome::kRight: return "right";
    case Outcome::kDontKnow: return "dont_know";
  }
  return "?";
}

std::optional<Outcome> ParseOutcome(std::string_view text) {
  const std::string v = ToLower(Trim(text));
  if (v == "left" || v == "l") return Outcome::kLeft;
  if (v == "right" || v == "r") return Outcome::kRight;
  if (v == "dont_know" || v == "don't know" || v == "dontknow" ||
      v == "unknown" || v == "tie") {
    return Outcome::kDontKnow;
  }
  return std::nullopt;
}

BtlScores FitBtl(const std::vector<PairwiseJudgment>& judgments,
                 const std::set<std::string>& items, const BtlConfig& config) {
  if (config.prior_count < 0.0 || config.max_iter < 1 || !(config.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad BTL config");
  }
  bool informative = false;
  for (const auto& j : judgments) {
    if (j.outcome != Outcome::kDontKnow) informative = true;
  }
  if (!informative) {
    throw Error(ErrorCode::kNoJudgments, "no left/right judgments to fit");
  }
  const Dimension dimension = judgments.front().dimension;

  std::map<std::string, std::size_t> index;
  std::vector<std::string> names(items.begin(), items.end());
  for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
  const std::size_t n = names.size();

  // Effective wins per ordered pair, accumulated sparsely.
  std::map<std::pair<std::size_t, std::size_t>, double> pair_wins;
  std::vector<double> wins(n, config.prior_count);
  for (const auto& j : judgments) {
    if (j.dimension != dimension) {
      throw Error(ErrorCode::kInvalidArgument,
                  "FitBtl expects judgments of a single dimension");
    }
    auto l = index.find(j.left_id);
    auto r = index.find(j.right_id);
    if (l == index.end() || r == index.end()) {
      throw Error(ErrorCode::kUnknownId,
                  "judgment references " +
                      (l == index.end() ? j.left_id : j.right_id));
    }
    if (l->second == r->second) {
      throw Error(ErrorCode::kInvalidArgument, "self comparison " + j.left_id);
    }
    const std::size_t a = l->second;
    const std::size_t b = r->second;
    switch (j.outcome) {
      case Outcome::kLeft:
        pair_wins[{a, b}] += 1.0;
        wins[a] += 1.0;
        break;
      case Outcome::kRight:
        pair_wins[{b, a}] += 1.0;
        wins[b] += 1.0;
        break;
      case Outcome::kDontKnow:
        pair_wins[{a, b}] += 0.5;
        pair_wins[{b, a}] += 0.5;
        wins[a] += 0.5;
        wins[b] += 0.5;
        break;
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, double> comparisons;
  for (const auto& [key, w] : pair_wins) {
    const auto canonical = std::minmax(key.first, key.second);
    comparisons[{canonical.first, canonical.second}] += w;
  }
  std::vector<std::vector<Edge>> edges(n);
  for (const auto& [key, count] : comparisons) {
    edges[key.first].push_back({key.second, count});
    edges[key.second].push_back({key.first, count});
  }

  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  const double phantom = 1.0 / static_cast<double>(n);
  BtlScores scores;
  scores.dimension = dimension;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double denom = 2.0 * config.prior_count / (pi[i] + phantom);
      for (const Edge& e : edges[i]) denom += e.comparisons / (pi[i] + pi[e.other]);
      next[i] = denom > 0.0 ? std::max(wins[i] / denom, kMinStrength) : pi[i];
      total += next[i];
    }
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      max_change = std::max(max_change, std::abs(next[i] - pi[i]) / pi[i]);
    }
    pi.swap(next);
    scores.iterations = iter;
    if (max_change < config.tol) {
      scores.converged = true;
      break;
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    logs[i] = std::log(pi[i]);
    lo = std::min(lo, logs[i]);
    hi = std::max(hi, logs[i]);
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    scores.strengths[names[i]] = pi[i];
    scores.cardinal[names[i]] = range > 1e-12 ? (logs[i] - lo) / range : 0.5;
  }
  return scores;
}

std::map<Dimension, BtlScores> FitBtlPerDimension(
    const std::vector<PairwiseJudgment>& judgments,
    const std::set<std::string>& items, const BtlConfig& config) {
  std::map<Dimension, std::vector<PairwiseJudgment>> by_dimension;
  for (const auto& j : judgments) by_dimension[j.dimension].push_back(j);
  if (by_dimension.empty()) {
    throw Error(ErrorCode::kNoJudgments, "judgment list is empty");
  }
  std::map<Dimension, BtlScores> out;
  for (const auto& [dimension, subset] : by_dimension) {
    out.emplace(dimension, FitBtl(subset, items, config));
  }
  return out;
}

double ReconstructionAccuracy(const BtlScores& scores,
                              const std::vector<PairwiseJudgment>& judgments) {
  double correct = 0.0;
  std::size_t total = 0;
  for (const auto& j : judgments) {
    if (j.dimension != scores.dimension || j.outcome == Outcome::kDontKnow) {
      continue;
    }
    auto l = scores.cardinal.find(j.left_id);
    auto r = scores.cardinal.find(j.right_id);
    if (l == scores.cardinal.end() || r == scores.cardinal.end()) {
      throw Error(ErrorCode::kUnknownId, "no score for judged clip");
    }
    const double winner = j.outcome == Outcome::kLeft ? l->second : r->second;
    const double loser = j.outcome == Outcome::kLeft ? r->second : l->second;
    if (winner > loser) {
      correct += 1.0;
    } else if (winner == loser) {
      correct += 0.5;
    }
    ++total;
  }
  if (total == 0) {
    throw Error(ErrorCode::kNoInformativeJudgments,
                std::string(DimensionName(scores.dimension)));
  }
  return correct / static_cast<double>(total);
}

std::vector<std::pair<std::string, std::string>> SampleSmallWorldPairs(
    const std::set<std::string>& items, int degree, double rewire_prob,
    std::uint64_t seed) {
  const std::size_t n = items.size();
  if (degree < 2 || degree % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "degree must be even and >= 2");
  }
  if (static_cast<std::size_t>(degree) >= n) {
    throw Error(ErrorCode::kDegreeTooLarge,
                "degree " + std::to_string(degree) + " needs more than " +
                    std::to_string(n) + " items");
  }
  if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rewire_prob outside [0,1]");
  }
  Rng rng(seed);
  std::vector<std::set<std::size_t>> adj;
  bool connected = false;
  for (int attempt = 0; attempt < kMaxRewireAttempts && !connected; ++attempt) {
    adj = WattsStrogatz(n, degree, rewire_prob, rng);
    connected = IsConnected(adj);
  }
  if (!connected) {
    throw Error(ErrorCode::kGraphDisconnected,
                "no connected rewiring found in " +
                    std::to_string(kMaxRewireAttempts) + " attempts");
  }
  const std::vector<std::string> names(items.begin(), items.end());
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v : adj[u]) {
      if (u < v) pairs.emplace_back(names[u], names[v]);
    }
  }
  return pairs;
}

std::map<PairKey, std::vector<Outcome>> GroupByPair(
    const std::vector<PairwiseJudgment>& judgments) {
  std::map<PairKey, std::vector<Outcome>> out;
  for (const auto& j : judgments) {
    const bool swapped = j.right_id < j.left_id;
    PairKey key{j.dimension, swapped ? j.right_id : j.left_id,
                swapped ? j.left_id : j.right_id};
    Outcome o = j.outcome;
    if (swapped && o != Outcome::kDontKnow) {
      o = o == Outcome::kLeft ? Outcome::kRight : Outcome::kLeft;
    }
    out[key].push_back(o);
  }
  return out;
}

double BinaryEntropy(double a, double b) {
  const double total = a + b;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double count : {a, b}) {
    if (count > 0.0) {
      const double p = count / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

std::map<Dimension, double> ConsistencyEntropy(
    const std::map<PairKey, std::vector<Outcome>>& judgments_by_pair) {
  std::map<Dimension, std::pair<double, std::size_t>> accum;
  for (const auto& [key, outcomes] : judgments_by_pair) {
    std::size_t left = 0;
    std::size_t right = 0;
    for (Outcome o : outcomes) {
      if (o == Outcome::kLeft) ++left;
      if (o == Outcome::kRight) ++right;
    }
    if (left + right < 2) continue;
    auto& [sum, count] = accum[key.dimension];
    sum += BinaryEntropy(static_cast<double>(left), static_cast<double>(right));
    ++count;
  }
  if (accum.empty()) {
    throw Error(ErrorCode::kNoUsablePairs,
                "no pair has two or more informative votes");
  }
  std::map<Dimension, double> out;
  for (const auto& [dimension, acc] : accum) {
    out[dimension] = acc.first / static_cast<double>(acc.second);
  }
  return out;
}

std::vector<PairwiseJudgment> LoadJudgments(const std::filesystem::path& path) {
  const Table table = ReadTable(path);
  auto left = table.Column("left_id");
  auto right = table.Column("right_id");
  auto dim = table.Column("dimension");
  auto outcome = table.Column("outcome");
  auto annotator = table.Column("annotator_id");
  if (!left || !right || !dim || !outcome) {
    throw Error(ErrorCode::kMalformedRow,
                path.string() +
                    ": expected header left_id,right_id,dimension,outcome"
                    "[,annotator_id]");
  }
  std::vector<PairwiseJudgment> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where =
        path.string() + ":" + std::to_string(table.line_numbers[r]);
    PairwiseJudgment j;
    j.left_id = row[*left];
    j.right_id = row[*right];
    if (j.left_id.empty() || j.right_id.empty() || j.left_id == j.right_id) {
      throw Error(ErrorCode::kMalformedRow, where + ": bad clip pair");
    }
    auto d = ParseDimension(row[*dim]);
    auto o = ParseOutcome(row[*outcome]);
    if (!d || !o) {
      throw Error(ErrorCode::kMalformedRow, where + ": bad dimension/outcome");
    }
    j.dimension = *d;
    j.outcome = *o;
    if (annotator && !row[*annotator].empty()) j.annotator_id = row[*annotator];
    out.push_back(std::move(j));
  }
  return out;
}

std::string FormatJudgments(const std::vector<PairwiseJudgment>& judgments) {
  std::string out = "left_id,right_id,dimension,outcome,annotator_id\n";
  for (const auto& j : judgments) {
    out += JoinRow({j.left_id, j.right_id, std::string(DimensionName(j.dimension)),
                    std::string(OutcomeName(j.outcome)),
                    j.annotator_id.value_or("")});
    out += '\n';
  }
  return out;
}

}  // namespace impressions
