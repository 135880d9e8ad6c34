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

#include <cmath>
#include <queue>

#include <doctest.h>

#include "impressions/synth.h"
#include "impressions/table_io.h"
#include "test_util.h"

namespace impressions {
namespace {

using testing::CodeOf;

PairwiseJudgment J(const std::string& l, const std::string& r, Outcome o,
                   Dimension d = Dimension::kInterview) {
  return {l, r, d, o, std::nullopt};
}

std::vector<PairwiseJudgment> Repeat(const PairwiseJudgment& j, int times) {
  return std::vector<PairwiseJudgment>(static_cast<std::size_t>(times), j);
}

// Plain dense MM iteration with the phantom opponent at the mean strength.
std::vector<double> NaiveMm(const std::vector<std::vector<double>>& w, double prior,
                            double tol) {
  const std::size_t n = w.size();
  std::vector<double> p(n, 1.0 / n);
  for (int iter = 0; iter < 1000000; ++iter) {
    double mean = 0.0;
    for (double v : p) mean += v / n;
    std::vector<double> q(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double wins = prior;
      double denom = 2.0 * prior / (p[i] + mean);
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        wins += w[i][j];
        denom += (w[i][j] + w[j][i]) / (p[i] + p[j]);
      }
      q[i] = wins / denom;
      sum += q[i];
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      q[i] /= sum;
      change = std::max(change, std::abs(q[i] - p[i]) / p[i]);
    }
    p = q;
    if (change < tol) break;
  }
  return p;
}

TEST_CASE("symmetric record gives equal cardinal scores") {
  auto js = Repeat(J("a", "b", Outcome::kLeft), 5);
  auto more = Repeat(J("a", "b", Outcome::kRight), 5);
  js.insert(js.end(), more.begin(), more.end());
  const BtlScores s = FitBtl(js, {"a", "b"}, {});
  CHECK(s.cardinal.at("a") == s.cardinal.at("b"));
  CHECK(s.converged);
  CHECK(ReconstructionAccuracy(s, js) == 0.5);
}

TEST_CASE("dominance with a regularizing prior stays finite") {
  BtlConfig cfg;
  cfg.prior_count = 1.0;
  const BtlScores s = FitBtl(Repeat(J("a", "b", Outcome::kLeft), 10), {"a", "b"}, cfg);
  CHECK(s.cardinal.at("a") > s.cardinal.at("b"));
  CHECK(s.strengths.at("b") > 0.0);
  CHECK(std::isfinite(std::log(s.strengths.at("b"))));
}

TEST_CASE("three-item fit matches an independent fixed-point iteration") {
  std::vector<PairwiseJudgment> js;
  for (auto [l, r] : {std::pair{"a", "b"}, {"b", "c"}, {"a", "c"}}) {
    auto rep = Repeat(J(l, r, Outcome::kLeft), 4);
    js.insert(js.end(), rep.begin(), rep.end());
  }
  BtlConfig cfg;
  cfg.tol = 1e-13;
  const BtlScores s = FitBtl(js, {"a", "b", "c"}, cfg);
  const auto oracle = NaiveMm({{0, 4, 4}, {0, 0, 4}, {0, 0, 0}}, cfg.prior_count, 1e-13);
  CHECK(s.strengths.at("a") == doctest::Approx(oracle[0]).epsilon(1e-9));
  CHECK(s.strengths.at("b") == doctest::Approx(oracle[1]).epsilon(1e-9));
  CHECK(s.strengths.at("c") == doctest::Approx(oracle[2]).epsilon(1e-9));
  CHECK(s.cardinal.at("a") == 1.0);
  CHECK(s.cardinal.at("c") == 0.0);
  CHECK(ReconstructionAccuracy(s, js) == 1.0);
}

TEST_CASE("don't-know counts half a win each way") {
  const std::vector<PairwiseJudgment> js = {J("a", "b", Outcome::kLeft),
                                            J("a", "b", Outcome::kDontKnow)};
  BtlConfig cfg;
  cfg.tol = 1e-13;
  const BtlScores s = FitBtl(js, {"a", "b"}, cfg);
  const auto oracle = NaiveMm({{0, 1.5}, {0.5, 0}}, cfg.prior_count, 1e-13);
  CHECK(s.strengths.at("a") == doctest::Approx(oracle[0]).epsilon(1e-9));
}

TEST_CASE("fit errors") {
  CHECK(CodeOf([] { FitBtl({}, {"a"}, {}); }) == ErrorCode::kNoJudgments);
  CHECK(CodeOf([] { FitBtl({J("a", "b", Outcome::kDontKnow)}, {"a", "b"}, {}); }) ==
        ErrorCode::kNoJudgments);
  CHECK(CodeOf([] { FitBtl({J("a", "z", Outcome::kLeft)}, {"a", "b"}, {}); }) ==
        ErrorCode::kUnknownId);
  const BtlScores s = FitBtl({J("a", "b", Outcome::kLeft)}, {"a", "b"}, {});
  CHECK(CodeOf([&] { ReconstructionAccuracy(s, {J("a", "b", Outcome::kDontKnow)}); }) ==
        ErrorCode::kNoInformativeJudgments);
}

bool Connected(const std::set<std::string>& items,
               const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> seen = {*items.begin()};
  std::queue<std::string> q;
  q.push(*items.begin());
  while (!q.empty()) {
    for (const auto& n : adj[q.front()]) {
      if (seen.insert(n).second) q.push(n);
    }
    q.pop();
  }
  return seen.size() == items.size();
}

std::set<std::string> Items(int n) {
  std::set<std::string> s;
  for (int i = 0; i < n; ++i) s.insert("i" + std::to_string(100 + i));
  return s;
}

TEST_CASE("small-world sampling") {
  const auto ten = Items(10);
  const auto cycle = SampleSmallWorldPairs(ten, 2, 0.0, 1);
  CHECK(cycle.size() == 10);
  std::map<std::string, int> deg;
  for (const auto& [a, b] : cycle) {
    CHECK(a != b);
    ++deg[a];
    ++deg[b];
  }
  for (const auto& [id, d] : deg) CHECK(d == 2);
  CHECK(Connected(ten, cycle));

  const auto lattice = SampleSmallWorldPairs(ten, 4, 0.0, 1);
  CHECK(lattice.size() == 20);
  deg.clear();
  for (const auto& [a, b] : lattice) {
    ++deg[a];
    ++deg[b];
  }
  for (const auto& [id, d] : deg) CHECK(d == 4);
  CHECK(std::set(lattice.begin(), lattice.end()).size() == 20);

  const auto hundred = Items(100);
  const auto sw = SampleSmallWorldPairs(hundred, 6, 0.1, 7);
  CHECK(sw.size() == 300);
  CHECK(Connected(hundred, sw));
  CHECK(std::set(sw.begin(), sw.end()).size() == 300);
  CHECK(sw == SampleSmallWorldPairs(hundred, 6, 0.1, 7));
  CHECK(CodeOf([&] { SampleSmallWorldPairs(ten, 10, 0.0, 1); }) ==
        ErrorCode::kDegreeTooLarge);
}

TEST_CASE("consistency entropy") {
  std::map<PairKey, std::vector<Outcome>> pairs;
  pairs[{Dimension::kOpenness, "a", "b"}] = std::vector<Outcome>(12, Outcome::kLeft);
  auto e = ConsistencyEntropy(pairs);
  CHECK(e.at(Dimension::kOpenness) == 0.0);

  std::vector<Outcome> split(6, Outcome::kLeft);
  split.insert(split.end(), 6, Outcome::kRight);
  pairs[{Dimension::kOpenness, "a", "b"}] = split;
  e = ConsistencyEntropy(pairs);
  CHECK(e.at(Dimension::kOpenness) == 1.0);

  CHECK(BinaryEntropy(3, 1) ==
        doctest::Approx(-(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25))).epsilon(1e-15));
  CHECK(CodeOf([] { ConsistencyEntropy({}); }) == ErrorCode::kNoUsablePairs);
}

TEST_CASE("grouping re-orients outcomes to the sorted pair") {
  const auto groups = GroupByPair({J("b", "a", Outcome::kLeft), J("a", "b", Outcome::kLeft),
                                   J("b", "a", Outcome::kDontKnow)});
  REQUIRE(groups.size() == 1);
  const auto& [key, outcomes] = *groups.begin();
  CHECK(key.first == "a");
  CHECK(outcomes == std::vector<Outcome>{Outcome::kRight, Outcome::kLeft, Outcome::kDontKnow});
}

TEST_CASE("judgment file round trip") {
  const auto dir = testing::TempDir("btl_io");
  std::vector<PairwiseJudgment> js = {J("a", "b", Outcome::kLeft, Dimension::kOpenness),
                                      J("b", "c", Outcome::kDontKnow)};
  js[0].annotator_id = "w1";
  WriteStringToFile(dir / "j.csv", FormatJudgments(js));
  const auto back = LoadJudgments(dir / "j.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].annotator_id == std::optional<std::string>("w1"));
  CHECK(back[1].outcome == Outcome::kDontKnow);
  CHECK(back[0].dimension == Dimension::kOpenness);
}

TEST_CASE("synthetic 50-item refit reconstructs at least 0.65") {
  const BtlSynth syn = SynthesizeBtl(50, 10, 4, 0.1, 11);
  const std::set<std::string> items(syn.items.begin(), syn.items.end());
  const BtlScores s = FitBtl(syn.judgments, items, {});
  CHECK(ReconstructionAccuracy(s, syn.judgments) >= 0.65);
}

}  // namespace
}  // namespace impressions
