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

#include "impressions/text_features.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include <doctest.h>

#include "impressions/rng.h"
#include "impressions/synth.h"
#include "impressions/table_io.h"
#include "test_util.h"

namespace impressions {
namespace {

TEST_CASE("counting") {
  CHECK(TokenizeAndCount("") == TranscriptStats{});
  const auto s = TokenizeAndCount("The cat sat. The cat ran.");
  CHECK(s.word_count == 6);
  CHECK(s.sentence_count == 2);
  CHECK(s.unique_word_count == 4);
  CHECK(TokenizeAndCount("Wait... what?! Really").sentence_count == 3);
  CHECK(Tokenize("'Don't' STOP, it's") ==
        std::vector<std::string>{"don't", "stop", "it's"});
}

TEST_CASE("syllable heuristic against a hand list") {
  const std::map<std::string, int> hand = {
      {"beautiful", 3}, {"cat", 1},      {"table", 2},     {"make", 1},
      {"happy", 2},     {"reading", 2},  {"the", 1},       {"interview", 3},
      {"personality", 5}, {"candidate", 3}, {"education", 4}, {"little", 2},
      {"strength", 1},  {"apple", 2}};
  for (const auto& [word, n] : hand) {
    INFO(word);
    CHECK(CountSyllables(word) == n);
  }
}

TEST_CASE("one-letter transcript matches hand-computed indices") {
  const auto r = Readability(TokenizeAndCount("a."));
  CHECK_FALSE(r.missing);
  const auto v = r.values;
  CHECK(v.ari == doctest::Approx(-16.22).epsilon(1e-12));
  CHECK(v.flesch_reading_ease == doctest::Approx(121.22).epsilon(1e-12));
  CHECK(v.flesch_kincaid_grade == doctest::Approx(-3.4).epsilon(1e-12));
  CHECK(v.gunning_fog == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(v.smog == doctest::Approx(3.1291).epsilon(1e-12));
  CHECK(v.coleman_liau == doctest::Approx(-39.52).epsilon(1e-12));
  CHECK(v.lix == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v.rix == 0.0);
}

TEST_CASE("indices are invariant under duplication") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const std::string text = SynthesizeTranscript(rng, 1 + static_cast<int>(rng.UniformInt(8)));
    const auto a = Readability(TokenizeAndCount(text)).values.AsArray();
    const auto b = Readability(TokenizeAndCount(text + " " + text)).values.AsArray();
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(std::abs(a[k] - b[k]) <= 1e-12 * std::max(1.0, std::abs(a[k])));
    }
  }
}

TEST_CASE("degenerate transcripts are flagged with zeros") {
  for (const char* text : {"", "...", "  !? 123 "}) {
    const auto stats = TokenizeAndCount(text);
    const auto r = Readability(stats);
    CHECK(r.missing);
    for (double v : TextFeatureRow(stats, r)) CHECK(v == 0.0);
  }
  CHECK(TextFeatureColumnNames().size() == 10);
}

// Independent counter: regex tokens, std::sort on (-count, token).
std::vector<std::pair<std::string, long>> BruteForceVocab(
    const std::vector<std::string>& docs) {
  std::map<std::string, long> counts;
  const std::regex word("[A-Za-z']+");
  for (const auto& d : docs) {
    for (auto it = std::sregex_iterator(d.begin(), d.end(), word); it != std::sregex_iterator();
         ++it) {
      std::string w = it->str();
      while (!w.empty() && w.front() == '\'') w.erase(w.begin());
      while (!w.empty() && w.back() == '\'') w.pop_back();
      if (w.empty()) continue;
      std::transform(w.begin(), w.end(), w.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (!IsStopword(w)) ++counts[w];
    }
  }
  std::vector<std::pair<std::string, long>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return v;
}

TEST_CASE("vocabulary matches a brute-force frequency sort") {
  const std::vector<std::string> docs = {
      "The dog chased the cat. The cat ran!", "A dog, a cat and a bird.",
      "Birds sing; dogs bark; cats purr.", "I'm sure the bird's song is lovely",
      "Zebra zebra apple apple dog"};
  const auto vocab = BuildVocabulary(docs);
  const auto oracle = BruteForceVocab(docs);
  REQUIRE(vocab.tokens.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    CHECK(vocab.tokens[i] == oracle[i].first);
    CHECK(vocab.frequencies[i] == oracle[i].second);
  }
  CHECK(BuildVocabulary(docs, 2).tokens.size() == 2);
}

TEST_CASE("bag of words vectors and vocabulary io") {
  BowVocabulary v;
  v.tokens = {"cat", "dog"};
  v.frequencies = {3, 1};
  CHECK(BowVectorize("cat cat dog", v) == std::vector<double>{2, 1});
  CHECK(BowVectorize("zebra", v) == std::vector<double>{0, 0});
  const auto dir = testing::TempDir("vocab");
  WriteStringToFile(dir / "v.tsv", FormatVocabulary(v));
  const auto back = LoadVocabulary(dir / "v.tsv");
  CHECK(back.tokens == v.tokens);
  CHECK(back.frequencies == v.frequencies);
  CHECK(back.stopword_list_id == kStopwordListId);
}

}  // namespace
}  // namespace impressions
