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

// Transcript statistics, readability indices and bag-of-words counts.

#ifndef IMPRESSIONS_TEXT_FEATURES_H_
#define IMPRESSIONS_TEXT_FEATURES_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace impressions {

struct TranscriptStats {
  long word_count = 0;
  long unique_word_count = 0;
  long sentence_count = 0;
  long syllable_count = 0;
  long complex_word_count = 0;  // three or more syllables
  long long_word_count = 0;     // more than six letters
  long letter_count = 0;

  friend bool operator==(const TranscriptStats&,
                         const TranscriptStats&) = default;
};

// Words are maximal runs of ASCII letters and apostrophes that contain a
// letter, lowercased, with leading/trailing apostrophes stripped. A sentence
// is a stretch of text ending at a run of '.', '!' or '?' (or at the end of
// the text) that contains at least one word. Bytes outside ASCII act as
// separators.
std::vector<std::string> Tokenize(std::string_view text);
TranscriptStats TokenizeAndCount(std::string_view text);

// Vowel groups (a, e, i, o, u, y), minus a trailing silent 'e' that is not
// part of a consonant + "le" ending, never below one.
int CountSyllables(std::string_view word);

inline constexpr int kNumReadabilityIndices = 8;

struct ReadabilityVector {
  double ari = 0.0;
  double flesch_reading_ease = 0.0;
  double flesch_kincaid_grade = 0.0;
  double gunning_fog = 0.0;
  double smog = 0.0;
  double coleman_liau = 0.0;
  double lix = 0.0;
  double rix = 0.0;

  std::array<double, kNumReadabilityIndices> AsArray() const {
    return {ari, flesch_reading_ease, flesch_kincaid_grade, gunning_fog,
            smog, coleman_liau, lix, rix};
  }
};

const std::array<std::string_view, kNumReadabilityIndices>&
ReadabilityNames();

struct ReadabilityResult {
  ReadabilityVector values;
  // No words or no sentences: values are all zero.
  bool missing = false;
};

ReadabilityResult Readability(const TranscriptStats& stats);

// Ten-column text representation: the eight readability indices followed by
// word_count and unique_word_count.
std::vector<std::string> TextFeatureColumnNames();
std::vector<double> TextFeatureRow(const TranscriptStats& stats,
                                   const ReadabilityResult& readability);

inline constexpr std::string_view kStopwordListId = "en-basic-v1";
bool IsStopword(std::string_view token);

struct BowVocabulary {
  // Most frequent first; ties in lexicographic order.
  std::vector<std::string> tokens;
  std::vector<long> frequencies;
  std::string stopword_list_id = std::string(kStopwordListId);

  std::map<std::string, std::size_t, std::less<>> Index() const;
};

inline constexpr std::size_t kDefaultVocabularySize = 5000;

// Counts non-stopword tokens over the training documents.
BowVocabulary BuildVocabulary(const std::vector<std::string>& documents,
                              std::size_t max_size = kDefaultVocabularySize);

// Dense count vector of length |vocab|; out-of-vocabulary tokens ignored.
std::vector<double> BowVectorize(std::string_view text,
                                 const BowVocabulary& vocab);

// token<TAB>frequency per line.
std::string FormatVocabulary(const BowVocabulary& vocab);
BowVocabulary LoadVocabulary(const std::filesystem::path& path);

}  // namespace impressions

#endif  // IMPRESSIONS_TEXT_FEATURES_H_
