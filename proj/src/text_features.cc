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
#include <cmath>
#include <fstream>
#include <set>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

bool IsAsciiLetter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool IsVowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

bool IsTerminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Function words dropped from the bag-of-words vocabulary ("en-basic-v1").
// Changing this list requires a new kStopwordListId.
constexpr std::string_view kStopwords[] = {
    "a",         "about",   "above",    "after",   "again",    "against",
    "all",       "am",      "an",       "and",     "any",      "are",
    "aren't",    "as",      "at",       "be",      "because",  "been",
    "before",    "being",   "below",    "between", "both",     "but",
    "by",        "can",     "can't",    "could",   "couldn't", "did",
    "didn't",    "do",      "does",     "doesn't", "doing",    "don't",
    "down",      "during",  "each",     "few",     "for",      "from",
    "further",   "had",     "hadn't",   "has",     "hasn't",   "have",
    "haven't",   "having",  "he",       "he's",    "her",      "here",
    "hers",      "herself", "him",      "himself", "his",      "how",
    "i",         "i'd",     "i'll",     "i'm",     "i've",     "if",
    "in",        "into",    "is",       "isn't",   "it",       "it's",
    "its",       "itself",  "just",     "let's",   "me",       "more",
    "most",      "my",      "myself",   "no",      "nor",      "not",
    "now",       "of",      "off",      "on",      "once",     "only",
    "or",        "other",   "our",      "ours",    "ourselves", "out",
    "over",      "own",     "same",     "she",     "she's",    "should",
    "so",        "some",    "such",     "than",    "that",     "that's",
    "the",       "their",   "theirs",   "them",    "themselves", "then",
    "there",     "there's", "these",    "they",    "they're",  "this",
    "those",     "through", "to",       "too",     "under",    "until",
    "up",        "very",    "was",      "wasn't",  "we",       "we're",
    "were",      "weren't", "what",     "when",    "where",    "which",
    "while",     "who",     "whom",     "why",     "will",     "with",
    "won't",     "would",   "wouldn't", "you",     "you're",   "your",
    "yours",     "yourself", "yourselves",
};

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&]() {
    std::size_t begin = current.find_first_not_of('\'');
    if (begin != std::string::npos) {
      std::size_t end = current.find_last_not_of('\'');
      words.push_back(current.substr(begin, end - begin + 1));
    }
    current.clear();
  };
  for (char c : text) {
    if (IsAsciiLetter(c)) {
      current.push_back(static_cast<char>(c | 0x20));
    } else if (c == '\'') {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return words;
}

int CountSyllables(std::string_view word) {
  std::string letters;
  for (char c : word) {
    if (IsAsciiLetter(c)) letters.push_back(static_cast<char>(c | 0x20));
  }
  if (letters.empty()) return 0;
  int groups = 0;
  bool in_group = false;
  for (char c : letters) {
    const bool vowel = IsVowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  const std::size_t n = letters.size();
  if (n >= 2 && letters[n - 1] == 'e' && !IsVowel(letters[n - 2])) {
    const bool consonant_le =
        n >= 3 && letters[n - 2] == 'l' && !IsVowel(letters[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

TranscriptStats TokenizeAndCount(std::string_view text) {
  TranscriptStats stats;
  std::set<std::string> unique;
  bool segment_has_word = false;
  std::string current;
  auto flush_word = [&]() {
    std::size_t begin = current.find_first_not_of('\'');
    if (begin != std::string::npos) {
      std::size_t end = current.find_last_not_of('\'');
      std::string word = current.substr(begin, end - begin + 1);
      long letters = 0;
      for (char c : word) letters += IsAsciiLetter(c) ? 1 : 0;
      const int syllables = CountSyllables(word);
      ++stats.word_count;
      stats.letter_count += letters;
      stats.syllable_count += syllables;
      if (syllables >= 3) ++stats.complex_word_count;
      if (letters > 6) ++stats.long_word_count;
      unique.insert(std::move(word));
      segment_has_word = true;
    }
    current.clear();
  };
  for (char c : text) {
    if (IsAsciiLetter(c)) {
      current.push_back(static_cast<char>(c | 0x20));
      continue;
    }
    if (c == '\'') {
      current.push_back(c);
      continue;
    }
    flush_word();
    if (IsTerminal(c) && segment_has_word) {
      ++stats.sentence_count;
      segment_has_word = false;
    }
  }
  flush_word();
  if (segment_has_word) ++stats.sentence_count;
  stats.unique_word_count = static_cast<long>(unique.size());
  return stats;
}

const std::array<std::string_view, kNumReadabilityIndices>& ReadabilityNames() {
  static constexpr std::array<std::string_view, kNumReadabilityIndices> kNames =
      {"ari", "flesch_reading_ease", "flesch_kincaid_grade", "gunning_fog",
       "smog", "coleman_liau", "lix", "rix"};
  return kNames;
}

ReadabilityResult Readability(const TranscriptStats& stats) {
  ReadabilityResult result;
  if (stats.word_count <= 0 || stats.sentence_count <= 0) {
    result.missing = true;
    return result;
  }
  const double words = static_cast<double>(stats.word_count);
  const double sentences = static_cast<double>(stats.sentence_count);
  const double syllables = static_cast<double>(stats.syllable_count);
  const double letters = static_cast<double>(stats.letter_count);
  const double complex_words = static_cast<double>(stats.complex_word_count);
  const double long_words = static_cast<double>(stats.long_word_count);
  const double words_per_sentence = words / sentences;
  const double syllables_per_word = syllables / words;

  ReadabilityVector& r = result.values;
  r.ari = 4.71 * (letters / words) + 0.5 * words_per_sentence - 21.43;
  r.flesch_reading_ease =
      206.835 - 1.015 * words_per_sentence - 84.6 * syllables_per_word;
  r.flesch_kincaid_grade =
      0.39 * words_per_sentence + 11.8 * syllables_per_word - 15.59;
  r.gunning_fog = 0.4 * (words_per_sentence + 100.0 * (complex_words / words));
  r.smog = 1.0430 * std::sqrt(complex_words * (30.0 / sentences)) + 3.1291;
  const double letters_per_100 = 100.0 * (letters / words);
  const double sentences_per_100 = 100.0 * (sentences / words);
  r.coleman_liau = 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;
  r.lix = words_per_sentence + 100.0 * (long_words / words);
  r.rix = long_words / sentences;
  return result;
}

std::vector<std::string> TextFeatureColumnNames() {
  std::vector<std::string> names;
  for (auto n : ReadabilityNames()) names.emplace_back(n);
  names.emplace_back("word_count");
  names.emplace_back("unique_word_count");
  return names;
}

std::vector<double> TextFeatureRow(const TranscriptStats& stats,
                                   const ReadabilityResult& readability) {
  const auto indices = readability.values.AsArray();
  std::vector<double> row(indices.begin(), indices.end());
  row.push_back(static_cast<double>(stats.word_count));
  row.push_back(static_cast<double>(stats.unique_word_count));
  return row;
}

bool IsStopword(std::string_view token) {
  static const std::set<std::string_view> kSet(std::begin(kStopwords),
                                               std::end(kStopwords));
  return kSet.count(token) != 0;
}

std::map<std::string, std::size_t, std::less<>> BowVocabulary::Index() const {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < tokens.size(); ++i) index.emplace(tokens[i], i);
  return index;
}

BowVocabulary BuildVocabulary(const std::vector<std::string>& documents,
                              std::size_t max_size) {
  std::map<std::string, long> counts;
  for (const auto& doc : documents) {
    for (auto& token : Tokenize(doc)) {
      if (!IsStopword(token)) ++counts[token];
    }
  }
  std::vector<std::pair<std::string, long>> ranked(counts.begin(),
                                                   counts.end());
  // std::map iteration is lexicographic, so a stable sort on frequency
  // leaves ties in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  if (ranked.size() > max_size) ranked.resize(max_size);
  BowVocabulary vocab;
  for (auto& [token, count] : ranked) {
    vocab.tokens.push_back(token);
    vocab.frequencies.push_back(count);
  }
  return vocab;
}

std::vector<double> BowVectorize(std::string_view text,
                                 const BowVocabulary& vocab) {
  const auto index = vocab.Index();
  std::vector<double> counts(vocab.tokens.size(), 0.0);
  for (const auto& token : Tokenize(text)) {
    auto it = index.find(token);
    if (it != index.end()) counts[it->second] += 1.0;
  }
  return counts;
}

std::string FormatVocabulary(const BowVocabulary& vocab) {
  std::string out = "# stopwords=" + vocab.stopword_list_id + "\n";
  for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
    const long freq = i < vocab.frequencies.size() ? vocab.frequencies[i] : 0;
    out += vocab.tokens[i] + "\t" + std::to_string(freq) + "\n";
  }
  return out;
}

BowVocabulary LoadVocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  BowVocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# stopwords=", 0) == 0) {
      vocab.stopword_list_id = line.substr(12);
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      vocab.tokens.push_back(line);
      vocab.frequencies.push_back(0);
      continue;
    }
    auto freq = ParseDouble(line.substr(tab + 1));
    if (!freq) throw Error(ErrorCode::kMalformedRow, path.string() + ": " + line);
    vocab.tokens.push_back(line.substr(0, tab));
    vocab.frequencies.push_back(static_cast<long>(*freq));
  }
  return vocab;
}

}  // namespace impressions
