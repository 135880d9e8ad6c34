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

#include "impressions/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "impressions/error.h"
#include "impressions/motion_energy.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

constexpr std::string_view kWords[] = {
    "work",    "team",     "project", "people",   "really",  "think",
    "video",   "channel",  "today",   "going",    "friends", "music",
    "learn",   "enjoy",    "travel",  "family",   "school",  "business",
    "manage",  "customer", "creative", "problem", "solution", "energy",
    "community", "organize", "develop", "challenge", "experience", "because",
    "always",  "together", "important", "interesting", "wonderful", "simple",
    "morning", "evening",  "weekend", "question", "answer",  "thank",
};

std::string IdWithIndex(std::string_view prefix, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, i);
  return std::string(prefix) + buf;
}

int Digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return std::max(d, 4);
}

Gender RandomGender(Rng& rng) {
  return rng.Bernoulli(0.5) ? Gender::kFemale : Gender::kMale;
}

Ethnicity RandomEthnicity(Rng& rng) {
  const double u = rng.Uniform();
  if (u < 0.15) return Ethnicity::kAsian;
  if (u < 0.80) return Ethnicity::kCaucasian;
  if (u < 0.95) return Ethnicity::kAfroAmerican;
  return Ethnicity::kOther;
}

AgeGroup RandomAge(Rng& rng) {
  // Mostly working age, with a thin tail on both sides.
  static constexpr double kWeights[kNumAgeGroups] = {0.005, 0.01, 0.06, 0.30,
                                                     0.34,  0.18, 0.08, 0.025};
  double u = rng.Uniform();
  for (int i = 0; i < kNumAgeGroups; ++i) {
    if (u < kWeights[i]) return static_cast<AgeGroup>(i);
    u -= kWeights[i];
  }
  return AgeGroup::k61Plus;
}

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

BtlSynth SynthesizeBtl(int n_items, int degree, int per_pair, double rewire_prob,
                       std::uint64_t seed, Dimension dimension, double decades) {
  BtlSynth out;
  Rng rng(DeriveSeed(seed, 0));
  const int width = Digits(n_items);
  std::set<std::string> items;
  for (int i = 0; i < n_items; ++i) {
    const std::string id = IdWithIndex("item_", i, width);
    out.items.push_back(id);
    items.insert(id);
    out.true_strengths[id] = std::pow(10.0, decades * rng.Uniform());
  }
  const auto pairs =
      SampleSmallWorldPairs(items, degree, rewire_prob, DeriveSeed(seed, 1));
  Rng outcome_rng(DeriveSeed(seed, 2));
  for (const auto& [a, b] : pairs) {
    const double pa = out.true_strengths[a];
    const double pb = out.true_strengths[b];
    for (int r = 0; r < per_pair; ++r) {
      PairwiseJudgment j;
      // Alternate screen sides so position carries no information.
      j.left_id = r % 2 == 0 ? a : b;
      j.right_id = r % 2 == 0 ? b : a;
      j.dimension = dimension;
      const double p_left =
          (j.left_id == a ? pa : pb) / (pa + pb);
      j.outcome = outcome_rng.Bernoulli(p_left) ? Outcome::kLeft : Outcome::kRight;
      j.annotator_id = IdWithIndex("ann_", static_cast<int>(outcome_rng.UniformInt(20)), 2);
      out.judgments.push_back(std::move(j));
    }
  }
  return out;
}

FusionSynth SynthesizeFusionData(const FusionSynthOptions& o, std::uint64_t seed) {
  if (o.n_clips < 4) throw Error(ErrorCode::kInvalidArgument, "need at least 4 clips");
  Rng weights_rng(DeriveSeed(seed, 10));
  auto projection = [&](int dims) {
    Eigen::MatrixXd w(dims, static_cast<Eigen::Index>(kNumDimensions));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = weights_rng.Normal();
    }
    return w;
  };
  const Eigen::MatrixXd face_w = projection(o.face_dims);
  const Eigen::MatrixXd audio_w = projection(o.audio_dims);

  std::vector<std::string> face_cols, audio_cols;
  for (int i = 0; i < o.face_dims; ++i) face_cols.push_back("f" + std::to_string(i));
  for (int i = 0; i < o.audio_dims; ++i) audio_cols.push_back("a" + std::to_string(i));
  FeatureMatrix face("face", face_cols), audio("audio", audio_cols);

  FusionSynth out;
  Rng rng(DeriveSeed(seed, 11));
  const int width = Digits(o.n_clips);
  const int n_validation =
      std::max(1, static_cast<int>(std::lround(o.validation_fraction * o.n_clips)));
  for (int i = 0; i < o.n_clips; ++i) {
    Eigen::RowVectorXd fx(o.face_dims), ax(o.audio_dims);
    for (int k = 0; k < o.face_dims; ++k) fx(k) = rng.Normal();
    for (int k = 0; k < o.audio_dims; ++k) ax(k) = rng.Normal();
    const Eigen::RowVectorXd fs =
        (fx * face_w / std::sqrt(static_cast<double>(o.face_dims))).array().tanh();
    const Eigen::RowVectorXd as =
        (ax * audio_w / std::sqrt(static_cast<double>(o.audio_dims))).array().tanh();
    ClipRecord r;
    r.clip_id = IdWithIndex("clip_", i, width);
    r.source_video_id = IdWithIndex("video_", i, width);
    r.gender = RandomGender(rng);
    r.ethnicity = RandomEthnicity(rng);
    r.age_group = RandomAge(rng);
    TraitVector t;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      const auto c = static_cast<Eigen::Index>(d);
      const double signal = o.face_weight * fs(c) + (1.0 - o.face_weight) * as(c);
      t[d] = Clamp01(0.5 + 0.3 * signal + o.noise_sd * rng.Normal());
    }
    r.labels = t;
    face.AddRow(r.clip_id, std::vector<double>(fx.data(), fx.data() + fx.size()));
    audio.AddRow(r.clip_id, std::vector<double>(ax.data(), ax.data() + ax.size()));
    (i < o.n_clips - n_validation ? out.split.train_ids : out.split.validation_ids)
        .insert(r.clip_id);
    out.records.push_back(std::move(r));
  }
  out.features.emplace("face", std::move(face));
  out.features.emplace("audio", std::move(audio));
  return out;
}

std::vector<ClipRecord> SynthesizeBiasData(const BiasSynthOptions& o,
                                           std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, 20));
  const double r = o.female_extroversion_r;
  if (!(std::abs(r) < 1.0)) throw Error(ErrorCode::kInvalidArgument, "|r| must be < 1");
  // With a balanced 0/1 indicator, E = mu + beta * x + N(0, s^2) has
  // correlation beta / sqrt(beta^2 + 4 s^2) with x.
  const double beta = 2.0 * r * o.noise_sd / std::sqrt(1.0 - r * r);

  std::vector<int> female(static_cast<std::size_t>(o.n), 0);
  for (int i = 0; i < o.n / 2; ++i) female[static_cast<std::size_t>(i)] = 1;
  for (int i = o.n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(i + 1)));
    std::swap(female[static_cast<std::size_t>(i)], female[static_cast<std::size_t>(j)]);
  }

  const int width = Digits(o.n);
  std::vector<ClipRecord> records;
  int video = 0, user = 0, clips_left_in_video = 0, videos_left_for_user = 0;
  for (int i = 0; i < o.n; ++i) {
    if (clips_left_in_video == 0) {
      if (videos_left_for_user == 0) {
        ++user;
        videos_left_for_user = 1 + static_cast<int>(rng.UniformInt(2));
      }
      ++video;
      --videos_left_for_user;
      clips_left_in_video = 1 + static_cast<int>(rng.UniformInt(3));
    }
    --clips_left_in_video;
    ClipRecord rec;
    rec.clip_id = IdWithIndex("clip_", i, width);
    rec.source_video_id = IdWithIndex("video_", video, width);
    rec.user_id = IdWithIndex("user_", user, width);
    rec.gender = female[static_cast<std::size_t>(i)] ? Gender::kFemale : Gender::kMale;
    rec.ethnicity = RandomEthnicity(rng);
    rec.age_group = RandomAge(rng);
    TraitVector t;
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
      t[d] = 0.5 + o.noise_sd * rng.Normal();
    }
    t[Dimension::kExtroversion] += beta * (female[static_cast<std::size_t>(i)] - 0.5);
    for (std::size_t d = 0; d < kNumDimensions; ++d) t[d] = Clamp01(t[d]);
    rec.labels = t;
    records.push_back(std::move(rec));
  }
  return records;
}

std::string SynthesizeTranscript(Rng& rng, int sentences) {
  constexpr std::size_t kNumWords = std::size(kWords);
  static constexpr char kEnds[] = {'.', '.', '.', '!', '?'};
  std::string text;
  for (int s = 0; s < sentences; ++s) {
    const int words = 3 + static_cast<int>(rng.UniformInt(10));
    for (int w = 0; w < words; ++w) {
      std::string word(kWords[rng.UniformInt(kNumWords)]);
      if (w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
      text += word;
      if (w + 1 < words) text += ' ';
    }
    text += kEnds[rng.UniformInt(std::size(kEnds))];
    if (s + 1 < sentences) text += ' ';
  }
  return text + "\n";
}

void WriteSyntheticWorkspace(const std::filesystem::path& dir, std::uint64_t seed,
                             int n_clips) {
  namespace fs = std::filesystem;
  FusionSynthOptions options;
  options.n_clips = n_clips;
  FusionSynth data = SynthesizeFusionData(options, seed);

  Rng rng(DeriveSeed(seed, 30));
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    ClipRecord& r = data.records[i];
    // Pairs of consecutive clips share a video; groups of four share a user.
    r.source_video_id = IdWithIndex("video_", static_cast<int>(i / 2), 4);
    r.user_id = IdWithIndex("user_", static_cast<int>(i / 4), 4);
    if (i + 1 == data.records.size()) continue;
    r.transcript_path = "transcripts/" + r.clip_id + ".txt";
    WriteStringToFile(dir / *r.transcript_path,
                      SynthesizeTranscript(rng, 2 + static_cast<int>(rng.UniformInt(5))));
  }
  SaveManifest(data.records, dir / "manifest.csv");
  // Every second held-out clip becomes a test clip.
  DatasetSplit split = data.split;
  bool to_test = false;
  for (const auto& id : data.split.validation_ids) {
    if (to_test) {
      split.validation_ids.erase(id);
      split.test_ids.insert(id);
    }
    to_test = !to_test;
  }
  WriteStringToFile(dir / "split.csv", FormatSplit(split));
  for (const auto& [name, matrix] : data.features) {
    SaveFeatureMatrix(matrix, dir / "features" / (name + ".csv"));
  }

  // Pairwise judgments over the first 20 clips, oriented by their labels.
  std::set<std::string> items;
  std::map<std::string, double> strength;
  for (std::size_t i = 0; i < std::min<std::size_t>(20, data.records.size()); ++i) {
    items.insert(data.records[i].clip_id);
    strength[data.records[i].clip_id] =
        std::exp(4.0 * (*data.records[i].labels)[Dimension::kInterview]);
  }
  std::vector<PairwiseJudgment> judgments;
  if (items.size() >= 5) {
    for (const auto& [a, b] : SampleSmallWorldPairs(items, 4, 0.1, DeriveSeed(seed, 31))) {
      for (int k = 0; k < 3; ++k) {
        PairwiseJudgment j{a, b, Dimension::kInterview, Outcome::kDontKnow,
                           "ann_" + std::to_string(k)};
        const double u = rng.Uniform();
        if (u >= 0.05) {
          j.outcome = rng.Uniform() < strength[a] / (strength[a] + strength[b])
                          ? Outcome::kLeft
                          : Outcome::kRight;
        }
        judgments.push_back(std::move(j));
      }
    }
  }
  WriteStringToFile(dir / "judgments.csv", FormatJudgments(judgments));

  // Per-frame features for the first three clips.
  std::string frames = "clip_id,frame_index,au1,au2\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, data.records.size()); ++i) {
    for (int f = 0; f < 12; ++f) {
      frames += data.records[i].clip_id + "," + std::to_string(f) + "," +
                FormatDouble(std::round(1000.0 * std::sin(0.3 * f + i)) / 1000.0) +
                "," + FormatDouble(0.01 * f * f) + "\n";
    }
  }
  WriteStringToFile(dir / "frame_features.csv", frames);

  // Tiny frame directories with a moving bright square for two clips.
  for (std::size_t i = 0; i < std::min<std::size_t>(2, data.records.size()); ++i) {
    const fs::path clip_dir = dir / "frames" / data.records[i].clip_id;
    for (int f = 0; f < 5; ++f) {
      GrayImage img{16, 16, std::vector<double>(256, 0.2)};
      for (int y = 4; y < 8; ++y) {
        for (int x = 2 + f * (1 + static_cast<int>(i)); x < 6 + f * (1 + static_cast<int>(i)) && x < 16; ++x) {
          img.pixels[static_cast<std::size_t>(y * 16 + x)] = 0.9;
        }
      }
      fs::create_directories(clip_dir);
      SaveGrayImagePgm(img, clip_dir / IdWithIndex("frame_", f, 4).append(".pgm"));
    }
  }

  nlohmann::ordered_json config;
  config["version"] = 1;
  config["seed"] = seed;
  config["metric"] = "mae_complement";
  config["learner"] = "elm";
  config["groups"] = {{{"name", "face"}, {"modalities", {"face"}}},
                      {{"name", "audio"}, {"modalities", {"audio"}}}};
  config["elm"] = {{"kernel", "rbf"},
                   {"c_grid", {0.1, 1.0, 10.0, 100.0}},
                   {"gamma_grid", {0.015625, 0.0625, 0.25}}};
  config["folds"] = 5;
  config["fusion"] = {{"mode", "forest"},
                      {"forest",
                       {{"n_trees", {50}},
                        {"features_per_split", {"sqrt", "third"}},
                        {"max_depth", {0}},
                        {"min_leaf", {5}}}}};
  WriteStringToFile(dir / "config.json", config.dump(2) + "\n");
}

}  // namespace impressions
