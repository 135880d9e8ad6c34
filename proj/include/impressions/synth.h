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

// Seeded synthetic data: BTL tournaments, a two-modality regression set,
// demographically biased label sets, transcripts and a complete on-disk
// workspace for the command-line tool.

#ifndef IMPRESSIONS_SYNTH_H_
#define IMPRESSIONS_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "impressions/btl.h"
#include "impressions/dataset.h"
#include "impressions/feature_matrix.h"
#include "impressions/rng.h"

namespace impressions {

struct BtlSynth {
  std::vector<std::string> items;
  std::map<std::string, double> true_strengths;
  std::vector<PairwiseJudgment> judgments;
};

// Strengths are log-uniform over `decades` decades. Each small-world edge
// is judged `per_pair` times with outcomes drawn from the BTL probability.
BtlSynth SynthesizeBtl(int n_items, int degree, int per_pair, double rewire_prob,
                       std::uint64_t seed,
                       Dimension dimension = Dimension::kInterview,
                       double decades = 1.0);

struct FusionSynthOptions {
  int n_clips = 300;
  int face_dims = 8;
  int audio_dims = 6;
  double face_weight = 0.7;  // audio gets 1 - face_weight
  double noise_sd = 0.03;
  double validation_fraction = 0.2;
};

struct FusionSynth {
  std::vector<ClipRecord> records;
  DatasetSplit split;  // train and validation only
  std::map<std::string, FeatureMatrix> features;  // "face", "audio"
};

// Each dimension's target is 0.5 + 0.3 * (w * f(face) + (1 - w) * g(audio))
// plus Gaussian noise, clipped to [0,1]; f and g are tanh of random
// projections.
FusionSynth SynthesizeFusionData(const FusionSynthOptions& options,
                                 std::uint64_t seed);

struct BiasSynthOptions {
  int n = 2000;
  // Population point-biserial correlation between the female indicator and
  // extroversion; every other dimension is independent of demographics.
  double female_extroversion_r = 0.2;
  double noise_sd = 0.08;
};

// Exactly half the clips are female. Clips are grouped into videos of one to
// three clips and videos into users of one or two videos.
std::vector<ClipRecord> SynthesizeBiasData(const BiasSynthOptions& options,
                                           std::uint64_t seed);

// Sentences of random common words, each ending in '.', '!' or '?'.
std::string SynthesizeTranscript(Rng& rng, int sentences);

// Writes manifest.csv, split.csv, features/{face,audio}.csv,
// judgments.csv, frame_features.csv, frames/<clip>/*.pgm, transcripts/ and
// config.json under `dir`. The last clip has no transcript; held-out clips
// alternate between validation and test.
void WriteSyntheticWorkspace(const std::filesystem::path& dir,
                             std::uint64_t seed, int n_clips);

}  // namespace impressions

#endif  // IMPRESSIONS_SYNTH_H_
