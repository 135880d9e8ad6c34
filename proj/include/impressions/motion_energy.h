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

// Weighted motion energy images from grayscale frame sequences.

#ifndef IMPRESSIONS_MOTION_ENERGY_H_
#define IMPRESSIONS_MOTION_ENERGY_H_

#include <filesystem>
#include <vector>

namespace impressions {

// Row-major grayscale image with intensities in [0,1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// Reads binary (P5) or ASCII (P2) portable graymaps and PNG files. Colour
// PNGs are converted to luminance; 16-bit data is reduced to 8 bits.
GrayImage LoadGrayImage(const std::filesystem::path& path);
// Writes an 8-bit binary PGM, rounding to the nearest level.
void SaveGrayImagePgm(const GrayImage& image, const std::filesystem::path& path);

// Loads every .pgm/.png file in `dir` in lexicographic file-name order.
std::vector<GrayImage> LoadFrameDirectory(const std::filesystem::path& dir);

inline constexpr double kDefaultMotionThreshold = 0.1;

struct WMeiImage {
  int width = 0;
  int height = 0;
  // Normalized so the maximum is 1, or all zero when nothing moved.
  std::vector<double> values;
};

// Counts, per pixel, the frames whose absolute difference to the previous
// frame exceeds `threshold`, then divides by the largest count. Throws
// TooFewFrames for fewer than two frames and DimensionMismatch for frames
// of different sizes.
WMeiImage ComputeWMei(const std::vector<GrayImage>& frames,
                      double threshold = kDefaultMotionThreshold);

struct WMeiStats {
  double mean = 0.0;
  // Lower median for even pixel counts.
  double median = 0.0;
  // Shannon entropy of the 256-level histogram, in bits divided by 8.
  double entropy = 0.0;
  // True for an all-zero image, e.g. a misdetected static face crop.
  bool no_motion = false;
};

WMeiStats ComputeWMeiStats(const WMeiImage& image);

}  // namespace impressions

#endif  // IMPRESSIONS_MOTION_ENERGY_H_
