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

#include "impressions/motion_energy.h"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>

#include "impressions/error.h"
#include "impressions/table_io.h"

namespace impressions {
namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string data) : data_(std::move(data)) {}

  // Next whitespace-delimited header token, skipping '#' comments.
  std::string Token() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < data_.size() &&
           !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      ++pos_;
    }
    return data_.substr(start, pos_ - start);
  }

  int Int(const std::filesystem::path& path) {
    const std::string tok = Token();
    auto v = ParseDouble(tok);
    if (!v || *v < 1 || *v != std::floor(*v)) {
      throw Error(ErrorCode::kMalformedRow, path.string() + ": bad PGM header");
    }
    return static_cast<int>(*v);
  }

  const std::string& data() const { return data_; }
  std::size_t pos() const { return pos_; }
  void Skip() { ++pos_; }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

GrayImage LoadPgm(const std::filesystem::path& path) {
  PgmReader reader(ReadFileToString(path));
  const std::string magic = reader.Token();
  if (magic != "P5" && magic != "P2") {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": not a PGM file");
  }
  GrayImage img;
  img.width = reader.Int(path);
  img.height = reader.Int(path);
  const int maxval = reader.Int(path);
  if (maxval > 65535) {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": bad maxval");
  }
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      auto v = ParseDouble(reader.Token());
      if (!v) throw Error(ErrorCode::kMalformedRow, path.string() + ": short");
      img.pixels[i] = std::clamp(*v / maxval, 0.0, 1.0);
    }
    return img;
  }
  reader.Skip();  // single whitespace after maxval
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::string& data = reader.data();
  if (data.size() < reader.pos() + count * bytes_per) {
    throw Error(ErrorCode::kMalformedRow, path.string() + ": truncated PGM");
  }
  const auto* raw =
      reinterpret_cast<const unsigned char*>(data.data() + reader.pos());
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = bytes_per == 1 ? raw[i]
                                      : (raw[2 * i] << 8) | raw[2 * i + 1];
    img.pixels[i] = std::min(1.0, static_cast<double>(v) / maxval);
  }
  return img;
}

GrayImage LoadPng(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::kMalformedRow,
                path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kMalformedRow, path.string() + ": " + message);
  }
  GrayImage img;
  img.width = static_cast<int>(image.width);
  img.height = static_cast<int>(image.height);
  img.pixels.resize(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    img.pixels[i] = buffer[i] / 255.0;
  }
  return img;
}

}  // namespace

GrayImage LoadGrayImage(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingFile, path.string());
  }
  const std::string ext = ToLower(path.extension().string());
  if (ext == ".png") return LoadPng(path);
  return LoadPgm(path);
}

void SaveGrayImagePgm(const GrayImage& image,
                      const std::filesystem::path& path) {
  std::string out = "P5\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  for (double v : image.pixels) {
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255))));
  }
  WriteStringToFile(path, out);
}

std::vector<GrayImage> LoadFrameDirectory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kMissingFile, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = ToLower(entry.path().extension().string());
    if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) {
              return a.filename().string() < b.filename().string();
            });
  std::vector<GrayImage> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(LoadGrayImage(f));
  return frames;
}

WMeiImage ComputeWMei(const std::vector<GrayImage>& frames, double threshold) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::kTooFewFrames,
                "motion energy needs at least two frames");
  }
  const int w = frames[0].width;
  const int h = frames[0].height;
  const std::size_t count = static_cast<std::size_t>(w) * h;
  for (const GrayImage& f : frames) {
    if (f.width != w || f.height != h || f.pixels.size() != count) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "frames must share one size");
    }
  }
  std::vector<int> counts(count, 0);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const auto& prev = frames[t - 1].pixels;
    const auto& cur = frames[t].pixels;
    for (std::size_t p = 0; p < count; ++p) {
      if (std::abs(cur[p] - prev[p]) > threshold) ++counts[p];
    }
  }
  const int peak = counts.empty() ? 0 : *std::max_element(counts.begin(),
                                                          counts.end());
  WMeiImage out;
  out.width = w;
  out.height = h;
  out.values.assign(count, 0.0);
  if (peak > 0) {
    for (std::size_t p = 0; p < count; ++p) {
      out.values[p] = static_cast<double>(counts[p]) / peak;
    }
  }
  return out;
}

WMeiStats ComputeWMeiStats(const WMeiImage& image) {
  WMeiStats stats;
  const std::size_t n = image.values.size();
  if (n == 0) {
    stats.no_motion = true;
    return stats;
  }
  double sum = 0.0;
  std::array<std::size_t, 256> histogram{};
  bool any = false;
  for (double v : image.values) {
    sum += v;
    if (v != 0.0) any = true;
    const long level = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    ++histogram[static_cast<std::size_t>(level)];
  }
  stats.mean = sum / static_cast<double>(n);
  stats.no_motion = !any;

  std::vector<double> sorted = image.values;
  const std::size_t mid = (n - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid),
                   sorted.end());
  stats.median = sorted[mid];

  double entropy = 0.0;
  for (std::size_t count : histogram) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(n);
    entropy -= p * std::log2(p);
  }
  stats.entropy = entropy / 8.0;
  return stats;
}

}  // namespace impressions
