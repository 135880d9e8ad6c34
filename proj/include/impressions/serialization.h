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

// Versioned JSON container for trained pipelines. Doubles are written in
// shortest round-trip form, so save/load reproduces every weight bit for bit
// and identical models serialize to identical bytes.

#ifndef IMPRESSIONS_SERIALIZATION_H_
#define IMPRESSIONS_SERIALIZATION_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "impressions/pipeline.h"

namespace impressions {

inline constexpr std::string_view kPipelineFormat = "impressions-pipeline";

std::string SerializePipeline(const StackedPipeline& pipeline);
// Throws ConfigError on a foreign format tag or unsupported version.
StackedPipeline DeserializePipeline(std::string_view text);

void SavePipeline(const StackedPipeline& pipeline,
                  const std::filesystem::path& path);
StackedPipeline LoadPipeline(const std::filesystem::path& path);

}  // namespace impressions

#endif  // IMPRESSIONS_SERIALIZATION_H_
