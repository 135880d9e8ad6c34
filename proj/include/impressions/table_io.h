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

// Small helpers for the comma-separated tables used by every file format.

#ifndef IMPRESSIONS_TABLE_IO_H_
#define IMPRESSIONS_TABLE_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impressions {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line of each row, for error messages.
  std::vector<int> line_numbers;

  // Column position by header name, or nullopt.
  std::optional<std::size_t> Column(std::string_view name) const;
};

// Reads a comma-separated file with a header row. Fields may be wrapped in
// double quotes; surrounding whitespace is trimmed and blank lines skipped.
// Throws MissingFile if the path does not exist, MalformedRow on ragged rows.
Table ReadTable(const std::filesystem::path& path);

// Parses the whole string as a finite or non-finite double; nullopt on junk.
std::optional<double> ParseDouble(std::string_view text);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

// Quotes a field if it contains a comma, quote or newline.
std::string EscapeField(std::string_view field);

std::string JoinRow(const std::vector<std::string>& fields);

std::string ReadFileToString(const std::filesystem::path& path);

// Writes bytes, creating parent directories. Throws IoError on failure.
void WriteStringToFile(const std::filesystem::path& path,
                       std::string_view contents);

std::string Trim(std::string_view text);
std::string ToLower(std::string_view text);

}  // namespace impressions

#endif  // IMPRESSIONS_TABLE_IO_H_
