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

#ifndef IMPRESSIONS_TESTS_TEST_UTIL_H_
#define IMPRESSIONS_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <string>

#include <doctest.h>

#include "impressions/error.h"

namespace impressions::testing {

// Fresh, empty directory under the build tree.
inline std::filesystem::path TempDir(const std::string& name) {
  const std::filesystem::path dir =
      std::filesystem::path(IMPRESSIONS_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an impressions::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace impressions::testing

#endif  // IMPRESSIONS_TESTS_TEST_UTIL_H_
