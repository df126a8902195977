// Copyright 2026 The descboost Authors.
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

#ifndef DESCBOOST_TESTS_TEST_UTIL_H_
#define DESCBOOST_TESTS_TEST_UTIL_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "descboost/core.h"
#include "descboost/error.h"

#ifndef DESCBOOST_TEST_DATA_DIR
#define DESCBOOST_TEST_DATA_DIR "tests/data"
#endif

namespace descboost::testing {

inline std::filesystem::path DataDir() { return DESCBOOST_TEST_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("descboost-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline TokenizedSentence Sentence(const std::string &text, std::vector<Span> spans = {}) {
  TokenizedSentence s;
  std::istringstream in(text);
  for (std::string tok; in >> tok;) s.tokens.push_back(tok);
  s.spans = std::move(spans);
  return s;
}

inline LabelClass Class(const std::string &id, const std::string &description,
                        TaskKind kind = TaskKind::kEntity) {
  return {id, id, description, kind};
}

// Error code thrown by fn, or nullopt if it returned normally.
inline std::optional<ErrorCode> CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace descboost::testing

#endif  // DESCBOOST_TESTS_TEST_UTIL_H_
