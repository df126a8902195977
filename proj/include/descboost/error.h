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

#ifndef DESCBOOST_ERROR_H_
#define DESCBOOST_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace descboost {

enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kIo,
  kParse,
  kSchema,
  kUnknownClass,
  kNotFound,
  kGeneratorUnavailable,
  kGenerationEmpty,
  kServiceUnavailable,
  kProtocol,
  kShape,
  kMissingEntityPair,
  kCorpusMismatch,
  kEmptyCandidates,
  kInsufficientSamples,
};

std::string_view ErrorCodeName(ErrorCode code);

// Process exit code for the CLI: 1 config, 2 IO, 3 service, 4 data mismatch.
int ExitCodeFor(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse or schema failure located at a 1-based line of an input file (0 when
// the failure concerns the file as a whole).
class RowError : public Error {
 public:
  RowError(ErrorCode code, const std::string &source, int line,
           const std::string &reason)
      : Error(code, source + ":" + std::to_string(line) + ": " + reason),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace descboost

#endif  // DESCBOOST_ERROR_H_
