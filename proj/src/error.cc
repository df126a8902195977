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

#include "descboost/error.h"

namespace descboost {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kGeneratorUnavailable: return "GeneratorUnavailable";
    case ErrorCode::kGenerationEmpty: return "GenerationEmpty";
    case ErrorCode::kServiceUnavailable: return "ServiceUnavailable";
    case ErrorCode::kProtocol: return "ProtocolError";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kMissingEntityPair: return "MissingEntityPair";
    case ErrorCode::kCorpusMismatch: return "CorpusMismatch";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
  }
  return "Error";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfig:
      return 1;
    case ErrorCode::kIo:
    case ErrorCode::kParse:
    case ErrorCode::kSchema:
    case ErrorCode::kNotFound:
      return 2;
    case ErrorCode::kGeneratorUnavailable:
    case ErrorCode::kGenerationEmpty:
    case ErrorCode::kServiceUnavailable:
    case ErrorCode::kProtocol:
      return 3;
    case ErrorCode::kUnknownClass:
    case ErrorCode::kShape:
    case ErrorCode::kMissingEntityPair:
    case ErrorCode::kCorpusMismatch:
    case ErrorCode::kEmptyCandidates:
    case ErrorCode::kInsufficientSamples:
      return 4;
  }
  return 1;
}

}  // namespace descboost
