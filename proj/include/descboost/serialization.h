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

// JSON encodings of the core types.

#ifndef DESCBOOST_SERIALIZATION_H_
#define DESCBOOST_SERIALIZATION_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "descboost/core.h"
#include "json.hpp"

namespace descboost {

using Json = nlohmann::ordered_json;

// One normalized JSONL row:
//   {"tokens":[...], "spans":[{"start":s,"end":e,"label":l}, ...]}
// plus "head":[s,e], "tail":[s,e], "relation":r for relation instances.
Json SentenceToJson(const TokenizedSentence &sentence);
// Throws Error(kSchema) on missing or mistyped fields and invalid spans.
TokenizedSentence SentenceFromJson(const Json &row);

Json TaskSpecToJson(const TaskSpec &spec);

Json PredictionSetToJson(const PredictionSet &ps);
// Throws Error(kProtocol) on malformed payloads and kShape on width errors.
PredictionSet PredictionSetFromJson(const Json &json);

// Reads a whole file. Throws Error(kIo).
std::string ReadFile(const std::filesystem::path &path);
// Writes via a temporary sibling and rename. Throws Error(kIo).
void WriteFileAtomic(const std::filesystem::path &path, std::string_view data);

// Stable pretty-printed form used for every JSON artifact on disk.
std::string DumpJson(const Json &json);

// Parses one JSON document; throws RowError(kParse) with the line of the
// first syntax error.
Json ParseJsonDocument(std::string_view text, const std::string &source);
Json LoadJsonFile(const std::filesystem::path &path);

}  // namespace descboost

#endif  // DESCBOOST_SERIALIZATION_H_
