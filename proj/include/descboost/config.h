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

// Run configuration: a single JSON file. String values may reference
// environment variables as ${NAME}; relative paths resolve against the
// directory holding the file.

#ifndef DESCBOOST_CONFIG_H_
#define DESCBOOST_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "descboost/core.h"
#include "descboost/datasets.h"
#include "descboost/ensemble.h"
#include "descboost/inference.h"
#include "descboost/serialization.h"
#include "descboost/vargen.h"

namespace descboost {

inline constexpr char kCacheDirEnv[] = "DESCBOOST_CACHE_DIR";
inline constexpr char kEndpointEnv[] = "DESCBOOST_ENDPOINT";
inline constexpr char kTokenEnv[] = "DESCBOOST_TOKEN";

using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;

// Reads the process environment.
std::optional<std::string> ProcessEnv(const std::string &name);

// Replaces every ${NAME}. Throws Error(kConfig) naming `field` when a
// variable is unset or the syntax is malformed.
std::string Interpolate(std::string_view text, const EnvLookup &env,
                        const std::string &field);

struct DatasetConfig {
  std::string name;
  CorpusFormat format = CorpusFormat::kJsonl;
  std::map<Split, std::filesystem::path> files;
  std::optional<std::filesystem::path> splits_map;
  // Random class split by count, used when no splits map is given.
  std::optional<std::map<Split, std::size_t>> class_split;
};

enum class GeneratorKind { kSimulated, kEcho, kRemote };

struct VariationConfig {
  std::vector<VariationStrategy> strategies{std::begin(kAllStrategies),
                                            std::end(kAllStrategies)};
  int n = 10;
  std::map<VariationStrategy, GenerationParams> params;
  GeneratorKind generator = GeneratorKind::kSimulated;
  RemoteParams remote;
  bool include_original = true;

  const GenerationParams &ParamsFor(VariationStrategy strategy) const {
    return params.at(strategy);
  }
};

struct RunConfig {
  std::filesystem::path config_path;
  std::string config_hash;  // sha256 of the file as written

  TaskKind task = TaskKind::kEntity;
  DatasetConfig dataset;
  std::filesystem::path descriptions;
  VariationConfig variations;
  PredictorHandle predictor;
  EnsembleConfig ensemble;
  bool normalized_entropy = true;
  Split eval_split = Split::kTest;
  std::filesystem::path cache_dir;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  int parallelism = 4;

  std::size_t num_pipelines() const {
    return variations.strategies.size() * static_cast<std::size_t>(variations.n) +
           (variations.include_original ? 1 : 0);
  }
};

// Throws Error(kIo) when the file is unreadable and Error(kConfig), with the
// offending field path, on any invalid or missing value.
RunConfig LoadRunConfig(const std::filesystem::path &path,
                        const EnvLookup &env = ProcessEnv);
RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path &config_path,
                         const EnvLookup &env = ProcessEnv);

// Echo of the effective configuration without secrets.
Json RunConfigToJson(const RunConfig &config);

}  // namespace descboost

#endif  // DESCBOOST_CONFIG_H_
