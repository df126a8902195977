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

// Generation of description variations. Text generation itself is done by a
// Generator backend; this module builds prompts, fills shortfalls, removes
// duplicates and hallucinated URLs, and persists the results.

#ifndef DESCBOOST_VARGEN_H_
#define DESCBOOST_VARGEN_H_

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "descboost/core.h"
#include "descboost/serialization.h"

namespace descboost {

enum class VariationStrategy {
  kPretrainedExtend,
  kFinetunedExtend,
  kSummarize,
  kParaphrase,
};

inline constexpr VariationStrategy kAllStrategies[] = {
    VariationStrategy::kPretrainedExtend, VariationStrategy::kFinetunedExtend,
    VariationStrategy::kSummarize, VariationStrategy::kParaphrase};

std::string_view StrategyName(VariationStrategy strategy);
VariationStrategy ParseStrategy(std::string_view name);

struct GenerationParams {
  int min_length = 80;
  int max_length = 120;
  int num_beams = 8;
  double temperature = 1.0;
  int no_repeat_ngram_size = 2;
  int num_return = 1;

  // Decoding settings of the reference generators for each strategy.
  static GenerationParams DefaultsFor(VariationStrategy strategy);

  // Throws Error(kInvalidArgument).
  void Validate() const;

  Json ToJson() const;
  // Missing fields keep the values of `base`.
  static GenerationParams FromJson(const Json &json,
                                   const GenerationParams &base);

  bool operator==(const GenerationParams &) const = default;
};

struct GenerationRequest {
  VariationStrategy strategy = VariationStrategy::kParaphrase;
  std::string context;
  GenerationParams params;
  // Sent alongside the context for the fine-tuned extender only.
  std::string class_name;
};

class Generator {
 public:
  virtual ~Generator() = default;
  // Returns up to params.num_return candidate texts. Backends signal an
  // unreachable service with Error(kGeneratorUnavailable).
  virtual std::vector<std::string> Generate(const GenerationRequest &request) = 0;
};

// Returns the request context unchanged.
class EchoGenerator : public Generator {
 public:
  std::vector<std::string> Generate(const GenerationRequest &request) override;
};

// Offline stand-in for the language models: deterministic word-level rewrites
// of the context (extension, truncation, or light rewording per strategy),
// one distinct rewrite per beam.
class SimulatedGenerator : public Generator {
 public:
  std::vector<std::string> Generate(const GenerationRequest &request) override;
};

// First `n` whitespace-delimited words joined by single spaces.
std::string FirstWords(std::string_view text, std::size_t n);

// Generation context for a class: the full description, or for the
// fine-tuned extender the first ten words of it.
std::string BuildContext(const LabelClass &cls, VariationStrategy strategy);

// Removes URLs and control characters, collapses whitespace runs to one
// space, and trims. Idempotent.
std::string Sanitize(std::string_view text);

struct Variation {
  std::string text;
  bool sanitized = false;  // sanitization changed the raw candidate
  std::string source_hash;

  bool operator==(const Variation &) const = default;
};

struct VariationSet {
  std::string class_id;
  VariationStrategy strategy = VariationStrategy::kParaphrase;
  GenerationParams params;
  std::vector<Variation> variations;

  Json ToJson() const;
  static VariationSet FromJson(const Json &json);
  bool operator==(const VariationSet &) const = default;
};

// Hash of (original description, strategy, params, index).
std::string VariationSourceHash(std::string_view original,
                                VariationStrategy strategy,
                                const GenerationParams &params,
                                std::size_t index);

// Requests `n` beams; shortfalls and duplicates are re-queried up to three
// times with the temperature raised by 0.1 per retry. Throws
// Error(kGenerationEmpty) when fewer than `n` distinct non-empty variations
// survive, and Error(kGeneratorUnavailable) when the backend fails.
VariationSet GenerateVariations(const LabelClass &cls,
                                VariationStrategy strategy, int n,
                                GenerationParams params, Generator &generator);

// Variation sets of one dataset keyed by (class id, strategy). Writers are
// serialized.
class VariationArchive {
 public:
  explicit VariationArchive(std::string dataset = "") : dataset_(std::move(dataset)) {}
  VariationArchive(const VariationArchive &other);
  VariationArchive &operator=(const VariationArchive &other);

  const std::string &dataset() const { return dataset_; }
  Json &metadata() { return metadata_; }
  const Json &metadata() const { return metadata_; }

  void Put(VariationSet set);
  // Throws Error(kNotFound).
  const VariationSet &Get(std::string_view class_id,
                          VariationStrategy strategy) const;
  bool Contains(std::string_view class_id, VariationStrategy strategy) const;
  std::size_t size() const { return sets_.size(); }
  std::size_t total_variations() const;
  std::vector<const VariationSet *> sets() const;

  Json ToJson() const;
  static VariationArchive FromJson(const Json &json);
  void Save(const std::filesystem::path &path) const;
  static VariationArchive Load(const std::filesystem::path &path);

 private:
  using Key = std::pair<std::string, int>;

  std::string dataset_;
  Json metadata_ = Json::object();
  std::map<Key, VariationSet> sets_;
  mutable std::mutex mu_;
};

}  // namespace descboost

#endif  // DESCBOOST_VARGEN_H_
