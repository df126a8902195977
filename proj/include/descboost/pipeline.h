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

// End-to-end orchestration of a configured run.

#ifndef DESCBOOST_PIPELINE_H_
#define DESCBOOST_PIPELINE_H_

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "descboost/config.h"
#include "descboost/core.h"
#include "descboost/datasets.h"
#include "descboost/evaluation.h"
#include "descboost/inference.h"
#include "descboost/ranking.h"
#include "descboost/serialization.h"
#include "descboost/vargen.h"

namespace descboost {

// Runs fn(0..n-1) on up to `parallelism` threads. The first exception (by
// index) is rethrown after all workers finish.
void ParallelFor(std::size_t n, int parallelism,
                 const std::function<void(std::size_t)> &fn);

// Writes files under one root and remembers their content hashes. Text
// artifacts that cannot carry metadata get a "<name>.meta.json" sidecar.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path root, Json run_block);

  // Adds the run block under "run" and writes pretty-printed JSON.
  void WriteJson(const std::string &relative, Json json);
  void WriteText(const std::string &relative, std::string_view data);

  const std::filesystem::path &root() const { return root_; }
  const Json &run_block() const { return run_block_; }
  // relative path -> sha256, sorted by path.
  std::map<std::string, std::string> artifacts() const;

 private:
  void Write(const std::string &relative, std::string_view data);

  std::filesystem::path root_;
  Json run_block_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> hashes_;
};

struct ConvertedData {
  std::map<Split, TokenizedCorpus> corpora;
  std::optional<ConversionReport> report;
  // Classes of the evaluation split, in description-file order.
  std::vector<std::string> eval_classes;
};

struct PipelineDef {
  std::string id;
  TaskSpec spec;
};

struct PipelineResult {
  std::string id;
  PredictionSet predictions;
  EvalReport report;
};

// Per-class description candidates: the original description first, then
// every variation by strategy and index.
struct Candidate {
  std::string strategy;  // "original" for the unmodified description
  int variation_index = 0;
  std::string text;
};

struct ClassAnalysis {
  std::string class_id;
  std::vector<Candidate> candidates;
  std::vector<double> entropy;   // per candidate; NaN on failure
  std::vector<double> macro_f1;  // per candidate; NaN on failure
  std::vector<EntropyReport> ranking;
};

struct RunSummary {
  Json manifest;
  std::size_t predictor_calls = 0;
  std::size_t generator_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t corrupt_cache_entries = 0;
};

class Engine {
 public:
  // `backend` overrides the configured predictor; `generator` likewise.
  explicit Engine(RunConfig config, std::unique_ptr<Predictor> backend = nullptr,
                  std::unique_ptr<Generator> generator = nullptr);
  ~Engine();

  const RunConfig &config() const { return config_; }
  Json RunBlock() const;

  ConvertedData Convert() const;
  const TokenizedCorpus &EvalCorpus(const ConvertedData &data) const;
  TaskSpec EvalSpec(const ConvertedData &data) const;

  // Loads the archive at `path` when present and fills in whatever class and
  // strategy sets are missing or were produced with other parameters.
  VariationArchive Variations(const TaskSpec &spec,
                              const std::filesystem::path &path);

  std::vector<PipelineDef> Pipelines(const TaskSpec &spec,
                                     const VariationArchive &archive) const;
  PipelineDef FindPipeline(const TaskSpec &spec, const VariationArchive &archive,
                           const std::string &id) const;

  // Cached prediction.
  PredictionSet Predict(const TokenizedCorpus &corpus, const TaskSpec &spec,
                        const std::string &pipeline_id) const;
  std::vector<PipelineResult> PredictAll(const std::vector<PipelineDef> &defs,
                                         const TokenizedCorpus &gold) const;

  ClassAnalysis AnalyzeClass(const std::string &class_id, const TaskSpec &spec,
                             const VariationArchive &archive,
                             const TokenizedCorpus &gold) const;

  // Executes every stage and writes all artifacts plus manifest.json.
  RunSummary Run();

  std::size_t predictor_calls() const;
  std::size_t generator_calls() const { return generator_calls_; }
  PredictionCache &cache() { return *cache_; }
  // The cached predictor used by every stage.
  const Predictor &predictor() const { return *predictor_; }

 private:
  RunConfig config_;
  std::unique_ptr<Predictor> backend_;
  std::unique_ptr<Generator> generator_;
  std::unique_ptr<PredictionCache> cache_;
  std::unique_ptr<CachingPredictor> predictor_;
  std::atomic<std::size_t> generator_calls_{0};
};

// Spans decoded from an ensemble or pipeline, written in the gold JSONL
// shape (tokens copied from `gold`).
TokenizedCorpus AnnotationsToCorpus(
    const TokenizedCorpus &gold,
    const std::vector<std::vector<SpanAnnotation>> &spans);
TokenizedCorpus RelationLabelsToCorpus(const TokenizedCorpus &gold,
                                       const std::vector<std::string> &labels);

// Evaluates one pipeline's own decoding against gold.
EvalReport EvaluatePredictions(const PredictionSet &ps,
                               const TokenizedCorpus &gold, const TaskSpec &spec);

// Builds a task spec for standalone evaluation from the labels that occur in
// the given corpora (class id doubles as description).
TaskSpec SpecFromLabels(TaskKind kind,
                        const std::vector<const TokenizedCorpus *> &corpora);

}  // namespace descboost

#endif  // DESCBOOST_PIPELINE_H_
