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

// Zero-shot predictors. Every backend returns class distributions, never hard
// labels, because description ranking needs probabilities.
//
// Backends:
//   RemotePredictor       JSON over HTTP against a model server.
//   LexicalSimPredictor   deterministic word-overlap scorer.
//   NoisyOraclePredictor  gold labels corrupted by seeded, per-token noise.
//
// CachingPredictor wraps any backend with a content-addressed on-disk cache.

#ifndef DESCBOOST_INFERENCE_H_
#define DESCBOOST_INFERENCE_H_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "descboost/core.h"
#include "descboost/serialization.h"
#include "descboost/vargen.h"

namespace descboost {

class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual const std::string &model_id() const = 0;

  // Everything besides model id, corpus, and descriptions that changes the
  // output of a call (backend parameters, the pipeline id for seeded noise).
  virtual std::string CacheSalt(std::string_view pipeline_id) const = 0;

  // One vector per token, O at index 0. Requires an entity spec.
  virtual PredictionSet PredictEntities(const TokenizedCorpus &corpus,
                                        const TaskSpec &spec,
                                        std::string_view pipeline_id) const = 0;
  // One vector per instance. Throws Error(kMissingEntityPair) for sentences
  // without a head/tail pair.
  virtual PredictionSet PredictRelations(const TokenizedCorpus &corpus,
                                         const TaskSpec &spec,
                                         std::string_view pipeline_id) const = 0;

  // Dispatches on spec.kind().
  PredictionSet Predict(const TokenizedCorpus &corpus, const TaskSpec &spec,
                        std::string_view pipeline_id) const;
};

// Softmax of scores / temperature, exponentials summed in index order.
std::vector<double> Softmax(std::span<const double> scores, double temperature);

// Lowercased alphanumeric word forms; bytes >= 0x80 count as word characters.
std::vector<std::string> WordForms(std::string_view text);

struct LexicalSimParams {
  int window = 2;
  double o_bias = 1.0;
  double temperature = 1.0;

  void Validate() const;
};

// score(t, c) = number of tokens in [t - window, t + window] whose word form
// occurs in c's description; score(t, O) = o_bias. Relation instances score
// every token of the sentence.
class LexicalSimPredictor : public Predictor {
 public:
  LexicalSimPredictor(std::string model_id, LexicalSimParams params);

  const std::string &model_id() const override { return model_id_; }
  std::string CacheSalt(std::string_view pipeline_id) const override;
  PredictionSet PredictEntities(const TokenizedCorpus &corpus,
                                const TaskSpec &spec,
                                std::string_view pipeline_id) const override;
  PredictionSet PredictRelations(const TokenizedCorpus &corpus,
                                 const TaskSpec &spec,
                                 std::string_view pipeline_id) const override;

 private:
  std::string model_id_;
  LexicalSimParams params_;
};

struct NoisyOracleParams {
  double error_rate = 0.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Starts from gold labels. For each token (or instance) a stable hash of
// (seed, pipeline id, sentence index, token index) mapped to [0, 1) below
// error_rate replaces the label with another class picked by a second hash.
// The label gets probability 0.9, the rest share 0.1 uniformly.
class NoisyOraclePredictor : public Predictor {
 public:
  static constexpr double kLabelProbability = 0.9;

  NoisyOraclePredictor(std::string model_id, NoisyOracleParams params);

  const std::string &model_id() const override { return model_id_; }
  std::string CacheSalt(std::string_view pipeline_id) const override;
  PredictionSet PredictEntities(const TokenizedCorpus &corpus,
                                const TaskSpec &spec,
                                std::string_view pipeline_id) const override;
  PredictionSet PredictRelations(const TokenizedCorpus &corpus,
                                 const TaskSpec &spec,
                                 std::string_view pipeline_id) const override;

  // Label emitted for one position; exposed for tests.
  std::size_t NoisyLabel(std::size_t gold, std::size_t num_classes,
                         std::string_view pipeline_id,
                         std::uint64_t sentence_index,
                         std::uint64_t token_index) const;

 private:
  std::string model_id_;
  NoisyOracleParams params_;
};

struct RemoteParams {
  std::string endpoint;  // e.g. "http://localhost:8080"
  std::string bearer_token;
  int batch_size = 32;
  int max_attempts = 3;
  int timeout_seconds = 120;
};

// Client of the model-server wire protocol:
//   POST /predict_entities  {sentences, classes}   -> {probs}
//   POST /predict_relations {instances, relations} -> {probs}
//   GET  /health                                   -> {status, model_id}
// Requests are retried on transport errors and 5xx responses.
class RemotePredictor : public Predictor {
 public:
  RemotePredictor(std::string model_id, RemoteParams params);

  const std::string &model_id() const override { return model_id_; }
  std::string CacheSalt(std::string_view pipeline_id) const override;
  PredictionSet PredictEntities(const TokenizedCorpus &corpus,
                                const TaskSpec &spec,
                                std::string_view pipeline_id) const override;
  PredictionSet PredictRelations(const TokenizedCorpus &corpus,
                                 const TaskSpec &spec,
                                 std::string_view pipeline_id) const override;

  // Returns the server's model id. Throws Error(kServiceUnavailable).
  std::string Health() const;

 private:
  std::string model_id_;
  RemoteParams params_;
};

// POST /generate {strategy, context, params, name} -> {variations}.
class RemoteGenerator : public Generator {
 public:
  explicit RemoteGenerator(RemoteParams params);
  std::vector<std::string> Generate(const GenerationRequest &request) override;

 private:
  RemoteParams params_;
};

// Wire encodings, shared with protocol tests.
Json EntityRequestJson(std::span<const TokenizedSentence> sentences,
                       const TaskSpec &spec);
Json RelationRequestJson(std::span<const TokenizedSentence> sentences,
                         const TaskSpec &spec);
Json GenerateRequestJson(const GenerationRequest &request);

// POSTs `body` to `path` and returns the parsed JSON response. Throws
// Error(kServiceUnavailable) after exhausting retries, Error(kProtocol) on
// 4xx responses or unparsable bodies.
Json PostJson(const RemoteParams &params, const std::string &path,
              const Json &body);

struct PredictorHandle {
  std::variant<RemoteParams, LexicalSimParams, NoisyOracleParams> backend;
  std::string model_id;
};

std::unique_ptr<Predictor> MakePredictor(const PredictorHandle &handle);

struct CacheKey {
  std::string model_id;
  std::string salt;
  std::string corpus_hash;
  std::string spec_hash;

  // SHA-256 over all fields; names the cache entry.
  std::string Digest() const;
};

CacheKey MakeCacheKey(const Predictor &predictor, const TokenizedCorpus &corpus,
                      const TaskSpec &spec, std::string_view pipeline_id);

// Content-addressed store of prediction sets. Each entry carries a checksum
// of its payload; entries failing verification are reported and treated as
// misses. Concurrent misses on one key compute once.
class PredictionCache {
 public:
  using WarningSink = std::function<void(const std::string &)>;

  explicit PredictionCache(std::filesystem::path dir);

  std::optional<PredictionSet> Get(const CacheKey &key);
  void Put(const CacheKey &key, const PredictionSet &ps);
  PredictionSet GetOrCompute(const CacheKey &key,
                             const std::function<PredictionSet()> &compute);

  std::filesystem::path PathFor(const CacheKey &key) const;
  void set_warning_sink(WarningSink sink) { warn_ = std::move(sink); }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t corrupt_entries() const { return corrupt_; }

 private:
  std::shared_ptr<std::mutex> KeyLock(const std::string &digest);

  std::filesystem::path dir_;
  WarningSink warn_;
  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> key_locks_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
  std::atomic<std::size_t> corrupt_{0};
};

// Consults the cache before delegating; counts delegated calls.
class CachingPredictor : public Predictor {
 public:
  CachingPredictor(const Predictor &inner, PredictionCache &cache)
      : inner_(inner), cache_(cache) {}

  const std::string &model_id() const override { return inner_.model_id(); }
  std::string CacheSalt(std::string_view pipeline_id) const override {
    return inner_.CacheSalt(pipeline_id);
  }
  PredictionSet PredictEntities(const TokenizedCorpus &corpus,
                                const TaskSpec &spec,
                                std::string_view pipeline_id) const override;
  PredictionSet PredictRelations(const TokenizedCorpus &corpus,
                                 const TaskSpec &spec,
                                 std::string_view pipeline_id) const override;

  std::size_t inner_calls() const { return inner_calls_; }

 private:
  PredictionSet Cached(const TokenizedCorpus &corpus, const TaskSpec &spec,
                       std::string_view pipeline_id) const;

  const Predictor &inner_;
  PredictionCache &cache_;
  mutable std::atomic<std::size_t> inner_calls_{0};
};

}  // namespace descboost

#endif  // DESCBOOST_INFERENCE_H_
