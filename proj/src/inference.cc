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

#include "descboost/inference.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iostream>
#include <set>
#include <thread>
#include <unordered_set>

#include "descboost/error.h"
#include "descboost/hashing.h"
#include "httplib.h"

namespace descboost {

PredictionSet Predictor::Predict(const TokenizedCorpus &corpus,
                                 const TaskSpec &spec,
                                 std::string_view pipeline_id) const {
  return spec.kind() == TaskKind::kEntity
             ? PredictEntities(corpus, spec, pipeline_id)
             : PredictRelations(corpus, spec, pipeline_id);
}

namespace {

void RequireKind(const TaskSpec &spec, TaskKind kind) {
  if (spec.kind() != kind) {
    throw Error(ErrorCode::kInvalidArgument,
                "predictor called with a " + std::string(TaskKindName(spec.kind())) +
                    " task spec");
  }
}

void RequirePairs(const TokenizedCorpus &corpus) {
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    if (!corpus.sentences[s].relation) {
      throw Error(ErrorCode::kMissingEntityPair,
                  "sentence " + std::to_string(s) + " has no head/tail pair");
    }
  }
}

std::string DoubleBits(double v) {
  return Hex64(std::bit_cast<std::uint64_t>(v));
}

}  // namespace

std::vector<double> Softmax(std::span<const double> scores, double temperature) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - top) / temperature);
    sum += out[i];
  }
  for (double &v : out) v /= sum;
  return out;
}

std::vector<std::string> WordForms(std::string_view text) {
  auto is_word = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  std::vector<std::string> words;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

// ---------------------------------------------------------------------------
// LexicalSim

void LexicalSimParams::Validate() const {
  if (window < 0) throw Error(ErrorCode::kInvalidArgument, "window must be >= 0");
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  }
  if (!std::isfinite(o_bias)) {
    throw Error(ErrorCode::kInvalidArgument, "o_bias must be finite");
  }
}

LexicalSimPredictor::LexicalSimPredictor(std::string model_id,
                                         LexicalSimParams params)
    : model_id_(std::move(model_id)), params_(params) {
  params_.Validate();
}

std::string LexicalSimPredictor::CacheSalt(std::string_view) const {
  return "lexical_sim window=" + std::to_string(params_.window) +
         " o_bias=" + DoubleBits(params_.o_bias) +
         " temperature=" + DoubleBits(params_.temperature);
}

namespace {

using WordSet = std::unordered_set<std::string>;

std::vector<WordSet> DescriptionWordSets(const TaskSpec &spec) {
  std::vector<WordSet> sets;
  for (const LabelClass &cls : spec.classes()) {
    auto words = WordForms(cls.description);
    sets.emplace_back(words.begin(), words.end());
  }
  return sets;
}

// Token form: the lowercased token with surrounding non-word bytes removed.
std::string TokenForm(std::string_view token) {
  auto is_word = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_word(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !is_word(static_cast<unsigned char>(token[e - 1]))) --e;
  std::string form(token.substr(b, e - b));
  for (char &c : form) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return form;
}

}  // namespace

PredictionSet LexicalSimPredictor::PredictEntities(
    const TokenizedCorpus &corpus, const TaskSpec &spec,
    std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kEntity);
  const std::vector<WordSet> sets = DescriptionWordSets(spec);
  std::vector<std::vector<ProbVector>> probs;
  probs.reserve(corpus.sentences.size());
  std::vector<double> scores(spec.size());
  for (const TokenizedSentence &sentence : corpus.sentences) {
    const int n = static_cast<int>(sentence.tokens.size());
    std::vector<std::string> forms;
    forms.reserve(sentence.tokens.size());
    for (const std::string &token : sentence.tokens) forms.push_back(TokenForm(token));
    std::vector<ProbVector> rows;
    rows.reserve(sentence.tokens.size());
    for (int t = 0; t < n; ++t) {
      const int lo = std::max(0, t - params_.window);
      const int hi = std::min(n - 1, t + params_.window);
      for (std::size_t c = 0; c < spec.size(); ++c) {
        if (c < spec.first_positive()) {
          scores[c] = params_.o_bias;
          continue;
        }
        int matches = 0;
        for (int w = lo; w <= hi; ++w) {
          if (!forms[w].empty() && sets[c].contains(forms[w])) ++matches;
        }
        scores[c] = matches;
      }
      rows.emplace_back(Softmax(scores, params_.temperature));
    }
    probs.push_back(std::move(rows));
  }
  return PredictionSet::ForEntities(std::string(pipeline_id), spec.class_ids(),
                                    std::move(probs));
}

PredictionSet LexicalSimPredictor::PredictRelations(
    const TokenizedCorpus &corpus, const TaskSpec &spec,
    std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kRelation);
  RequirePairs(corpus);
  const std::vector<WordSet> sets = DescriptionWordSets(spec);
  std::vector<ProbVector> probs;
  probs.reserve(corpus.sentences.size());
  std::vector<double> scores(spec.size());
  for (const TokenizedSentence &sentence : corpus.sentences) {
    for (std::size_t c = 0; c < spec.size(); ++c) {
      if (c < spec.first_positive()) {
        scores[c] = params_.o_bias;
        continue;
      }
      int matches = 0;
      for (const std::string &token : sentence.tokens) {
        const std::string form = TokenForm(token);
        if (!form.empty() && sets[c].contains(form)) ++matches;
      }
      scores[c] = matches;
    }
    probs.emplace_back(Softmax(scores, params_.temperature));
  }
  return PredictionSet::ForRelations(std::string(pipeline_id), spec.class_ids(),
                                     std::move(probs));
}

// ---------------------------------------------------------------------------
// NoisyOracle

void NoisyOracleParams::Validate() const {
  if (!(error_rate >= 0.0 && error_rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "error_rate must be in [0, 1)");
  }
}

NoisyOraclePredictor::NoisyOraclePredictor(std::string model_id,
                                           NoisyOracleParams params)
    : model_id_(std::move(model_id)), params_(params) {
  params_.Validate();
}

std::string NoisyOraclePredictor::CacheSalt(std::string_view pipeline_id) const {
  return "noisy_oracle error_rate=" + DoubleBits(params_.error_rate) +
         " seed=" + std::to_string(params_.seed) +
         " pipeline=" + std::string(pipeline_id);
}

std::size_t NoisyOraclePredictor::NoisyLabel(std::size_t gold,
                                             std::size_t num_classes,
                                             std::string_view pipeline_id,
                                             std::uint64_t sentence_index,
                                             std::uint64_t token_index) const {
  if (num_classes < 2) return gold;
  const double u = HashToUnit(StableHasher()
                                  .Add(params_.seed)
                                  .Add(pipeline_id)
                                  .Add(sentence_index)
                                  .Add(token_index)
                                  .Finish());
  if (u >= params_.error_rate) return gold;
  const std::uint64_t pick = StableHasher()
                                 .Add(params_.seed)
                                 .Add(pipeline_id)
                                 .Add(sentence_index)
                                 .Add(token_index)
                                 .Add("replacement")
                                 .Finish();
  const std::size_t other = pick % (num_classes - 1);
  return other < gold ? other : other + 1;
}

namespace {

ProbVector OracleVector(std::size_t label, std::size_t num_classes) {
  if (num_classes == 1) return ProbVector::OneHot(1, 0);
  const double rest = (1.0 - NoisyOraclePredictor::kLabelProbability) /
                      static_cast<double>(num_classes - 1);
  std::vector<double> values(num_classes, rest);
  values[label] = NoisyOraclePredictor::kLabelProbability;
  return ProbVector(std::move(values));
}

std::size_t GoldIndex(const TaskSpec &spec, const std::string &label) {
  if (auto index = spec.IndexOf(label)) return *index;
  throw Error(ErrorCode::kCorpusMismatch,
              "gold label '" + label + "' is not a class of the task");
}

}  // namespace

PredictionSet NoisyOraclePredictor::PredictEntities(
    const TokenizedCorpus &corpus, const TaskSpec &spec,
    std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kEntity);
  std::vector<std::vector<ProbVector>> probs;
  probs.reserve(corpus.sentences.size());
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const TokenizedSentence &sentence = corpus.sentences[s];
    std::vector<std::size_t> gold(sentence.tokens.size(), 0);
    for (const Span &span : sentence.spans) {
      const std::size_t label = GoldIndex(spec, span.label);
      for (int t = span.start; t < span.end; ++t) gold[t] = label;
    }
    std::vector<ProbVector> rows;
    rows.reserve(gold.size());
    for (std::size_t t = 0; t < gold.size(); ++t) {
      rows.push_back(OracleVector(
          NoisyLabel(gold[t], spec.size(), pipeline_id, s, t), spec.size()));
    }
    probs.push_back(std::move(rows));
  }
  return PredictionSet::ForEntities(std::string(pipeline_id), spec.class_ids(),
                                    std::move(probs));
}

PredictionSet NoisyOraclePredictor::PredictRelations(
    const TokenizedCorpus &corpus, const TaskSpec &spec,
    std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kRelation);
  RequirePairs(corpus);
  std::vector<ProbVector> probs;
  probs.reserve(corpus.sentences.size());
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const std::size_t gold = GoldIndex(spec, corpus.sentences[s].relation->relation);
    probs.push_back(OracleVector(NoisyLabel(gold, spec.size(), pipeline_id, s, 0),
                                 spec.size()));
  }
  return PredictionSet::ForRelations(std::string(pipeline_id), spec.class_ids(),
                                     std::move(probs));
}

// ---------------------------------------------------------------------------
// Remote

namespace {

Json ClassesJson(const TaskSpec &spec, std::size_t from) {
  Json classes = Json::array();
  for (std::size_t i = from; i < spec.size(); ++i) {
    const LabelClass &cls = spec.at(i);
    classes.push_back(
        {{"id", cls.id}, {"name", cls.name}, {"description", cls.description}});
  }
  return classes;
}

Json RangeJson(const TokenRange &r) { return Json::array({r.start, r.end}); }

ProbVector ResponseRow(const Json &row, std::size_t width) {
  if (!row.is_array()) {
    throw Error(ErrorCode::kProtocol, "probability row must be an array");
  }
  if (row.size() != width) {
    throw Error(ErrorCode::kShape, "probability row of length " +
                                       std::to_string(row.size()) + ", expected " +
                                       std::to_string(width));
  }
  std::vector<double> values;
  values.reserve(width);
  for (const Json &v : row) {
    if (!v.is_number()) throw Error(ErrorCode::kProtocol, "non-numeric probability");
    values.push_back(v.get<double>());
  }
  try {
    return ProbVector(std::move(values));
  } catch (const Error &e) {
    throw Error(ErrorCode::kProtocol, e.what());
  }
}

const Json &ProbsField(const Json &response, std::size_t expected_rows) {
  if (!response.is_object() || !response.contains("probs") ||
      !response["probs"].is_array()) {
    throw Error(ErrorCode::kProtocol, "response lacks a 'probs' array");
  }
  const Json &probs = response["probs"];
  if (probs.size() != expected_rows) {
    throw Error(ErrorCode::kShape, "response has " + std::to_string(probs.size()) +
                                       " rows, expected " +
                                       std::to_string(expected_rows));
  }
  return probs;
}

httplib::Headers AuthHeaders(const RemoteParams &params) {
  httplib::Headers headers;
  if (!params.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + params.bearer_token);
  }
  return headers;
}

Json ParseResponse(const std::string &body) {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kProtocol, std::string("unparsable response: ") + e.what());
  }
}

template <typename Call>
Json WithRetries(const RemoteParams &params, const std::string &path, Call call) {
  std::string last_error = "no attempt made";
  const int attempts = std::max(1, params.max_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
    }
    httplib::Client client(params.endpoint);
    client.set_connection_timeout(params.timeout_seconds, 0);
    client.set_read_timeout(params.timeout_seconds, 0);
    client.set_write_timeout(params.timeout_seconds, 0);
    httplib::Result result = call(client);
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw Error(ErrorCode::kProtocol, path + " returned HTTP " +
                                            std::to_string(result->status) + ": " +
                                            result->body);
    }
    return ParseResponse(result->body);
  }
  throw Error(ErrorCode::kServiceUnavailable,
              params.endpoint + path + ": " + last_error);
}

}  // namespace

Json PostJson(const RemoteParams &params, const std::string &path,
              const Json &body) {
  const std::string payload = body.dump();
  return WithRetries(params, path, [&](httplib::Client &client) {
    return client.Post(path, AuthHeaders(params), payload, "application/json");
  });
}

Json EntityRequestJson(std::span<const TokenizedSentence> sentences,
                       const TaskSpec &spec) {
  Json rows = Json::array();
  for (const TokenizedSentence &s : sentences) rows.push_back(s.tokens);
  return {{"sentences", std::move(rows)}, {"classes", ClassesJson(spec, 1)}};
}

Json RelationRequestJson(std::span<const TokenizedSentence> sentences,
                         const TaskSpec &spec) {
  Json instances = Json::array();
  for (const TokenizedSentence &s : sentences) {
    if (!s.relation) {
      throw Error(ErrorCode::kMissingEntityPair, "instance without head/tail");
    }
    instances.push_back({{"tokens", s.tokens},
                         {"head", RangeJson(s.relation->head)},
                         {"tail", RangeJson(s.relation->tail)}});
  }
  return {{"instances", std::move(instances)}, {"relations", ClassesJson(spec, 0)}};
}

Json GenerateRequestJson(const GenerationRequest &request) {
  Json body = {{"strategy", StrategyName(request.strategy)},
               {"context", request.context},
               {"params", request.params.ToJson()}};
  if (!request.class_name.empty()) body["name"] = request.class_name;
  return body;
}

RemotePredictor::RemotePredictor(std::string model_id, RemoteParams params)
    : model_id_(std::move(model_id)), params_(std::move(params)) {
  if (params_.endpoint.empty()) {
    throw Error(ErrorCode::kConfig, "remote predictor needs an endpoint");
  }
  if (params_.batch_size < 1) {
    throw Error(ErrorCode::kConfig, "batch_size must be positive");
  }
}

std::string RemotePredictor::CacheSalt(std::string_view) const { return "remote"; }

std::string RemotePredictor::Health() const {
  const Json response = WithRetries(params_, "/health", [&](httplib::Client &client) {
    return client.Get("/health", AuthHeaders(params_));
  });
  if (!response.is_object() || response.value("status", "") != "ok") {
    throw Error(ErrorCode::kServiceUnavailable, "server not healthy");
  }
  return response.value("model_id", "");
}

PredictionSet RemotePredictor::PredictEntities(const TokenizedCorpus &corpus,
                                               const TaskSpec &spec,
                                               std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kEntity);
  std::vector<std::vector<ProbVector>> probs;
  probs.reserve(corpus.sentences.size());
  const std::span<const TokenizedSentence> all(corpus.sentences);
  for (std::size_t begin = 0; begin < all.size(); begin += params_.batch_size) {
    const auto batch =
        all.subspan(begin, std::min<std::size_t>(params_.batch_size, all.size() - begin));
    const Json response = PostJson(params_, "/predict_entities",
                                   EntityRequestJson(batch, spec));
    const Json &rows = ProbsField(response, batch.size());
    for (std::size_t s = 0; s < batch.size(); ++s) {
      const Json &tokens = rows[s];
      if (!tokens.is_array() || tokens.size() != batch[s].tokens.size()) {
        throw Error(ErrorCode::kShape, "token count mismatch in response");
      }
      std::vector<ProbVector> sentence;
      sentence.reserve(tokens.size());
      for (const Json &row : tokens) sentence.push_back(ResponseRow(row, spec.size()));
      probs.push_back(std::move(sentence));
    }
  }
  return PredictionSet::ForEntities(std::string(pipeline_id), spec.class_ids(),
                                    std::move(probs));
}

PredictionSet RemotePredictor::PredictRelations(const TokenizedCorpus &corpus,
                                                const TaskSpec &spec,
                                                std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kRelation);
  RequirePairs(corpus);
  std::vector<ProbVector> probs;
  probs.reserve(corpus.sentences.size());
  const std::span<const TokenizedSentence> all(corpus.sentences);
  for (std::size_t begin = 0; begin < all.size(); begin += params_.batch_size) {
    const auto batch =
        all.subspan(begin, std::min<std::size_t>(params_.batch_size, all.size() - begin));
    const Json response = PostJson(params_, "/predict_relations",
                                   RelationRequestJson(batch, spec));
    const Json &rows = ProbsField(response, batch.size());
    for (const Json &row : rows) probs.push_back(ResponseRow(row, spec.size()));
  }
  return PredictionSet::ForRelations(std::string(pipeline_id), spec.class_ids(),
                                     std::move(probs));
}

RemoteGenerator::RemoteGenerator(RemoteParams params) : params_(std::move(params)) {
  if (params_.endpoint.empty()) {
    throw Error(ErrorCode::kConfig, "remote generator needs an endpoint");
  }
}

std::vector<std::string> RemoteGenerator::Generate(const GenerationRequest &request) {
  Json response;
  try {
    response = PostJson(params_, "/generate", GenerateRequestJson(request));
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kServiceUnavailable) {
      throw Error(ErrorCode::kGeneratorUnavailable, e.what());
    }
    throw;
  }
  if (!response.is_object() || !response.contains("variations") ||
      !response["variations"].is_array()) {
    throw Error(ErrorCode::kProtocol, "response lacks a 'variations' array");
  }
  std::vector<std::string> out;
  for (const Json &v : response["variations"]) {
    if (!v.is_string()) throw Error(ErrorCode::kProtocol, "variation is not a string");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::unique_ptr<Predictor> MakePredictor(const PredictorHandle &handle) {
  return std::visit(
      [&](const auto &params) -> std::unique_ptr<Predictor> {
        using T = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<T, RemoteParams>) {
          return std::make_unique<RemotePredictor>(handle.model_id, params);
        } else if constexpr (std::is_same_v<T, LexicalSimParams>) {
          return std::make_unique<LexicalSimPredictor>(handle.model_id, params);
        } else {
          return std::make_unique<NoisyOraclePredictor>(handle.model_id, params);
        }
      },
      handle.backend);
}

// ---------------------------------------------------------------------------
// Cache

std::string CacheKey::Digest() const {
  return Sha256Hex("descboost-cache-key v1\n" + model_id + "\n" + salt + "\n" +
                   corpus_hash + "\n" + spec_hash);
}

CacheKey MakeCacheKey(const Predictor &predictor, const TokenizedCorpus &corpus,
                      const TaskSpec &spec, std::string_view pipeline_id) {
  return {predictor.model_id(), predictor.CacheSalt(pipeline_id),
          CorpusHash(corpus), TaskSpecHash(spec)};
}

namespace {
constexpr std::string_view kCacheMagic = "descboost-cache 1 ";
}  // namespace

PredictionCache::PredictionCache(std::filesystem::path dir)
    : dir_(std::move(dir)),
      warn_([](const std::string &msg) { std::cerr << "warning: " << msg << "\n"; }) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                "cannot create cache directory " + dir_.string() + ": " + ec.message());
  }
}

std::filesystem::path PredictionCache::PathFor(const CacheKey &key) const {
  return dir_ / (key.Digest() + ".json");
}

std::optional<PredictionSet> PredictionCache::Get(const CacheKey &key) {
  const std::filesystem::path path = PathFor(key);
  if (!std::filesystem::exists(path)) {
    ++misses_;
    return std::nullopt;
  }
  auto corrupt = [&](const std::string &why) -> std::optional<PredictionSet> {
    ++corrupt_;
    ++misses_;
    warn_("cache entry " + path.string() + " " + why + "; recomputing");
    return std::nullopt;
  };
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error &e) {
    return corrupt(std::string("unreadable: ") + e.what());
  }
  const std::size_t nl = text.find('\n');
  if (nl == std::string::npos || !text.starts_with(kCacheMagic)) {
    return corrupt("has no checksum header");
  }
  const std::string checksum = text.substr(kCacheMagic.size(), nl - kCacheMagic.size());
  const std::string_view payload = std::string_view(text).substr(nl + 1);
  if (Sha256Hex(payload) != checksum) return corrupt("failed checksum verification");
  try {
    PredictionSet ps = PredictionSetFromJson(Json::parse(payload));
    ++hits_;
    return ps;
  } catch (const std::exception &e) {
    return corrupt(std::string("has an invalid payload: ") + e.what());
  }
}

void PredictionCache::Put(const CacheKey &key, const PredictionSet &ps) {
  const std::string payload = PredictionSetToJson(ps).dump();
  WriteFileAtomic(PathFor(key),
                  std::string(kCacheMagic) + Sha256Hex(payload) + "\n" + payload);
}

std::shared_ptr<std::mutex> PredictionCache::KeyLock(const std::string &digest) {
  std::lock_guard<std::mutex> lock(locks_mu_);
  auto &slot = key_locks_[digest];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

PredictionSet PredictionCache::GetOrCompute(
    const CacheKey &key, const std::function<PredictionSet()> &compute) {
  const std::shared_ptr<std::mutex> key_lock = KeyLock(key.Digest());
  std::lock_guard<std::mutex> lock(*key_lock);
  if (std::optional<PredictionSet> cached = Get(key)) return std::move(*cached);
  PredictionSet ps = compute();
  Put(key, ps);
  return ps;
}

PredictionSet CachingPredictor::Cached(const TokenizedCorpus &corpus,
                                       const TaskSpec &spec,
                                       std::string_view pipeline_id) const {
  const CacheKey key = MakeCacheKey(inner_, corpus, spec, pipeline_id);
  PredictionSet ps = cache_.GetOrCompute(key, [&] {
    ++inner_calls_;
    return inner_.Predict(corpus, spec, pipeline_id);
  });
  if (ps.pipeline_id() != pipeline_id) return ps.WithPipelineId(std::string(pipeline_id));
  return ps;
}

PredictionSet CachingPredictor::PredictEntities(const TokenizedCorpus &corpus,
                                                const TaskSpec &spec,
                                                std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kEntity);
  return Cached(corpus, spec, pipeline_id);
}

PredictionSet CachingPredictor::PredictRelations(const TokenizedCorpus &corpus,
                                                 const TaskSpec &spec,
                                                 std::string_view pipeline_id) const {
  RequireKind(spec, TaskKind::kRelation);
  return Cached(corpus, spec, pipeline_id);
}

}  // namespace descboost
