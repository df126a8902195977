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

#include "descboost/config.h"

#include <cstdlib>
#include <set>

#include "descboost/error.h"
#include "descboost/hashing.h"

namespace descboost {

namespace fs = std::filesystem;

std::optional<std::string> ProcessEnv(const std::string &name) {
  const char *value = std::getenv(name.c_str());
  if (value == nullptr) return std::nullopt;
  return std::string(value);
}

std::string Interpolate(std::string_view text, const EnvLookup &env,
                        const std::string &field) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("${", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, open - pos));
    const std::size_t close = text.find('}', open + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::kConfig, field + ": unterminated ${ in '" +
                                          std::string(text) + "'");
    }
    const std::string name(text.substr(open + 2, close - open - 2));
    if (name.empty()) throw Error(ErrorCode::kConfig, field + ": empty ${}");
    const std::optional<std::string> value = env(name);
    if (!value) {
      throw Error(ErrorCode::kConfig,
                  field + ": environment variable " + name + " is not set");
    }
    out += *value;
    pos = close + 1;
  }
  return out;
}

namespace {

// Typed access to one JSON object that remembers which keys were read so
// leftovers can be reported as unknown fields.
class Fields {
 public:
  Fields(const Json &json, std::string path, const EnvLookup &env)
      : json_(json), path_(std::move(path)), env_(env) {
    if (!json_.is_object()) Fail(path_, "expected an object");
  }

  [[noreturn]] static void Fail(const std::string &path, const std::string &what) {
    throw Error(ErrorCode::kConfig, path + ": " + what);
  }

  std::string Path(const std::string &key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const Json *Find(const std::string &key) {
    seen_.insert(key);
    auto it = json_.find(key);
    if (it == json_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const Json &Require(const std::string &key) {
    const Json *v = Find(key);
    if (v == nullptr) Fail(Path(key), "required field is missing");
    return *v;
  }

  std::string StringOf(const Json &v, const std::string &path) const {
    if (!v.is_string()) Fail(path, "expected a string");
    return Interpolate(v.get<std::string>(), env_, path);
  }

  std::optional<std::string> String(const std::string &key) {
    const Json *v = Find(key);
    if (v == nullptr) return std::nullopt;
    return StringOf(*v, Path(key));
  }

  std::string String(const std::string &key, const std::string &fallback) {
    return String(key).value_or(fallback);
  }

  std::string RequiredString(const std::string &key) {
    return StringOf(Require(key), Path(key));
  }

  std::int64_t Int(const std::string &key, std::int64_t fallback) {
    const Json *v = Find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) Fail(Path(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  double Double(const std::string &key, double fallback) {
    const Json *v = Find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) Fail(Path(key), "expected a number");
    return v->get<double>();
  }

  bool Bool(const std::string &key, bool fallback) {
    const Json *v = Find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) Fail(Path(key), "expected true or false");
    return v->get<bool>();
  }

  void Finish() const {
    for (auto it = json_.begin(); it != json_.end(); ++it) {
      if (!seen_.contains(it.key())) Fail(Path(it.key()), "unknown field");
    }
  }

  const EnvLookup &env() const { return env_; }

 private:
  const Json &json_;
  std::string path_;
  const EnvLookup &env_;
  std::set<std::string> seen_;
};

template <typename F>
auto Rethrow(const std::string &path, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fields::Fail(path, e.what());
  }
}

fs::path Resolve(const fs::path &base, const std::string &value) {
  fs::path p(value);
  return p.is_absolute() ? p.lexically_normal() : (base / p).lexically_normal();
}

fs::path ExistingPath(const fs::path &base, const std::string &value,
                      const std::string &path) {
  fs::path p = Resolve(base, value);
  if (!fs::exists(p)) Fields::Fail(path, "path does not exist: " + p.string());
  return p;
}

int PositiveInt(Fields &f, const std::string &key, std::int64_t fallback) {
  const std::int64_t v = f.Int(key, fallback);
  if (v < 1 || v > 1'000'000) f.Fail(f.Path(key), "must be a positive integer");
  return static_cast<int>(v);
}

DatasetConfig ParseDataset(const Json &json, const std::string &path,
                           const fs::path &base, const EnvLookup &env) {
  Fields f(json, path, env);
  DatasetConfig d;
  d.name = f.String("name", "dataset");
  const std::string format = f.String("format", "jsonl");
  d.format = Rethrow(f.Path("format"), [&] { return ParseCorpusFormat(format); });
  Fields files(f.Require("files"), f.Path("files"), env);
  for (Split split : kAllSplits) {
    const std::string key(SplitName(split));
    if (auto value = files.String(key)) {
      d.files[split] = ExistingPath(base, *value, files.Path(key));
    }
  }
  files.Finish();
  if (auto value = f.String("splits_map")) {
    d.splits_map = ExistingPath(base, *value, f.Path("splits_map"));
  }
  if (const Json *counts = f.Find("class_split")) {
    Fields c(*counts, f.Path("class_split"), env);
    std::map<Split, std::size_t> out;
    for (Split split : kAllSplits) {
      const std::int64_t n = c.Int(std::string(SplitName(split)), 0);
      if (n < 0) c.Fail(c.Path(std::string(SplitName(split))), "must be >= 0");
      out[split] = static_cast<std::size_t>(n);
    }
    c.Finish();
    d.class_split = std::move(out);
  }
  if (d.splits_map && d.class_split) {
    f.Fail(path, "give either splits_map or class_split, not both");
  }
  f.Finish();
  return d;
}

RemoteParams ParseRemote(Fields &f) {
  RemoteParams r;
  r.endpoint = f.String("endpoint").value_or(f.env()(kEndpointEnv).value_or(""));
  if (r.endpoint.empty()) {
    f.Fail(f.Path("endpoint"),
           std::string("required for the remote backend (or set ") +
               kEndpointEnv + ")");
  }
  r.bearer_token = f.String("token").value_or(f.env()(kTokenEnv).value_or(""));
  r.batch_size = PositiveInt(f, "batch_size", r.batch_size);
  r.max_attempts = PositiveInt(f, "max_attempts", r.max_attempts);
  r.timeout_seconds = PositiveInt(f, "timeout_seconds", r.timeout_seconds);
  return r;
}

VariationConfig ParseVariations(const Json *json, const std::string &path,
                                const EnvLookup &env) {
  VariationConfig v;
  Json empty = Json::object();
  Fields f(json != nullptr ? *json : empty, path, env);
  if (const Json *list = f.Find("strategies")) {
    if (!list->is_array() || list->empty()) {
      f.Fail(f.Path("strategies"), "expected a non-empty array");
    }
    v.strategies.clear();
    std::set<VariationStrategy> seen;
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string p = f.Path("strategies") + "[" + std::to_string(i) + "]";
      const std::string name = f.StringOf((*list)[i], p);
      const VariationStrategy s = Rethrow(p, [&] { return ParseStrategy(name); });
      if (!seen.insert(s).second) f.Fail(p, "duplicate strategy");
      v.strategies.push_back(s);
    }
  }
  v.n = PositiveInt(f, "n", v.n);
  v.include_original = f.Bool("include_original", v.include_original);
  for (VariationStrategy s : kAllStrategies) {
    v.params[s] = GenerationParams::DefaultsFor(s);
    v.params[s].num_return = v.n;
  }
  if (const Json *overrides = f.Find("params")) {
    Fields o(*overrides, f.Path("params"), env);
    for (VariationStrategy s : kAllStrategies) {
      const std::string key(StrategyName(s));
      if (const Json *p = o.Find(key)) {
        v.params[s] = Rethrow(o.Path(key), [&] {
          return GenerationParams::FromJson(*p, v.params[s]);
        });
      }
    }
    o.Finish();
  }
  const std::string generator = f.String("generator", "simulated");
  if (generator == "simulated") {
    v.generator = GeneratorKind::kSimulated;
  } else if (generator == "echo") {
    v.generator = GeneratorKind::kEcho;
  } else if (generator == "remote") {
    v.generator = GeneratorKind::kRemote;
    v.remote = ParseRemote(f);
  } else {
    f.Fail(f.Path("generator"), "expected simulated, echo or remote");
  }
  f.Finish();
  return v;
}

PredictorHandle ParsePredictor(const Json &json, const std::string &path,
                               const EnvLookup &env, std::uint64_t seed) {
  Fields f(json, path, env);
  PredictorHandle h;
  const std::string backend = f.RequiredString("backend");
  h.model_id = f.String("model_id", backend);
  if (backend == "noisy_oracle") {
    NoisyOracleParams p;
    p.error_rate = f.Double("error_rate", 0.0);
    p.seed = static_cast<std::uint64_t>(f.Int("seed", static_cast<std::int64_t>(seed)));
    Rethrow(path, [&] { p.Validate(); });
    h.backend = p;
  } else if (backend == "lexical_sim") {
    LexicalSimParams p;
    p.window = static_cast<int>(f.Int("window", p.window));
    p.o_bias = f.Double("o_bias", p.o_bias);
    p.temperature = f.Double("temperature", p.temperature);
    Rethrow(path, [&] { p.Validate(); });
    h.backend = p;
  } else if (backend == "remote") {
    h.backend = ParseRemote(f);
  } else {
    f.Fail(f.Path("backend"), "expected noisy_oracle, lexical_sim or remote");
  }
  f.Finish();
  return h;
}

}  // namespace

RunConfig ParseRunConfig(std::string_view text, const fs::path &config_path,
                         const EnvLookup &env) {
  Json json;
  try {
    json = Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorCode::kConfig, config_path.string() + ": " + e.what());
  }
  RunConfig c;
  c.config_path = config_path;
  c.config_hash = Sha256Hex(text);
  const fs::path base = config_path.has_parent_path()
                            ? config_path.parent_path()
                            : fs::path(".");
  Fields f(json, "", env);
  c.task = Rethrow("task", [&] { return ParseTaskKind(f.RequiredString("task")); });
  const std::int64_t seed = f.Int("seed", 0);
  if (seed < 0) f.Fail("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.dataset = ParseDataset(f.Require("dataset"), "dataset", base, env);
  c.descriptions = ExistingPath(base, f.RequiredString("descriptions"), "descriptions");
  c.variations = ParseVariations(f.Find("variations"), "variations", env);
  c.predictor = ParsePredictor(f.Require("predictor"), "predictor", env, c.seed);
  if (const Json *e = f.Find("ensemble")) {
    Fields ef(*e, "ensemble", env);
    c.ensemble.min_votes = PositiveInt(ef, "min_votes", c.ensemble.min_votes);
    if (auto tb = ef.String("tie_break")) {
      c.ensemble.tie_break = Rethrow("ensemble.tie_break", [&] { return ParseTieBreak(*tb); });
    }
    ef.Finish();
  }
  if (const Json *r = f.Find("ranking")) {
    Fields rf(*r, "ranking", env);
    c.normalized_entropy = rf.Bool("normalized", c.normalized_entropy);
    rf.Finish();
  }
  if (auto split = f.String("eval_split")) {
    c.eval_split = Rethrow("eval_split", [&] { return ParseSplit(*split); });
  }
  if (!c.dataset.files.contains(c.eval_split)) {
    f.Fail("dataset.files." + std::string(SplitName(c.eval_split)),
           "the evaluation split needs a file");
  }
  if (auto cache = f.String("cache_dir")) {
    c.cache_dir = Resolve(base, *cache);
  } else if (auto env_cache = env(kCacheDirEnv)) {
    c.cache_dir = fs::path(*env_cache);
  } else {
    c.cache_dir = base / "cache";
  }
  c.output_dir = Resolve(base, f.String("output_dir", "out"));
  c.parallelism = PositiveInt(f, "parallelism", c.parallelism);
  f.Finish();
  return c;
}

RunConfig LoadRunConfig(const fs::path &path, const EnvLookup &env) {
  return ParseRunConfig(ReadFile(path), path, env);
}

Json RunConfigToJson(const RunConfig &c) {
  Json strategies = Json::array();
  for (VariationStrategy s : c.variations.strategies) strategies.push_back(StrategyName(s));
  Json backend = std::visit(
      [](const auto &p) -> Json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RemoteParams>) {
          return {{"backend", "remote"}, {"endpoint", p.endpoint}};
        } else if constexpr (std::is_same_v<T, LexicalSimParams>) {
          return {{"backend", "lexical_sim"},
                  {"window", p.window},
                  {"o_bias", p.o_bias},
                  {"temperature", p.temperature}};
        } else {
          return {{"backend", "noisy_oracle"},
                  {"error_rate", p.error_rate},
                  {"seed", p.seed}};
        }
      },
      c.predictor.backend);
  backend["model_id"] = c.predictor.model_id;
  return {{"task", TaskKindName(c.task)},
          {"seed", c.seed},
          {"strategies", strategies},
          {"n", c.variations.n},
          {"include_original", c.variations.include_original},
          {"num_pipelines", c.num_pipelines()},
          {"predictor", backend},
          {"ensemble",
           {{"min_votes", c.ensemble.min_votes},
            {"tie_break", TieBreakName(c.ensemble.tie_break)}}},
          {"normalized_entropy", c.normalized_entropy},
          {"eval_split", SplitName(c.eval_split)}};
}

}  // namespace descboost
