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

#include "descboost/vargen.h"

#include <bit>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>

#include "descboost/error.h"
#include "descboost/hashing.h"

namespace descboost {

std::string_view StrategyName(VariationStrategy strategy) {
  switch (strategy) {
    case VariationStrategy::kPretrainedExtend: return "pretrained_extend";
    case VariationStrategy::kFinetunedExtend: return "finetuned_extend";
    case VariationStrategy::kSummarize: return "summarize";
    case VariationStrategy::kParaphrase: return "paraphrase";
  }
  return "paraphrase";
}

VariationStrategy ParseStrategy(std::string_view name) {
  for (VariationStrategy s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown variation strategy '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// GenerationParams

GenerationParams GenerationParams::DefaultsFor(VariationStrategy strategy) {
  switch (strategy) {
    case VariationStrategy::kPretrainedExtend:
    case VariationStrategy::kFinetunedExtend:
      return {80, 120, 8, 1.0, 2, 1};
    case VariationStrategy::kSummarize:
      return {80, 512, 8, 1.0, 2, 1};
    case VariationStrategy::kParaphrase:
      return {10, 60, 8, 1.0, 2, 1};
  }
  return {};
}

void GenerationParams::Validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, "generation params: " + what);
  };
  if (min_length < 0) fail("min_length must be non-negative");
  if (min_length > max_length) fail("min_length exceeds max_length");
  if (num_beams < 1) fail("num_beams must be positive");
  if (!(temperature > 0.0)) fail("temperature must be positive");
  if (no_repeat_ngram_size < 0) fail("no_repeat_ngram_size must be non-negative");
  if (num_return < 1) fail("num_return must be at least 1");
}

Json GenerationParams::ToJson() const {
  return {{"min_length", min_length},
          {"max_length", max_length},
          {"num_beams", num_beams},
          {"temperature", temperature},
          {"no_repeat_ngram_size", no_repeat_ngram_size},
          {"num_return", num_return}};
}

GenerationParams GenerationParams::FromJson(const Json &json,
                                            const GenerationParams &base) {
  GenerationParams p = base;
  try {
    p.min_length = json.value("min_length", p.min_length);
    p.max_length = json.value("max_length", p.max_length);
    p.num_beams = json.value("num_beams", p.num_beams);
    p.temperature = json.value("temperature", p.temperature);
    p.no_repeat_ngram_size =
        json.value("no_repeat_ngram_size", p.no_repeat_ngram_size);
    p.num_return = json.value("num_return", p.num_return);
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("generation params: ") + e.what());
  }
  p.Validate();
  return p;
}

// ---------------------------------------------------------------------------
// Prompting and sanitization

std::string FirstWords(std::string_view text, std::size_t n) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::string out;
  for (std::size_t i = 0; i < n && in >> word; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::string BuildContext(const LabelClass &cls, VariationStrategy strategy) {
  if (strategy == VariationStrategy::kFinetunedExtend) {
    return FirstWords(cls.description, 10);
  }
  return cls.description;
}

std::string Sanitize(std::string_view text) {
  static const std::regex kUrl(
      R"((?:[A-Za-z][A-Za-z0-9+.\-]*://|www\.)[^\s]*)",
      std::regex::ECMAScript | std::regex::icase);
  // Control characters: whitespace controls become spaces, the rest (C0, DEL,
  // and UTF-8 encoded C1) are dropped.
  std::string cleaned;
  cleaned.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
      cleaned.push_back(' ');
    } else if (c < 0x20 || c == 0x7f) {
      continue;
    } else if (c == 0xc2 && i + 1 < text.size() &&
               static_cast<unsigned char>(text[i + 1]) >= 0x80 &&
               static_cast<unsigned char>(text[i + 1]) <= 0x9f) {
      ++i;
    } else {
      cleaned.push_back(static_cast<char>(c));
    }
  }
  cleaned = std::regex_replace(cleaned, kUrl, " ");
  std::string out;
  out.reserve(cleaned.size());
  bool pending_space = false;
  for (char c : cleaned) {
    if (c == ' ') {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

std::vector<std::string> EchoGenerator::Generate(const GenerationRequest &request) {
  return {request.context};
}

namespace {

std::vector<std::string> Words(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string Join(const std::vector<std::string> &words) {
  std::string out;
  for (const std::string &w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

constexpr std::string_view kFillerWords[] = {
    "typically", "including", "notable",  "various",   "names",
    "such",      "as",        "commonly", "referred",  "known",
    "places",    "objects",   "things",   "entities",  "mentioned",
    "usually",   "specific",  "general",  "public",    "local",
    "famous",    "structures", "works",   "regions",   "areas",
    "often",     "describes", "refers",   "particular", "kind",
    "examples",  "also"};

}  // namespace

std::vector<std::string> SimulatedGenerator::Generate(
    const GenerationRequest &request) {
  const std::vector<std::string> words = Words(request.context);
  std::vector<std::string> out;
  const auto temperature_bits = std::bit_cast<std::uint64_t>(request.params.temperature);
  for (int beam = 0; beam < request.params.num_return; ++beam) {
    auto draw = [&](std::uint64_t salt) {
      return StableHasher()
          .Add(request.context)
          .Add(StrategyName(request.strategy))
          .Add(temperature_bits)
          .Add(static_cast<std::uint64_t>(beam))
          .Add(salt)
          .Finish();
    };
    std::vector<std::string> result;
    switch (request.strategy) {
      case VariationStrategy::kPretrainedExtend:
      case VariationStrategy::kFinetunedExtend: {
        result = words;
        if (!request.class_name.empty()) result.insert(result.begin(), request.class_name);
        const std::size_t extra = 3 + draw(0) % 5;
        for (std::size_t k = 0; k < extra; ++k) {
          result.emplace_back(kFillerWords[draw(k + 1) % std::size(kFillerWords)]);
        }
        break;
      }
      case VariationStrategy::kSummarize: {
        for (std::size_t k = 0; k < words.size(); ++k) {
          if (HashToUnit(draw(k + 1)) >= 0.3) result.push_back(words[k]);
        }
        if (result.empty() && !words.empty()) result.push_back(words.front());
        break;
      }
      case VariationStrategy::kParaphrase: {
        result = words;
        for (std::size_t k = 0; k + 1 < result.size(); ++k) {
          if (HashToUnit(draw(k + 1)) < 0.2) std::swap(result[k], result[k + 1]);
        }
        result.emplace_back(kFillerWords[draw(0) % std::size(kFillerWords)]);
        break;
      }
    }
    if (result.size() > static_cast<std::size_t>(request.params.max_length)) {
      result.resize(static_cast<std::size_t>(request.params.max_length));
    }
    out.push_back(Join(result));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variation sets

std::string VariationSourceHash(std::string_view original,
                                VariationStrategy strategy,
                                const GenerationParams &params,
                                std::size_t index) {
  return Hex64(StableHasher()
                   .Add(original)
                   .Add(StrategyName(strategy))
                   .Add(params.ToJson().dump())
                   .Add(static_cast<std::uint64_t>(index))
                   .Finish());
}

VariationSet GenerateVariations(const LabelClass &cls,
                                VariationStrategy strategy, int n,
                                GenerationParams params, Generator &generator) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  params.num_return = n;
  params.Validate();

  constexpr int kMaxRetries = 3;
  constexpr double kTemperatureStep = 0.1;

  VariationSet set{cls.id, strategy, params, {}};
  GenerationRequest request{strategy, BuildContext(cls, strategy), params,
                            strategy == VariationStrategy::kFinetunedExtend
                                ? cls.name
                                : std::string()};
  std::set<std::string> seen;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    request.params.temperature = params.temperature + kTemperatureStep * attempt;
    std::vector<std::string> candidates;
    try {
      candidates = generator.Generate(request);
    } catch (const Error &e) {
      if (e.code() == ErrorCode::kGeneratorUnavailable) throw;
      throw Error(ErrorCode::kGeneratorUnavailable, e.what());
    } catch (const std::exception &e) {
      throw Error(ErrorCode::kGeneratorUnavailable, e.what());
    }
    for (const std::string &raw : candidates) {
      if (set.variations.size() == static_cast<std::size_t>(n)) break;
      std::string text = Sanitize(raw);
      if (text.empty() || !seen.insert(text).second) continue;
      const bool changed = text != raw;
      set.variations.push_back(
          {std::move(text), changed,
           VariationSourceHash(cls.description, strategy, params,
                               set.variations.size())});
    }
    if (set.variations.size() == static_cast<std::size_t>(n)) return set;
  }
  throw Error(ErrorCode::kGenerationEmpty,
              "class '" + cls.id + "', " + std::string(StrategyName(strategy)) +
                  ": " + std::to_string(set.variations.size()) + " of " +
                  std::to_string(n) + " distinct variations after retries");
}

Json VariationSet::ToJson() const {
  Json list = Json::array();
  for (const Variation &v : variations) {
    list.push_back({{"text", v.text},
                    {"sanitized", v.sanitized},
                    {"source_hash", v.source_hash}});
  }
  return {{"class_id", class_id},
          {"strategy", StrategyName(strategy)},
          {"params", params.ToJson()},
          {"variations", std::move(list)}};
}

VariationSet VariationSet::FromJson(const Json &json) {
  try {
    VariationSet set;
    set.class_id = json.at("class_id").get<std::string>();
    set.strategy = ParseStrategy(json.at("strategy").get<std::string>());
    set.params = GenerationParams::FromJson(json.at("params"),
                                            GenerationParams::DefaultsFor(set.strategy));
    for (const Json &v : json.at("variations")) {
      set.variations.push_back({v.at("text").get<std::string>(),
                                v.at("sanitized").get<bool>(),
                                v.at("source_hash").get<std::string>()});
    }
    return set;
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kSchema, std::string("variation set: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Archive

VariationArchive::VariationArchive(const VariationArchive &other) {
  std::lock_guard<std::mutex> lock(other.mu_);
  dataset_ = other.dataset_;
  metadata_ = other.metadata_;
  sets_ = other.sets_;
}

VariationArchive &VariationArchive::operator=(const VariationArchive &other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  dataset_ = other.dataset_;
  metadata_ = other.metadata_;
  sets_ = other.sets_;
  return *this;
}

void VariationArchive::Put(VariationSet set) {
  std::lock_guard<std::mutex> lock(mu_);
  Key key{set.class_id, static_cast<int>(set.strategy)};
  sets_.insert_or_assign(std::move(key), std::move(set));
}

const VariationSet &VariationArchive::Get(std::string_view class_id,
                                          VariationStrategy strategy) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sets_.find(Key{std::string(class_id), static_cast<int>(strategy)});
  if (it == sets_.end()) {
    throw Error(ErrorCode::kNotFound,
                "no variations for (" + dataset_ + ", " + std::string(class_id) +
                    ", " + std::string(StrategyName(strategy)) + ")");
  }
  return it->second;
}

bool VariationArchive::Contains(std::string_view class_id,
                                VariationStrategy strategy) const {
  std::lock_guard<std::mutex> lock(mu_);
  return sets_.contains(Key{std::string(class_id), static_cast<int>(strategy)});
}

std::size_t VariationArchive::total_variations() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t total = 0;
  for (const auto &[key, set] : sets_) total += set.variations.size();
  return total;
}

std::vector<const VariationSet *> VariationArchive::sets() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<const VariationSet *> out;
  for (const auto &[key, set] : sets_) out.push_back(&set);
  return out;
}

Json VariationArchive::ToJson() const {
  std::lock_guard<std::mutex> lock(mu_);
  Json list = Json::array();
  for (const auto &[key, set] : sets_) list.push_back(set.ToJson());
  return {{"dataset", dataset_}, {"metadata", metadata_}, {"sets", std::move(list)}};
}

VariationArchive VariationArchive::FromJson(const Json &json) {
  try {
    VariationArchive archive(json.at("dataset").get<std::string>());
    if (json.contains("metadata")) archive.metadata_ = json.at("metadata");
    for (const Json &set : json.at("sets")) archive.Put(VariationSet::FromJson(set));
    return archive;
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kSchema, std::string("variation archive: ") + e.what());
  }
}

void VariationArchive::Save(const std::filesystem::path &path) const {
  WriteFileAtomic(path, DumpJson(ToJson()));
}

VariationArchive VariationArchive::Load(const std::filesystem::path &path) {
  const std::string text = ReadFile(path);
  Json json;
  try {
    json = Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw RowError(ErrorCode::kParse, path.string(), 0, e.what());
  }
  return FromJson(json);
}

}  // namespace descboost
