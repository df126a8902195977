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

#include "descboost/serialization.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "descboost/error.h"

namespace descboost {

namespace {

[[noreturn]] void SchemaFail(const std::string &what) {
  throw Error(ErrorCode::kSchema, what);
}

const Json &Field(const Json &obj, const char *name) {
  auto it = obj.find(name);
  if (it == obj.end()) SchemaFail(std::string("missing field '") + name + "'");
  return *it;
}

int IntField(const Json &obj, const char *name) {
  const Json &v = Field(obj, name);
  if (!v.is_number_integer()) {
    SchemaFail(std::string("field '") + name + "' must be an integer");
  }
  return v.get<int>();
}

TokenRange RangeField(const Json &obj, const char *name) {
  const Json &v = Field(obj, name);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer()) {
    SchemaFail(std::string("field '") + name + "' must be [start, end]");
  }
  return {v[0].get<int>(), v[1].get<int>()};
}

Json RangeToJson(const TokenRange &r) { return Json::array({r.start, r.end}); }

}  // namespace

Json SentenceToJson(const TokenizedSentence &sentence) {
  Json row = Json::object();
  row["tokens"] = sentence.tokens;
  Json spans = Json::array();
  for (const Span &span : sentence.spans) {
    spans.push_back(
        {{"start", span.start}, {"end", span.end}, {"label", span.label}});
  }
  row["spans"] = std::move(spans);
  if (sentence.relation) {
    row["head"] = RangeToJson(sentence.relation->head);
    row["tail"] = RangeToJson(sentence.relation->tail);
    row["relation"] = sentence.relation->relation;
  }
  return row;
}

TokenizedSentence SentenceFromJson(const Json &row) {
  if (!row.is_object()) SchemaFail("row must be a JSON object");
  TokenizedSentence sentence;
  const Json &tokens = Field(row, "tokens");
  if (!tokens.is_array()) SchemaFail("field 'tokens' must be an array");
  for (const Json &token : tokens) {
    if (!token.is_string()) SchemaFail("tokens must be strings");
    sentence.tokens.push_back(token.get<std::string>());
  }
  if (auto it = row.find("spans"); it != row.end()) {
    if (!it->is_array()) SchemaFail("field 'spans' must be an array");
    for (const Json &span : *it) {
      if (!span.is_object()) SchemaFail("span must be an object");
      const Json &label = Field(span, "label");
      if (!label.is_string()) SchemaFail("span label must be a string");
      sentence.spans.push_back(
          {IntField(span, "start"), IntField(span, "end"), label.get<std::string>()});
    }
  }
  const bool has_relation = row.contains("relation") || row.contains("head") ||
                            row.contains("tail");
  if (has_relation) {
    const Json &relation = Field(row, "relation");
    if (!relation.is_string()) SchemaFail("field 'relation' must be a string");
    sentence.relation = RelationInstance{RangeField(row, "head"),
                                         RangeField(row, "tail"),
                                         relation.get<std::string>()};
  }
  ValidateSentence(sentence);
  return sentence;
}

Json TaskSpecToJson(const TaskSpec &spec) {
  Json classes = Json::array();
  for (const LabelClass &cls : spec.classes()) {
    classes.push_back({{"id", cls.id},
                       {"name", cls.name},
                       {"description", cls.description}});
  }
  return {{"task", TaskKindName(spec.kind())},
          {"includes_negative", spec.includes_negative()},
          {"classes", std::move(classes)}};
}

Json PredictionSetToJson(const PredictionSet &ps) {
  Json probs = Json::array();
  auto row = [](const ProbVector &p) {
    return Json(std::vector<double>(p.values().begin(), p.values().end()));
  };
  if (ps.kind() == TaskKind::kEntity) {
    for (const auto &sentence : ps.token_probs()) {
      Json tokens = Json::array();
      for (const ProbVector &p : sentence) tokens.push_back(row(p));
      probs.push_back(std::move(tokens));
    }
  } else {
    for (const ProbVector &p : ps.instance_probs()) probs.push_back(row(p));
  }
  return {{"pipeline_id", ps.pipeline_id()},
          {"task", TaskKindName(ps.kind())},
          {"classes", ps.class_ids()},
          {"probs", std::move(probs)}};
}

namespace {

ProbVector ProbRowFromJson(const Json &row) {
  if (!row.is_array()) {
    throw Error(ErrorCode::kProtocol, "probability row must be an array");
  }
  std::vector<double> values;
  values.reserve(row.size());
  for (const Json &v : row) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kProtocol, "probability must be a number");
    }
    values.push_back(v.get<double>());
  }
  try {
    return ProbVector(std::move(values));
  } catch (const Error &e) {
    throw Error(ErrorCode::kProtocol, e.what());
  }
}

}  // namespace

PredictionSet PredictionSetFromJson(const Json &json) {
  try {
    const TaskKind kind = ParseTaskKind(json.at("task").get<std::string>());
    auto pipeline_id = json.at("pipeline_id").get<std::string>();
    auto classes = json.at("classes").get<std::vector<std::string>>();
    const Json &probs = json.at("probs");
    if (!probs.is_array()) {
      throw Error(ErrorCode::kProtocol, "'probs' must be an array");
    }
    if (kind == TaskKind::kEntity) {
      std::vector<std::vector<ProbVector>> token_probs;
      token_probs.reserve(probs.size());
      for (const Json &sentence : probs) {
        if (!sentence.is_array()) {
          throw Error(ErrorCode::kProtocol, "sentence row must be an array");
        }
        std::vector<ProbVector> rows;
        rows.reserve(sentence.size());
        for (const Json &token : sentence) rows.push_back(ProbRowFromJson(token));
        token_probs.push_back(std::move(rows));
      }
      return PredictionSet::ForEntities(std::move(pipeline_id),
                                        std::move(classes),
                                        std::move(token_probs));
    }
    std::vector<ProbVector> instance_probs;
    instance_probs.reserve(probs.size());
    for (const Json &row : probs) instance_probs.push_back(ProbRowFromJson(row));
    return PredictionSet::ForRelations(std::move(pipeline_id),
                                       std::move(classes),
                                       std::move(instance_probs));
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kProtocol, e.what());
  }
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return buffer.str();
}

void WriteFileAtomic(const std::filesystem::path &path, std::string_view data) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " +
                                    ec.message());
  }
}

std::string DumpJson(const Json &json) { return json.dump(2) + "\n"; }

Json ParseJsonDocument(std::string_view text, const std::string &source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
    throw RowError(ErrorCode::kParse, source, line, e.what());
  }
}

Json LoadJsonFile(const std::filesystem::path &path) {
  return ParseJsonDocument(ReadFile(path), path.string());
}

}  // namespace descboost
