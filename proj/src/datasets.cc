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

#include "descboost/datasets.h"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <sstream>

#include "descboost/error.h"
#include "descboost/hashing.h"

namespace descboost {

std::vector<std::string> SentenceLabels(const TokenizedSentence &sentence) {
  std::vector<std::string> labels;
  for (const Span &span : sentence.spans) labels.push_back(span.label);
  if (sentence.relation) labels.push_back(sentence.relation->relation);
  return labels;
}

void RawDataset::RecomputeInventory() {
  label_inventory.clear();
  for (const auto &[split, sentences] : splits) {
    auto &inventory = label_inventory[split];
    for (const TokenizedSentence &sentence : sentences) {
      for (std::string &label : SentenceLabels(sentence)) {
        inventory.insert(std::move(label));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Zero-shot conversion

Json ConversionReport::ToJson() const {
  Json splits_json = Json::object();
  for (const auto &[split, counts] : splits) {
    splits_json[std::string(SplitName(split))] = {
        {"sentences_before", counts.sentences_before},
        {"sentences_after", counts.sentences_after},
        {"sentences_removed", counts.sentences_removed},
        {"mentions_before", counts.mentions_before},
        {"mentions_after", counts.mentions_after},
    };
  }
  Json out = {{"task", TaskKindName(kind)}};
  out["split_seed"] = split_seed ? Json(*split_seed) : Json(nullptr);
  out["splits"] = std::move(splits_json);
  return out;
}

ConversionResult ZeroShotConvert(const RawDataset &raw,
                                 const SplitClassMap &split_classes) {
  std::map<std::string, Split> owner;
  for (const auto &[split, classes] : split_classes) {
    for (const std::string &cls : classes) {
      auto [it, inserted] = owner.emplace(cls, split);
      if (!inserted && it->second != split) {
        throw Error(ErrorCode::kInvalidArgument,
                    "class '" + cls + "' assigned to more than one split");
      }
    }
  }

  ConversionResult result;
  result.dataset.kind = raw.kind;
  result.report.kind = raw.kind;
  static const std::set<std::string> kNoClasses;

  for (const auto &[split, sentences] : raw.splits) {
    auto found = split_classes.find(split);
    const std::set<std::string> &allowed =
        found == split_classes.end() ? kNoClasses : found->second;
    SplitConversionCounts &counts = result.report.splits[split];
    std::vector<TokenizedSentence> &kept = result.dataset.splits[split];
    counts.sentences_before = sentences.size();

    for (const TokenizedSentence &sentence : sentences) {
      for (const std::string &label : SentenceLabels(sentence)) {
        if (!owner.contains(label)) {
          throw Error(ErrorCode::kUnknownClass,
                      "label '" + label + "' in split " +
                          std::string(SplitName(split)) +
                          " belongs to no split's class set");
        }
        ++counts.mentions_before[label];
      }
      TokenizedSentence converted = sentence;
      std::erase_if(converted.spans, [&](const Span &span) {
        return !allowed.contains(span.label);
      });
      if (converted.relation && !allowed.contains(converted.relation->relation)) {
        converted.relation.reset();
      }
      const bool relation_task = raw.kind == TaskKind::kRelation;
      const bool keep = relation_task ? converted.relation.has_value()
                                      : !converted.spans.empty();
      if (!keep) continue;
      for (const std::string &label : SentenceLabels(converted)) {
        ++counts.mentions_after[label];
      }
      kept.push_back(std::move(converted));
    }
    counts.sentences_after = kept.size();
    counts.sentences_removed = counts.sentences_before - counts.sentences_after;
  }
  result.dataset.RecomputeInventory();
  return result;
}

SplitClassMap RandomClassSplit(std::vector<std::string> class_ids,
                               const std::map<Split, std::size_t> &counts,
                               std::uint64_t seed) {
  std::sort(class_ids.begin(), class_ids.end());
  class_ids.erase(std::unique(class_ids.begin(), class_ids.end()),
                  class_ids.end());
  std::size_t wanted = 0;
  for (const auto &[split, n] : counts) wanted += n;
  if (wanted > class_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "split sizes need " + std::to_string(wanted) +
                    " classes but only " + std::to_string(class_ids.size()) +
                    " exist");
  }
  for (std::size_t i = class_ids.size(); i > 1; --i) {
    const std::uint64_t draw = StableHasher().Add(seed).Add(i - 1).Finish();
    std::swap(class_ids[i - 1], class_ids[draw % i]);
  }
  SplitClassMap out;
  std::size_t next = 0;
  for (Split split : kAllSplits) {
    auto it = counts.find(split);
    if (it == counts.end()) continue;
    auto &set = out[split];
    for (std::size_t k = 0; k < it->second; ++k) set.insert(class_ids[next++]);
  }
  return out;
}

SplitClassMap SplitClassMapFromJson(const Json &json) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kSchema, "split map must be a JSON object");
  }
  SplitClassMap out;
  for (const auto &[name, classes] : json.items()) {
    const Split split = ParseSplit(name);
    if (!classes.is_array()) {
      throw Error(ErrorCode::kSchema, "split '" + name + "' must list classes");
    }
    for (const Json &cls : classes) {
      if (!cls.is_string()) {
        throw Error(ErrorCode::kSchema, "class ids must be strings");
      }
      out[split].insert(cls.get<std::string>());
    }
  }
  return out;
}

Json SplitClassMapToJson(const SplitClassMap &map) {
  Json out = Json::object();
  for (const auto &[split, classes] : map) {
    out[std::string(SplitName(split))] =
        std::vector<std::string>(classes.begin(), classes.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

MinMeanMax Summarize(const std::vector<std::size_t> &values) {
  MinMeanMax out;
  if (values.empty()) return out;
  out.min = *std::min_element(values.begin(), values.end());
  out.max = *std::max_element(values.begin(), values.end());
  const double total =
      std::accumulate(values.begin(), values.end(), 0.0,
                      [](double acc, std::size_t v) { return acc + v; });
  out.mean = total / static_cast<double>(values.size());
  return out;
}

Json SummaryJson(const MinMeanMax &m) {
  return {{"mean", m.mean}, {"max", m.max}, {"min", m.min}};
}

}  // namespace

Json StatsReport::ToJson() const {
  return {{"sentences", sentences},
          {"mention_counts", mention_counts},
          {"tokens_per_sentence", SummaryJson(tokens_per_sentence)},
          {"entities_per_sentence", SummaryJson(entities_per_sentence)}};
}

StatsReport SplitStats(const TokenizedCorpus &corpus) {
  StatsReport report;
  report.sentences = corpus.sentences.size();
  std::vector<std::size_t> tokens;
  std::vector<std::size_t> entities;
  for (const TokenizedSentence &sentence : corpus.sentences) {
    tokens.push_back(sentence.tokens.size());
    entities.push_back(sentence.spans.size());
    for (const std::string &label : SentenceLabels(sentence)) {
      ++report.mention_counts[label];
    }
  }
  report.tokens_per_sentence = Summarize(tokens);
  report.entities_per_sentence = Summarize(entities);
  return report;
}

// ---------------------------------------------------------------------------
// Parsing

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "conll") return CorpusFormat::kConll;
  if (name == "ontonotes") return CorpusFormat::kOntoNotes;
  if (name == "pubtator") return CorpusFormat::kPubTator;
  if (name == "fewrel") return CorpusFormat::kFewRel;
  if (name == "wikizs") return CorpusFormat::kWikiZs;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown corpus format '" + std::string(name) + "'");
}

std::string_view CorpusFormatExtension(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kJsonl: return ".jsonl";
    case CorpusFormat::kConll: return ".conll";
    case CorpusFormat::kOntoNotes: return ".gold_conll";
    case CorpusFormat::kPubTator: return ".txt";
    case CorpusFormat::kFewRel:
    case CorpusFormat::kWikiZs:
      return ".json";
  }
  return ".jsonl";
}

namespace {

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

std::vector<std::string> Columns(std::string_view line) {
  std::vector<std::string> cols;
  std::istringstream in{std::string(line)};
  std::string col;
  while (in >> col) cols.push_back(col);
  return cols;
}

Json ParseWholeJson(std::string_view text, const std::string &source) {
  return ParseJsonDocument(text, source);
}

void CheckNonEmpty(const TokenizedCorpus &corpus, const std::string &source) {
  if (corpus.sentences.empty()) {
    throw RowError(ErrorCode::kParse, source, 0, "no sentences in input");
  }
}

TokenizedCorpus ParseJsonl(std::string_view text, const std::string &source) {
  TokenizedCorpus corpus;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (IsBlank(lines[i])) continue;
    Json row;
    try {
      row = Json::parse(lines[i]);
    } catch (const Json::parse_error &e) {
      throw RowError(ErrorCode::kParse, source, line_no, e.what());
    }
    try {
      corpus.sentences.push_back(SentenceFromJson(row));
    } catch (const Error &e) {
      throw RowError(ErrorCode::kSchema, source, line_no, e.what());
    }
  }
  return corpus;
}

// Sentence assembly shared by the column formats.
class SentenceBuilder {
 public:
  void AddToken(std::string token) { sentence_.tokens.push_back(std::move(token)); }
  int size() const { return static_cast<int>(sentence_.tokens.size()); }

  void Open(std::string label) {
    Close();
    open_label_ = std::move(label);
    open_start_ = size();
  }
  bool open() const { return open_label_.has_value(); }
  const std::string &open_label() const { return *open_label_; }

  // Closes the open span at the current token count.
  void Close() {
    if (open_label_ && size() > open_start_) {
      sentence_.spans.push_back({open_start_, size(), *open_label_});
    }
    open_label_.reset();
  }

  void Flush(TokenizedCorpus &corpus) {
    Close();
    if (!sentence_.tokens.empty()) corpus.sentences.push_back(std::move(sentence_));
    sentence_ = {};
  }

 private:
  TokenizedSentence sentence_;
  std::optional<std::string> open_label_;
  int open_start_ = 0;
};

TokenizedCorpus ParseConll(std::string_view text, const std::string &source) {
  TokenizedCorpus corpus;
  SentenceBuilder builder;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (IsBlank(lines[i])) {
      builder.Flush(corpus);
      continue;
    }
    if (lines[i].starts_with("-DOCSTART-") || lines[i].starts_with("#")) continue;
    std::vector<std::string> cols = Columns(lines[i]);
    if (cols.size() < 2) {
      throw RowError(ErrorCode::kParse, source, line_no,
                     "expected a token and a tag column");
    }
    const std::string &tag = cols.back();
    if (tag == "O") {
      builder.Close();
      builder.AddToken(cols.front());
      continue;
    }
    if (tag.size() < 3 || tag[1] != '-' ||
        std::string_view("BIES").find(tag[0]) == std::string_view::npos) {
      throw RowError(ErrorCode::kParse, source, line_no,
                     "malformed tag '" + tag + "'");
    }
    const char prefix = tag[0];
    std::string label = tag.substr(2);
    const bool continues =
        (prefix == 'I' || prefix == 'E') && builder.open() &&
        builder.open_label() == label;
    if (!continues) builder.Open(label);
    builder.AddToken(cols.front());
    if (prefix == 'E' || prefix == 'S') builder.Close();
  }
  builder.Flush(corpus);
  return corpus;
}

TokenizedCorpus ParseOntoNotes(std::string_view text,
                               const std::string &source) {
  constexpr std::size_t kWordColumn = 3;
  constexpr std::size_t kEntityColumn = 10;
  TokenizedCorpus corpus;
  SentenceBuilder builder;
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    if (IsBlank(lines[i])) {
      builder.Flush(corpus);
      continue;
    }
    if (lines[i].starts_with("#")) continue;
    std::vector<std::string> cols = Columns(lines[i]);
    if (cols.size() <= kEntityColumn) {
      throw RowError(ErrorCode::kParse, source, line_no,
                     "expected at least 11 CoNLL-2012 columns");
    }
    const std::string &ne = cols[kEntityColumn];
    if (ne.starts_with("(")) {
      const std::size_t label_end = ne.find_first_of("*)");
      if (label_end == std::string::npos || label_end == 1) {
        throw RowError(ErrorCode::kParse, source, line_no,
                       "malformed entity cell '" + ne + "'");
      }
      builder.Open(ne.substr(1, label_end - 1));
    } else if (ne != "*" && ne != "*)") {
      throw RowError(ErrorCode::kParse, source, line_no,
                     "malformed entity cell '" + ne + "'");
    }
    builder.AddToken(cols[kWordColumn]);
    if (ne.ends_with(")")) {
      if (!builder.open()) {
        throw RowError(ErrorCode::kParse, source, line_no,
                       "entity closed without being opened");
      }
      builder.Close();
    }
  }
  builder.Flush(corpus);
  return corpus;
}

// PubTator text tokenization: runs of alphanumerics (and non-ASCII bytes)
// are tokens, every other non-space character is a token on its own.
struct OffsetToken {
  std::string text;
  std::size_t begin;
  std::size_t end;
};

std::vector<OffsetToken> TokenizeWithOffsets(std::string_view text) {
  auto is_word = [](unsigned char c) { return std::isalnum(c) || c >= 0x80; };
  std::vector<OffsetToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (is_word(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
      tokens.push_back({std::string(text.substr(i, j - i)), i, j});
      i = j;
    } else {
      tokens.push_back({std::string(1, text[i]), i, i + 1});
      ++i;
    }
  }
  return tokens;
}

struct PubTatorMention {
  std::size_t begin;
  std::size_t end;
  std::string label;
};

void EmitPubTatorDocument(const std::string &title, const std::string &abstract,
                          std::vector<PubTatorMention> mentions,
                          TokenizedCorpus &corpus) {
  const std::string text = title + " " + abstract;
  const std::vector<OffsetToken> tokens = TokenizeWithOffsets(text);
  // Sentence boundaries after . ? ! when followed by an uppercase token or
  // the end of the document.
  std::vector<std::size_t> sentence_of(tokens.size());
  std::vector<std::size_t> sentence_start{0};
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    sentence_of[t] = sentence_start.size() - 1;
    const std::string &tok = tokens[t].text;
    const bool terminal = tok == "." || tok == "?" || tok == "!";
    const bool next_upper =
        t + 1 < tokens.size() &&
        std::isupper(static_cast<unsigned char>(tokens[t + 1].text[0]));
    if (terminal && next_upper) sentence_start.push_back(t + 1);
  }
  std::vector<TokenizedSentence> sentences(sentence_start.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    sentences[sentence_of[t]].tokens.push_back(tokens[t].text);
  }
  std::sort(mentions.begin(), mentions.end(),
            [](const PubTatorMention &a, const PubTatorMention &b) {
              return std::tie(a.begin, b.end) < std::tie(b.begin, a.end);
            });
  for (const PubTatorMention &m : mentions) {
    std::size_t first = tokens.size();
    std::size_t last = 0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].begin < m.end && m.begin < tokens[t].end) {
        first = std::min(first, t);
        last = std::max(last, t);
      }
    }
    if (first == tokens.size() || sentence_of[first] != sentence_of[last]) {
      continue;
    }
    const std::size_t s = sentence_of[first];
    const int start = static_cast<int>(first - sentence_start[s]);
    const int end = static_cast<int>(last - sentence_start[s] + 1);
    const TokenRange range{start, end};
    auto &spans = sentences[s].spans;
    // Nested or crossing annotations keep the earliest, longest mention.
    const bool clash = std::any_of(spans.begin(), spans.end(), [&](const Span &x) {
      return x.range().Overlaps(range);
    });
    if (!clash) spans.push_back({start, end, m.label});
  }
  for (TokenizedSentence &sentence : sentences) {
    std::sort(sentence.spans.begin(), sentence.spans.end(),
              [](const Span &a, const Span &b) { return a.start < b.start; });
    if (!sentence.tokens.empty()) corpus.sentences.push_back(std::move(sentence));
  }
}

TokenizedCorpus ParsePubTator(std::string_view text, const std::string &source) {
  TokenizedCorpus corpus;
  std::string title;
  std::string abstract;
  std::vector<PubTatorMention> mentions;
  bool in_document = false;
  auto flush = [&] {
    if (in_document) EmitPubTatorDocument(title, abstract, std::move(mentions), corpus);
    title.clear();
    abstract.clear();
    mentions.clear();
    in_document = false;
  };
  const auto lines = SplitLines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    std::string_view line = lines[i];
    if (IsBlank(line)) {
      flush();
      continue;
    }
    in_document = true;
    if (auto pos = line.find("|t|"); pos != std::string_view::npos) {
      title = std::string(line.substr(pos + 3));
      continue;
    }
    if (auto pos = line.find("|a|"); pos != std::string_view::npos) {
      abstract = std::string(line.substr(pos + 3));
      continue;
    }
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      fields.emplace_back(line.substr(pos, tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (fields.size() < 5) {
      throw RowError(ErrorCode::kParse, source, line_no,
                     "annotation line needs pmid, start, end, mention, type");
    }
    try {
      const std::size_t begin = std::stoul(fields[1]);
      const std::size_t end = std::stoul(fields[2]);
      if (begin >= end) {
        throw RowError(ErrorCode::kSchema, source, line_no, "start >= end");
      }
      std::string label = fields[4].substr(0, fields[4].find(','));
      mentions.push_back({begin, end, std::move(label)});
    } catch (const std::logic_error &) {
      throw RowError(ErrorCode::kParse, source, line_no, "bad mention offsets");
    }
  }
  flush();
  return corpus;
}

TokenRange PositionsToRange(const Json &positions) {
  if (!positions.is_array() || positions.empty()) {
    throw Error(ErrorCode::kSchema, "entity positions must be a non-empty array");
  }
  int lo = std::numeric_limits<int>::max();
  int hi = -1;
  for (const Json &p : positions) {
    const int v = p.get<int>();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi + 1};
}

std::vector<std::string> TokensOf(const Json &row) {
  return row.at("tokens").get<std::vector<std::string>>();
}

TokenizedCorpus ParseFewRel(std::string_view text, const std::string &source) {
  const Json json = ParseWholeJson(text, source);
  TokenizedCorpus corpus;
  try {
    if (!json.is_object()) {
      throw Error(ErrorCode::kSchema, "FewRel input must map relations to instances");
    }
    for (const auto &[relation, instances] : json.items()) {
      for (const Json &inst : instances) {
        TokenizedSentence sentence;
        sentence.tokens = TokensOf(inst);
        // "h"/"t": [surface, id, [[positions of mention 1], ...]]
        sentence.relation = RelationInstance{
            PositionsToRange(inst.at("h").at(2).at(0)),
            PositionsToRange(inst.at("t").at(2).at(0)), relation};
        ValidateSentence(sentence);
        corpus.sentences.push_back(std::move(sentence));
      }
    }
  } catch (const Json::exception &e) {
    throw RowError(ErrorCode::kSchema, source, 0, e.what());
  } catch (const Error &e) {
    throw RowError(ErrorCode::kSchema, source, 0, e.what());
  }
  return corpus;
}

TokenizedCorpus ParseWikiZs(std::string_view text, const std::string &source) {
  const Json json = ParseWholeJson(text, source);
  TokenizedCorpus corpus;
  try {
    if (!json.is_array()) {
      throw Error(ErrorCode::kSchema, "WikiZS input must be an array");
    }
    for (const Json &row : json) {
      const std::vector<std::string> tokens = TokensOf(row);
      for (const Json &edge : row.at("edgeSet")) {
        TokenizedSentence sentence;
        sentence.tokens = tokens;
        sentence.relation = RelationInstance{PositionsToRange(edge.at("left")),
                                             PositionsToRange(edge.at("right")),
                                             edge.at("kbID").get<std::string>()};
        ValidateSentence(sentence);
        corpus.sentences.push_back(std::move(sentence));
      }
    }
  } catch (const Json::exception &e) {
    throw RowError(ErrorCode::kSchema, source, 0, e.what());
  } catch (const Error &e) {
    throw RowError(ErrorCode::kSchema, source, 0, e.what());
  }
  return corpus;
}

}  // namespace

TokenizedCorpus ParseCorpus(std::string_view text, CorpusFormat format,
                            Split split, std::string name,
                            const std::string &source) {
  if (IsBlank(text)) throw RowError(ErrorCode::kParse, source, 0, "empty file");
  TokenizedCorpus corpus;
  switch (format) {
    case CorpusFormat::kJsonl: corpus = ParseJsonl(text, source); break;
    case CorpusFormat::kConll: corpus = ParseConll(text, source); break;
    case CorpusFormat::kOntoNotes: corpus = ParseOntoNotes(text, source); break;
    case CorpusFormat::kPubTator: corpus = ParsePubTator(text, source); break;
    case CorpusFormat::kFewRel: corpus = ParseFewRel(text, source); break;
    case CorpusFormat::kWikiZs: corpus = ParseWikiZs(text, source); break;
  }
  CheckNonEmpty(corpus, source);
  corpus.name = std::move(name);
  corpus.split = split;
  return corpus;
}

TokenizedCorpus LoadCorpus(const std::filesystem::path &path,
                           CorpusFormat format, Split split, std::string name) {
  if (name.empty()) name = path.stem().string();
  return ParseCorpus(ReadFile(path), format, split, std::move(name),
                     path.string());
}

std::string CorpusToJsonl(const TokenizedCorpus &corpus) {
  std::string out;
  for (const TokenizedSentence &sentence : corpus.sentences) {
    out += SentenceToJson(sentence).dump();
    out.push_back('\n');
  }
  return out;
}

void SaveCorpus(const TokenizedCorpus &corpus,
                const std::filesystem::path &path) {
  WriteFileAtomic(path, CorpusToJsonl(corpus));
}

// ---------------------------------------------------------------------------
// Descriptions

const std::string *DescriptionFile::Find(std::string_view class_id) const {
  for (const auto &[id, text] : entries) {
    if (id == class_id) return &text;
  }
  return nullptr;
}

void DescriptionFile::CheckCovers(
    const std::vector<std::string> &class_ids) const {
  for (const std::string &id : class_ids) {
    if (Find(id) == nullptr) {
      throw Error(ErrorCode::kSchema, "no description for class '" + id + "'");
    }
  }
}

TaskSpec DescriptionFile::ToTaskSpec(
    const std::vector<std::string> &class_ids) const {
  std::vector<std::string> ids = class_ids;
  if (ids.empty()) {
    for (const auto &[id, text] : entries) ids.push_back(id);
  }
  CheckCovers(ids);
  std::vector<LabelClass> classes;
  for (const std::string &id : ids) classes.push_back({id, id, *Find(id), kind});
  return kind == TaskKind::kEntity ? TaskSpec::Entities(std::move(classes))
                                   : TaskSpec::Relations(std::move(classes));
}

DescriptionFile ParseDescriptions(std::string_view text, TaskKind kind,
                                  const std::string &source) {
  if (IsBlank(text)) throw RowError(ErrorCode::kParse, source, 0, "empty file");
  const Json json = ParseWholeJson(text, source);
  if (!json.is_object()) {
    throw RowError(ErrorCode::kSchema, source, 0,
                   "descriptions must be a JSON object {class_id: text}");
  }
  DescriptionFile file;
  file.kind = kind;
  for (const auto &[id, value] : json.items()) {
    if (!value.is_string() || value.get<std::string>().empty()) {
      throw RowError(ErrorCode::kSchema, source, 0,
                     "description of '" + id + "' must be a non-empty string");
    }
    file.entries.emplace_back(id, value.get<std::string>());
  }
  if (file.entries.empty()) {
    throw RowError(ErrorCode::kSchema, source, 0, "no descriptions");
  }
  return file;
}

DescriptionFile LoadDescriptions(const std::filesystem::path &path,
                                 TaskKind kind) {
  return ParseDescriptions(ReadFile(path), kind, path.string());
}

}  // namespace descboost
