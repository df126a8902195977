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

// Corpus loading, description files, and zero-shot dataset conversion.
//
// A zero-shot dataset assigns each split a disjoint set of classes. The
// conversion relabels mentions of classes foreign to their split as O (or
// drops foreign relation instances) and then removes sentences left without
// any label. The O class is implicit and never counted as a class.

#ifndef DESCBOOST_DATASETS_H_
#define DESCBOOST_DATASETS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "descboost/core.h"
#include "descboost/serialization.h"

namespace descboost {

using SplitClassMap = std::map<Split, std::set<std::string>>;

struct RawDataset {
  TaskKind kind = TaskKind::kEntity;
  std::map<Split, std::vector<TokenizedSentence>> splits;
  std::map<Split, std::set<std::string>> label_inventory;

  void RecomputeInventory();
  bool operator==(const RawDataset &) const = default;
};

// Labels occurring in one sentence: span labels plus the relation label.
std::vector<std::string> SentenceLabels(const TokenizedSentence &sentence);

struct SplitConversionCounts {
  std::size_t sentences_before = 0;
  std::size_t sentences_after = 0;
  std::size_t sentences_removed = 0;
  std::map<std::string, std::size_t> mentions_before;
  std::map<std::string, std::size_t> mentions_after;
};

struct ConversionReport {
  TaskKind kind = TaskKind::kEntity;
  std::map<Split, SplitConversionCounts> splits;
  // Seed of the random relation splitter, when it produced the class map.
  std::optional<std::uint64_t> split_seed;

  Json ToJson() const;
};

struct ConversionResult {
  RawDataset dataset;
  ConversionReport report;
};

// Throws Error(kUnknownClass) if a label belongs to no split's class set and
// Error(kInvalidArgument) if two splits share a class.
ConversionResult ZeroShotConvert(const RawDataset &raw,
                                 const SplitClassMap &split_classes);

// Seeded partition of relation ids into disjoint per-split class sets of the
// requested sizes. The shuffle uses StableHasher draws so results do not
// depend on the standard library.
SplitClassMap RandomClassSplit(std::vector<std::string> class_ids,
                               const std::map<Split, std::size_t> &counts,
                               std::uint64_t seed);

// Parses {"train":[...], "validation":[...], "test":[...]}. Split names also
// accept "val" and "dev".
SplitClassMap SplitClassMapFromJson(const Json &json);
Json SplitClassMapToJson(const SplitClassMap &map);

struct MinMeanMax {
  double mean = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
};

struct StatsReport {
  std::size_t sentences = 0;
  std::map<std::string, std::size_t> mention_counts;
  MinMeanMax tokens_per_sentence;
  MinMeanMax entities_per_sentence;

  Json ToJson() const;
};

StatsReport SplitStats(const TokenizedCorpus &corpus);

enum class CorpusFormat {
  kJsonl,      // normalized interchange format
  kConll,      // token ... BIO-tag columns, blank line between sentences
  kOntoNotes,  // CoNLL-2012 columns with bracketed named-entity column
  kPubTator,   // MedMentions PubTator documents
  kFewRel,     // {"P123": [{"tokens", "h", "t"}, ...], ...}
  kWikiZs,     // [{"tokens", "edgeSet": [{"left", "right", "kbID"}]}, ...]
};

CorpusFormat ParseCorpusFormat(std::string_view name);
std::string_view CorpusFormatExtension(CorpusFormat format);

// Throws RowError(kParse / kSchema) with the offending line, or Error(kIo).
TokenizedCorpus LoadCorpus(const std::filesystem::path &path,
                           CorpusFormat format, Split split,
                           std::string name = "");
// Same parsers over in-memory text; `source` names the input in errors.
TokenizedCorpus ParseCorpus(std::string_view text, CorpusFormat format,
                            Split split, std::string name,
                            const std::string &source);

std::string CorpusToJsonl(const TokenizedCorpus &corpus);
void SaveCorpus(const TokenizedCorpus &corpus,
                const std::filesystem::path &path);

// Class descriptions keyed by class id, in file order.
struct DescriptionFile {
  TaskKind kind = TaskKind::kEntity;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string *Find(std::string_view class_id) const;
  // Throws Error(kSchema) naming the first class without a description.
  void CheckCovers(const std::vector<std::string> &class_ids) const;
  // Spec over `class_ids` in the given order (all entries when empty).
  TaskSpec ToTaskSpec(const std::vector<std::string> &class_ids = {}) const;
};

// Throws RowError on malformed JSON, Error(kSchema) on empty descriptions.
DescriptionFile LoadDescriptions(const std::filesystem::path &path,
                                 TaskKind kind);
DescriptionFile ParseDescriptions(std::string_view text, TaskKind kind,
                                  const std::string &source);

}  // namespace descboost

#endif  // DESCBOOST_DATASETS_H_
