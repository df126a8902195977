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

// Domain types shared by every stage of the description-boosting engine:
// label classes and task specs, tokenized corpora, per-class probability
// vectors, and the prediction sets produced by one pipeline (one assignment
// of descriptions to classes).
//
// Probability vectors always index into TaskSpec class order. For entity
// tasks the negative "O" class is fixed at index 0.

#ifndef DESCBOOST_CORE_H_
#define DESCBOOST_CORE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace descboost {

enum class TaskKind { kEntity, kRelation };
enum class Split { kTrain, kValidation, kTest };

std::string_view TaskKindName(TaskKind kind);
TaskKind ParseTaskKind(std::string_view name);
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);
inline constexpr Split kAllSplits[] = {Split::kTrain, Split::kValidation,
                                       Split::kTest};

inline constexpr std::string_view kOutsideClassId = "O";
inline constexpr std::string_view kOutsideDescription =
    "Tokens that do not belong to any named entity.";

struct LabelClass {
  std::string id;
  std::string name;
  std::string description;
  TaskKind kind = TaskKind::kEntity;

  bool operator==(const LabelClass &) const = default;
};

// Throws Error(kSchema) on an empty id or description.
void ValidateLabelClass(const LabelClass &cls);

// Ordered class inventory of one classification task. Immutable.
class TaskSpec {
 public:
  // Prepends the O class at index 0.
  static TaskSpec Entities(std::vector<LabelClass> classes);
  // When `negative` is given it is placed at index 0.
  static TaskSpec Relations(std::vector<LabelClass> classes,
                            std::optional<LabelClass> negative = {});

  TaskKind kind() const { return kind_; }
  bool includes_negative() const { return includes_negative_; }
  const std::vector<LabelClass> &classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  const LabelClass &at(std::size_t index) const { return classes_.at(index); }

  // Index of the first non-negative class.
  std::size_t first_positive() const { return includes_negative_ ? 1 : 0; }
  std::vector<std::string> class_ids() const;
  std::optional<std::size_t> IndexOf(std::string_view id) const;
  // Throws Error(kUnknownClass).
  std::size_t IndexOrThrow(std::string_view id) const;

  // Copy with one class's description replaced. Throws on unknown id or
  // empty description.
  TaskSpec WithDescription(std::string_view class_id,
                           std::string description) const;

  bool operator==(const TaskSpec &) const = default;

 private:
  TaskSpec(TaskKind kind, std::vector<LabelClass> classes,
           bool includes_negative);

  TaskKind kind_;
  std::vector<LabelClass> classes_;
  bool includes_negative_;
};

struct TokenRange {
  int start = 0;
  int end = 0;  // exclusive

  int length() const { return end - start; }
  bool Contains(const TokenRange &other) const {
    return start <= other.start && other.end <= end;
  }
  bool Overlaps(const TokenRange &other) const {
    return start < other.end && other.start < end;
  }
  auto operator<=>(const TokenRange &) const = default;
};

struct Span {
  int start = 0;
  int end = 0;  // exclusive
  std::string label;

  TokenRange range() const { return {start, end}; }
  bool operator==(const Span &) const = default;
};

struct RelationInstance {
  TokenRange head;
  TokenRange tail;
  std::string relation;

  bool operator==(const RelationInstance &) const = default;
};

struct TokenizedSentence {
  std::vector<std::string> tokens;
  std::vector<Span> spans;
  std::optional<RelationInstance> relation;

  bool operator==(const TokenizedSentence &) const = default;
};

// Throws Error(kSchema) when a span is out of bounds, empty, or overlaps
// another gold span.
void ValidateSentence(const TokenizedSentence &sentence);

struct TokenizedCorpus {
  std::string name;
  Split split = Split::kTest;
  std::vector<TokenizedSentence> sentences;

  bool operator==(const TokenizedCorpus &) const = default;
};

// Non-negative probabilities summing to one within 1e-4.
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-4;

  // Throws Error(kInvalidArgument) on an empty vector, a negative or
  // non-finite entry, or a sum outside tolerance.
  explicit ProbVector(std::vector<double> values);

  static ProbVector OneHot(std::size_t size, std::size_t index);
  static ProbVector Uniform(std::size_t size);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  // Lowest index wins ties.
  std::size_t ArgMax() const;

  bool operator==(const ProbVector &) const = default;

 private:
  std::vector<double> values_;
};

struct SpanAnnotation {
  int sentence_index = 0;
  int start = 0;
  int end = 0;  // exclusive
  std::string class_id;
  double score = 0.0;

  TokenRange range() const { return {start, end}; }
  bool operator==(const SpanAnnotation &) const = default;
};

// Merges maximal runs of tokens sharing the same non-O argmax class into one
// span scored by the mean winning probability over the run. `class_ids` is
// the TaskSpec order with O at index 0.
std::vector<SpanAnnotation> DecodeTokenPredictions(
    std::span<const ProbVector> probs,
    const std::vector<std::string> &class_ids, int sentence_index);

// The output of one pipeline over a corpus. Decoded spans (entities) or
// labels (relations) are derived from the probabilities at construction.
class PredictionSet {
 public:
  static PredictionSet ForEntities(
      std::string pipeline_id, std::vector<std::string> class_ids,
      std::vector<std::vector<ProbVector>> token_probs);
  static PredictionSet ForRelations(std::string pipeline_id,
                                    std::vector<std::string> class_ids,
                                    std::vector<ProbVector> instance_probs);

  TaskKind kind() const { return kind_; }
  const std::string &pipeline_id() const { return pipeline_id_; }
  const std::vector<std::string> &class_ids() const { return class_ids_; }
  std::size_t num_sentences() const;

  // Entity payload: one vector per token per sentence.
  const std::vector<std::vector<ProbVector>> &token_probs() const {
    return token_probs_;
  }
  // Relation payload: one vector per instance.
  const std::vector<ProbVector> &instance_probs() const {
    return instance_probs_;
  }

  const std::vector<std::vector<SpanAnnotation>> &decoded_spans() const {
    return decoded_spans_;
  }
  const std::vector<std::size_t> &decoded_labels() const {
    return decoded_labels_;
  }

  PredictionSet WithPipelineId(std::string pipeline_id) const;

  bool operator==(const PredictionSet &other) const;

 private:
  PredictionSet() = default;
  void Decode();

  TaskKind kind_ = TaskKind::kEntity;
  std::string pipeline_id_;
  std::vector<std::string> class_ids_;
  std::vector<std::vector<ProbVector>> token_probs_;
  std::vector<ProbVector> instance_probs_;
  std::vector<std::vector<SpanAnnotation>> decoded_spans_;
  std::vector<std::size_t> decoded_labels_;
};

}  // namespace descboost

#endif  // DESCBOOST_CORE_H_
