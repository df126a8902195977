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

#include "descboost/core.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "descboost/error.h"

namespace descboost {

std::string_view TaskKindName(TaskKind kind) {
  return kind == TaskKind::kEntity ? "entity" : "relation";
}

TaskKind ParseTaskKind(std::string_view name) {
  if (name == "entity") return TaskKind::kEntity;
  if (name == "relation") return TaskKind::kRelation;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown task kind '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "test";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "val" || name == "dev") {
    return Split::kValidation;
  }
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown split '" + std::string(name) + "'");
}

void ValidateLabelClass(const LabelClass &cls) {
  if (cls.id.empty()) {
    throw Error(ErrorCode::kSchema, "label class with empty id");
  }
  if (cls.description.empty()) {
    throw Error(ErrorCode::kSchema,
                "label class '" + cls.id + "' has an empty description");
  }
}

// ---------------------------------------------------------------------------
// TaskSpec

TaskSpec::TaskSpec(TaskKind kind, std::vector<LabelClass> classes,
                   bool includes_negative)
    : kind_(kind),
      classes_(std::move(classes)),
      includes_negative_(includes_negative) {
  std::set<std::string_view> seen;
  for (const LabelClass &cls : classes_) {
    ValidateLabelClass(cls);
    if (!seen.insert(cls.id).second) {
      throw Error(ErrorCode::kSchema, "duplicate class id '" + cls.id + "'");
    }
  }
  if (classes_.empty()) {
    throw Error(ErrorCode::kSchema, "task spec without classes");
  }
}

TaskSpec TaskSpec::Entities(std::vector<LabelClass> classes) {
  std::vector<LabelClass> all;
  all.reserve(classes.size() + 1);
  all.push_back({std::string(kOutsideClassId), std::string(kOutsideClassId),
                 std::string(kOutsideDescription), TaskKind::kEntity});
  for (LabelClass &cls : classes) {
    if (cls.id == kOutsideClassId) {
      throw Error(ErrorCode::kSchema, "the O class is implicit");
    }
    cls.kind = TaskKind::kEntity;
    all.push_back(std::move(cls));
  }
  return TaskSpec(TaskKind::kEntity, std::move(all), true);
}

TaskSpec TaskSpec::Relations(std::vector<LabelClass> classes,
                             std::optional<LabelClass> negative) {
  std::vector<LabelClass> all;
  all.reserve(classes.size() + 1);
  if (negative) {
    negative->kind = TaskKind::kRelation;
    all.push_back(std::move(*negative));
  }
  for (LabelClass &cls : classes) {
    cls.kind = TaskKind::kRelation;
    all.push_back(std::move(cls));
  }
  return TaskSpec(TaskKind::kRelation, std::move(all), negative.has_value());
}

std::vector<std::string> TaskSpec::class_ids() const {
  std::vector<std::string> ids;
  ids.reserve(classes_.size());
  for (const LabelClass &cls : classes_) ids.push_back(cls.id);
  return ids;
}

std::optional<std::size_t> TaskSpec::IndexOf(std::string_view id) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t TaskSpec::IndexOrThrow(std::string_view id) const {
  if (auto index = IndexOf(id)) return *index;
  throw Error(ErrorCode::kUnknownClass,
              "class '" + std::string(id) + "' is not part of the task");
}

TaskSpec TaskSpec::WithDescription(std::string_view class_id,
                                   std::string description) const {
  TaskSpec copy = *this;
  LabelClass &cls = copy.classes_[IndexOrThrow(class_id)];
  cls.description = std::move(description);
  ValidateLabelClass(cls);
  return copy;
}

// ---------------------------------------------------------------------------
// Sentences

void ValidateSentence(const TokenizedSentence &sentence) {
  const int n = static_cast<int>(sentence.tokens.size());
  auto check_range = [n](const TokenRange &r, std::string_view what) {
    if (r.start < 0 || r.start >= r.end || r.end > n) {
      throw Error(ErrorCode::kSchema,
                  std::string(what) + " [" + std::to_string(r.start) + "," +
                      std::to_string(r.end) + ") invalid for " +
                      std::to_string(n) + " tokens");
    }
  };
  std::vector<TokenRange> ranges;
  for (const Span &span : sentence.spans) {
    check_range(span.range(), "span");
    if (span.label.empty()) throw Error(ErrorCode::kSchema, "unlabeled span");
    ranges.push_back(span.range());
  }
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i - 1].Overlaps(ranges[i])) {
      throw Error(ErrorCode::kSchema, "overlapping gold spans");
    }
  }
  if (sentence.relation) {
    check_range(sentence.relation->head, "head");
    check_range(sentence.relation->tail, "tail");
    if (sentence.relation->relation.empty()) {
      throw Error(ErrorCode::kSchema, "relation instance without label");
    }
  }
}

// ---------------------------------------------------------------------------
// ProbVector

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty probability vector");
  }
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "probability entry is negative or not finite");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "probabilities sum to " + std::to_string(sum));
  }
}

ProbVector ProbVector::OneHot(std::size_t size, std::size_t index) {
  std::vector<double> values(size, 0.0);
  values.at(index) = 1.0;
  return ProbVector(std::move(values));
}

ProbVector ProbVector::Uniform(std::size_t size) {
  return ProbVector(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

std::size_t ProbVector::ArgMax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (values_[i] > values_[best]) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Decoding

std::vector<SpanAnnotation> DecodeTokenPredictions(
    std::span<const ProbVector> probs,
    const std::vector<std::string> &class_ids, int sentence_index) {
  std::vector<SpanAnnotation> spans;
  std::size_t i = 0;
  while (i < probs.size()) {
    const std::size_t label = probs[i].ArgMax();
    std::size_t j = i + 1;
    while (j < probs.size() && probs[j].ArgMax() == label) ++j;
    if (label != 0) {
      double sum = 0.0;
      for (std::size_t t = i; t < j; ++t) sum += probs[t][label];
      spans.push_back({sentence_index, static_cast<int>(i),
                       static_cast<int>(j), class_ids.at(label),
                       sum / static_cast<double>(j - i)});
    }
    i = j;
  }
  return spans;
}

// ---------------------------------------------------------------------------
// PredictionSet

namespace {

void CheckWidth(const ProbVector &p, std::size_t width) {
  if (p.size() != width) {
    throw Error(ErrorCode::kShape,
                "probability vector of length " + std::to_string(p.size()) +
                    ", expected " + std::to_string(width));
  }
}

}  // namespace

PredictionSet PredictionSet::ForEntities(
    std::string pipeline_id, std::vector<std::string> class_ids,
    std::vector<std::vector<ProbVector>> token_probs) {
  PredictionSet ps;
  ps.kind_ = TaskKind::kEntity;
  ps.pipeline_id_ = std::move(pipeline_id);
  ps.class_ids_ = std::move(class_ids);
  ps.token_probs_ = std::move(token_probs);
  for (const auto &sentence : ps.token_probs_) {
    for (const ProbVector &p : sentence) CheckWidth(p, ps.class_ids_.size());
  }
  ps.Decode();
  return ps;
}

PredictionSet PredictionSet::ForRelations(
    std::string pipeline_id, std::vector<std::string> class_ids,
    std::vector<ProbVector> instance_probs) {
  PredictionSet ps;
  ps.kind_ = TaskKind::kRelation;
  ps.pipeline_id_ = std::move(pipeline_id);
  ps.class_ids_ = std::move(class_ids);
  ps.instance_probs_ = std::move(instance_probs);
  for (const ProbVector &p : ps.instance_probs_) {
    CheckWidth(p, ps.class_ids_.size());
  }
  ps.Decode();
  return ps;
}

std::size_t PredictionSet::num_sentences() const {
  return kind_ == TaskKind::kEntity ? token_probs_.size()
                                    : instance_probs_.size();
}

void PredictionSet::Decode() {
  decoded_spans_.clear();
  decoded_labels_.clear();
  if (kind_ == TaskKind::kEntity) {
    decoded_spans_.reserve(token_probs_.size());
    for (std::size_t s = 0; s < token_probs_.size(); ++s) {
      decoded_spans_.push_back(DecodeTokenPredictions(
          token_probs_[s], class_ids_, static_cast<int>(s)));
    }
  } else {
    decoded_labels_.reserve(instance_probs_.size());
    for (const ProbVector &p : instance_probs_) {
      decoded_labels_.push_back(p.ArgMax());
    }
  }
}

PredictionSet PredictionSet::WithPipelineId(std::string pipeline_id) const {
  PredictionSet copy = *this;
  copy.pipeline_id_ = std::move(pipeline_id);
  return copy;
}

bool PredictionSet::operator==(const PredictionSet &other) const {
  return kind_ == other.kind_ && pipeline_id_ == other.pipeline_id_ &&
         class_ids_ == other.class_ids_ &&
         token_probs_ == other.token_probs_ &&
         instance_probs_ == other.instance_probs_;
}

}  // namespace descboost
