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

// Ensembling of pipelines that differ only in their class descriptions.
//
// Entities are combined by span voting. Every span decoded by some pipeline
// is a candidate; a pipeline votes for (span s, class e) when it decoded at
// least one span of class e inside s, and contributes at most one vote per
// cell. Candidates are resolved longest first: the winning class of an
// unblocked span is emitted if it has enough votes, and every candidate
// overlapping an emitted span is dropped.
//
// Relations are combined by plurality over per-pipeline argmax labels.

#ifndef DESCBOOST_ENSEMBLE_H_
#define DESCBOOST_ENSEMBLE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "descboost/core.h"

namespace descboost {

enum class TieBreak { kLowestClassIndex, kHighestMeanScore };

std::string_view TieBreakName(TieBreak tie_break);
TieBreak ParseTieBreak(std::string_view name);

struct EnsembleConfig {
  int min_votes = 1;
  TieBreak tie_break = TieBreak::kHighestMeanScore;

  void Validate() const;
};

struct VoteCell {
  std::size_t votes = 0;
  // Mean over voting pipelines of the mean score of their contained spans.
  double mean_score = 0.0;
};

// Candidate span -> class index -> cell. Only non-zero cells are stored.
using SentenceVotes = std::map<TokenRange, std::map<std::size_t, VoteCell>>;
using VoteTable = std::vector<SentenceVotes>;

// Throws Error(kCorpusMismatch) when pipelines disagree on task, classes,
// sentence count, or token counts, and Error(kInvalidArgument) when empty.
VoteTable VoteCounts(std::span<const PredictionSet> pipelines);

// Emitted spans per sentence, sorted by start.
std::vector<std::vector<SpanAnnotation>> EnsembleEntities(
    std::span<const PredictionSet> pipelines, const EnsembleConfig &config);

// Winning class index per instance. Ties go to the highest mean predicted
// probability across pipelines, then the lowest class index.
std::vector<std::size_t> EnsembleRelations(
    std::span<const PredictionSet> pipelines, const EnsembleConfig &config);

}  // namespace descboost

#endif  // DESCBOOST_ENSEMBLE_H_
