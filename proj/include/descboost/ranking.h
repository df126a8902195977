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

// Unsupervised description ranking: the description under which the model's
// class distributions over the corpus have the lowest mean entropy wins.

#ifndef DESCBOOST_RANKING_H_
#define DESCBOOST_RANKING_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "descboost/core.h"
#include "descboost/inference.h"
#include "descboost/serialization.h"

namespace descboost {

// Shannon entropy in nats with 0 ln 0 = 0; divided by ln k when normalized
// (k >= 2 required).
double DistEntropy(std::span<const double> p, bool normalized);
inline double DistEntropy(const ProbVector &p, bool normalized) {
  return DistEntropy(p.values(), normalized);
}

struct CorpusEntropy {
  double value = 0.0;
  // Tokens (or instances) that entered the mean, per sentence.
  std::vector<std::size_t> mentions_per_sentence;
  // No token had a non-O argmax, so the mean covers every token.
  bool fell_back_to_all_tokens = false;
};

// Entity sets: mean entropy over tokens whose argmax is not O (all tokens if
// there are none). Relation sets: mean over instances.
CorpusEntropy ComputeCorpusEntropy(const PredictionSet &ps, bool normalized);

struct EntropyReport {
  std::string class_id;
  std::string description;
  std::vector<std::size_t> mentions_per_sentence;
  double corpus_entropy = 0.0;
  bool normalized = true;
  bool fell_back_to_all_tokens = false;
  // Set when prediction failed for this candidate; such reports sort last.
  std::optional<std::string> error;

  Json ToJson() const;
};

Json EntropyReportsToJson(const std::vector<EntropyReport> &reports);

// Scores each candidate with only `class_id`'s description replaced and
// returns the reports sorted by ascending entropy, then shorter description,
// then lexicographic order. Failed candidates are kept, ranked last.
std::vector<EntropyReport> RankDescriptions(
    const std::string &class_id, const std::vector<std::string> &candidates,
    const TokenizedCorpus &corpus, const TaskSpec &spec,
    const Predictor &predictor, bool normalized = true,
    const std::string &pipeline_prefix = "rank");

// Sorts reports in ranking order.
void SortReports(std::vector<EntropyReport> &reports);

// Description of the best successful report. Throws Error(kEmptyCandidates).
std::string SelectMinEntropy(const std::vector<EntropyReport> &reports);

}  // namespace descboost

#endif  // DESCBOOST_RANKING_H_
