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

#include "descboost/ranking.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "descboost/error.h"

namespace descboost {

double DistEntropy(std::span<const double> p, bool normalized) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  // Rounding can leave -0.0 or a tiny negative value for one-hot inputs.
  h = std::max(h, 0.0);
  if (!normalized) return h;
  if (p.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "normalized entropy needs at least two classes");
  }
  return std::min(h / std::log(static_cast<double>(p.size())), 1.0);
}

CorpusEntropy ComputeCorpusEntropy(const PredictionSet &ps, bool normalized) {
  CorpusEntropy out;
  if (ps.num_sentences() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty prediction set");
  }
  double sum = 0.0;
  std::size_t count = 0;
  if (ps.kind() == TaskKind::kRelation) {
    for (const ProbVector &p : ps.instance_probs()) {
      sum += DistEntropy(p, normalized);
      out.mentions_per_sentence.push_back(1);
    }
    out.value = sum / static_cast<double>(ps.instance_probs().size());
    return out;
  }
  for (const auto &sentence : ps.token_probs()) {
    std::size_t mentions = 0;
    for (const ProbVector &p : sentence) {
      if (p.ArgMax() == 0) continue;
      sum += DistEntropy(p, normalized);
      ++mentions;
    }
    out.mentions_per_sentence.push_back(mentions);
    count += mentions;
  }
  if (count == 0) {
    out.fell_back_to_all_tokens = true;
    for (std::size_t s = 0; s < ps.token_probs().size(); ++s) {
      const auto &sentence = ps.token_probs()[s];
      for (const ProbVector &p : sentence) sum += DistEntropy(p, normalized);
      out.mentions_per_sentence[s] = sentence.size();
      count += sentence.size();
    }
  }
  out.value = count == 0 ? 0.0 : sum / static_cast<double>(count);
  return out;
}

Json EntropyReport::ToJson() const {
  Json out = {{"class_id", class_id},
              {"description", description},
              {"corpus_entropy", corpus_entropy},
              {"normalized", normalized},
              {"fell_back_to_all_tokens", fell_back_to_all_tokens},
              {"mentions_per_sentence", mentions_per_sentence}};
  out["error"] = error ? Json(*error) : Json(nullptr);
  return out;
}

Json EntropyReportsToJson(const std::vector<EntropyReport> &reports) {
  Json list = Json::array();
  for (const EntropyReport &r : reports) list.push_back(r.ToJson());
  return list;
}

void SortReports(std::vector<EntropyReport> &reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const EntropyReport &a, const EntropyReport &b) {
                     const bool a_failed = a.error.has_value();
                     const bool b_failed = b.error.has_value();
                     if (a_failed != b_failed) return b_failed;
                     if (!a_failed && a.corpus_entropy != b.corpus_entropy) {
                       return a.corpus_entropy < b.corpus_entropy;
                     }
                     return std::forward_as_tuple(a.description.size(), a.description) <
                            std::forward_as_tuple(b.description.size(), b.description);
                   });
}

std::vector<EntropyReport> RankDescriptions(
    const std::string &class_id, const std::vector<std::string> &candidates,
    const TokenizedCorpus &corpus, const TaskSpec &spec,
    const Predictor &predictor, bool normalized,
    const std::string &pipeline_prefix) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kEmptyCandidates, "no candidate descriptions");
  }
  spec.IndexOrThrow(class_id);
  std::vector<EntropyReport> reports;
  reports.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    EntropyReport report;
    report.class_id = class_id;
    report.description = candidates[i];
    report.normalized = normalized;
    try {
      const TaskSpec candidate_spec = spec.WithDescription(class_id, candidates[i]);
      const PredictionSet ps = predictor.Predict(
          corpus, candidate_spec,
          pipeline_prefix + "/" + class_id + "/" + std::to_string(i));
      CorpusEntropy entropy = ComputeCorpusEntropy(ps, normalized);
      report.corpus_entropy = entropy.value;
      report.mentions_per_sentence = std::move(entropy.mentions_per_sentence);
      report.fell_back_to_all_tokens = entropy.fell_back_to_all_tokens;
    } catch (const std::exception &e) {
      report.error = e.what();
    }
    reports.push_back(std::move(report));
  }
  SortReports(reports);
  return reports;
}

std::string SelectMinEntropy(const std::vector<EntropyReport> &reports) {
  for (const EntropyReport &r : reports) {
    if (!r.error) return r.description;
  }
  throw Error(ErrorCode::kEmptyCandidates,
              reports.empty() ? "no entropy reports" : "every candidate failed");
}

}  // namespace descboost
