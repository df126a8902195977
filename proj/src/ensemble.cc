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

#include "descboost/ensemble.h"

#include <algorithm>
#include <numeric>

#include "descboost/error.h"

namespace descboost {

std::string_view TieBreakName(TieBreak tie_break) {
  return tie_break == TieBreak::kLowestClassIndex ? "lowest_class_index"
                                                  : "highest_mean_score";
}

TieBreak ParseTieBreak(std::string_view name) {
  if (name == "lowest_class_index") return TieBreak::kLowestClassIndex;
  if (name == "highest_mean_score") return TieBreak::kHighestMeanScore;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown tie break '" + std::string(name) + "'");
}

void EnsembleConfig::Validate() const {
  if (min_votes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "min_votes must be at least 1");
  }
}

namespace {

void CheckCompatible(std::span<const PredictionSet> pipelines) {
  if (pipelines.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ensemble needs at least one pipeline");
  }
  const PredictionSet &first = pipelines.front();
  for (const PredictionSet &ps : pipelines.subspan(1)) {
    auto mismatch = [&](const std::string &what) {
      throw Error(ErrorCode::kCorpusMismatch,
                  "pipeline '" + ps.pipeline_id() + "' differs from '" +
                      first.pipeline_id() + "' in " + what);
    };
    if (ps.kind() != first.kind()) mismatch("task kind");
    if (ps.class_ids() != first.class_ids()) mismatch("class order");
    if (ps.num_sentences() != first.num_sentences()) mismatch("sentence count");
    if (ps.kind() == TaskKind::kEntity) {
      for (std::size_t s = 0; s < ps.num_sentences(); ++s) {
        if (ps.token_probs()[s].size() != first.token_probs()[s].size()) {
          mismatch("token count of sentence " + std::to_string(s));
        }
      }
    }
  }
}

// Sum in ascending order so the result does not depend on pipeline order.
double OrderFreeMean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

struct IndexedSpan {
  TokenRange range;
  std::size_t label;
  double score;
};

SentenceVotes SentenceVoteCounts(std::span<const PredictionSet> pipelines,
                                 std::size_t sentence) {
  const std::vector<std::string> &class_ids = pipelines.front().class_ids();
  auto index_of = [&](const std::string &id) {
    return static_cast<std::size_t>(
        std::find(class_ids.begin(), class_ids.end(), id) - class_ids.begin());
  };
  std::vector<std::vector<IndexedSpan>> spans(pipelines.size());
  std::vector<TokenRange> candidates;
  for (std::size_t p = 0; p < pipelines.size(); ++p) {
    for (const SpanAnnotation &a : pipelines[p].decoded_spans()[sentence]) {
      spans[p].push_back({a.range(), index_of(a.class_id), a.score});
      candidates.push_back(a.range());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  SentenceVotes votes;
  for (const TokenRange &candidate : candidates) {
    std::map<std::size_t, std::vector<double>> contributions;
    for (const auto &pipeline_spans : spans) {
      std::map<std::size_t, std::vector<double>> inside;
      for (const IndexedSpan &s : pipeline_spans) {
        if (candidate.Contains(s.range)) inside[s.label].push_back(s.score);
      }
      for (auto &[label, scores] : inside) {
        contributions[label].push_back(OrderFreeMean(std::move(scores)));
      }
    }
    auto &cells = votes[candidate];
    for (auto &[label, scores] : contributions) {
      cells[label] = {scores.size(), OrderFreeMean(std::move(scores))};
    }
  }
  return votes;
}

}  // namespace

VoteTable VoteCounts(std::span<const PredictionSet> pipelines) {
  CheckCompatible(pipelines);
  if (pipelines.front().kind() != TaskKind::kEntity) {
    throw Error(ErrorCode::kInvalidArgument, "span votes need entity predictions");
  }
  VoteTable table;
  table.reserve(pipelines.front().num_sentences());
  for (std::size_t s = 0; s < pipelines.front().num_sentences(); ++s) {
    table.push_back(SentenceVoteCounts(pipelines, s));
  }
  return table;
}

std::vector<std::vector<SpanAnnotation>> EnsembleEntities(
    std::span<const PredictionSet> pipelines, const EnsembleConfig &config) {
  config.Validate();
  const VoteTable table = VoteCounts(pipelines);
  const std::vector<std::string> &class_ids = pipelines.front().class_ids();

  std::vector<std::vector<SpanAnnotation>> out(table.size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    struct Candidate {
      TokenRange range;
      std::size_t top_votes;
      const std::map<std::size_t, VoteCell> *cells;
    };
    std::vector<Candidate> order;
    for (const auto &[range, cells] : table[s]) {
      std::size_t top = 0;
      for (const auto &[label, cell] : cells) top = std::max(top, cell.votes);
      order.push_back({range, top, &cells});
    }
    std::sort(order.begin(), order.end(), [](const Candidate &a, const Candidate &b) {
      if (a.range.length() != b.range.length()) {
        return a.range.length() > b.range.length();
      }
      if (a.top_votes != b.top_votes) return a.top_votes > b.top_votes;
      return a.range.start < b.range.start;
    });

    std::vector<SpanAnnotation> &emitted = out[s];
    for (const Candidate &c : order) {
      const bool blocked = std::any_of(
          emitted.begin(), emitted.end(),
          [&](const SpanAnnotation &e) { return e.range().Overlaps(c.range); });
      if (blocked) continue;
      // Cells iterate in ascending class index, so strict comparisons keep
      // the lowest index on full ties.
      auto best = c.cells->begin();
      for (auto it = std::next(best); it != c.cells->end(); ++it) {
        const VoteCell &cand = it->second;
        const VoteCell &cur = best->second;
        if (cand.votes != cur.votes) {
          if (cand.votes > cur.votes) best = it;
        } else if (config.tie_break == TieBreak::kHighestMeanScore &&
                   cand.mean_score > cur.mean_score) {
          best = it;
        }
      }
      if (best->second.votes < static_cast<std::size_t>(config.min_votes)) continue;
      emitted.push_back({static_cast<int>(s), c.range.start, c.range.end,
                         class_ids[best->first], best->second.mean_score});
    }
    std::sort(emitted.begin(), emitted.end(),
              [](const SpanAnnotation &a, const SpanAnnotation &b) {
                return a.start < b.start;
              });
  }
  return out;
}

std::vector<std::size_t> EnsembleRelations(
    std::span<const PredictionSet> pipelines, const EnsembleConfig &config) {
  config.Validate();
  CheckCompatible(pipelines);
  if (pipelines.front().kind() != TaskKind::kRelation) {
    throw Error(ErrorCode::kInvalidArgument,
                "relation ensemble needs relation predictions");
  }
  const std::size_t num_classes = pipelines.front().class_ids().size();
  std::vector<std::size_t> out;
  out.reserve(pipelines.front().num_sentences());
  for (std::size_t i = 0; i < pipelines.front().num_sentences(); ++i) {
    std::vector<std::size_t> counts(num_classes, 0);
    for (const PredictionSet &ps : pipelines) ++counts[ps.decoded_labels()[i]];
    const std::size_t top = *std::max_element(counts.begin(), counts.end());
    std::size_t best = num_classes;
    double best_mean = -1.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (counts[c] != top) continue;
      std::vector<double> probs;
      probs.reserve(pipelines.size());
      for (const PredictionSet &ps : pipelines) probs.push_back(ps.instance_probs()[i][c]);
      const double mean = OrderFreeMean(std::move(probs));
      if (mean > best_mean) {
        best = c;
        best_mean = mean;
      }
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace descboost
