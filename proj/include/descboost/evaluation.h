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

// Classification metrics and entropy/performance correlation analysis.

#ifndef DESCBOOST_EVALUATION_H_
#define DESCBOOST_EVALUATION_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "descboost/core.h"
#include "descboost/serialization.h"

namespace descboost {

struct ClassMetrics {
  std::string class_id;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // tp + fn
};

struct EvalReport {
  TaskKind kind = TaskKind::kEntity;
  // Headline figures. Entities: micro precision/recall over non-O classes.
  // Relations: macro precision, and recall = micro F1 = accuracy.
  double precision = 0.0;
  double recall = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  // Tokens for entity tasks, instances for relation tasks.
  std::size_t num_items = 0;
  std::vector<ClassMetrics> per_class;  // in task order, O excluded

  Json ToJson() const;
};

// 2ab/(a+b) with 0/0 -> 0.
double HarmonicMean(double a, double b);

// Token-level evaluation; `pred[i]` holds the spans of gold sentence i.
// Throws Error(kCorpusMismatch) on sentence count or span bounds mismatch,
// Error(kSchema) on overlapping predicted spans and Error(kUnknownClass).
EvalReport EntityMetrics(const std::vector<std::vector<SpanAnnotation>> &pred,
                         const TokenizedCorpus &gold, const TaskSpec &spec);

// Instance-level evaluation; one predicted class id per gold instance.
EvalReport RelationMetrics(const std::vector<std::string> &pred,
                           const TokenizedCorpus &gold, const TaskSpec &spec);

// Collects predicted spans from span-JSONL rows (as written by the ensemble
// and by SaveCorpus) in the same shape EntityMetrics expects.
std::vector<std::vector<SpanAnnotation>> SpansFromCorpus(
    const TokenizedCorpus &corpus);

// ---------------------------------------------------------------------------

struct CorrelationSample {
  std::string strategy;
  int variation_index = 0;
  double entropy = 0.0;
  double macro_f1 = 0.0;
};

struct ClassCorrelation {
  std::string class_id;
  std::vector<CorrelationSample> samples;
  std::optional<double> pearson_r;  // unset when a coordinate is constant
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::optional<double> p_value;  // unset when no pair is informative
  std::optional<std::string> note;
};

struct CorrelationReport {
  std::vector<ClassCorrelation> classes;
  std::size_t concordant = 0;
  std::size_t discordant = 0;
  std::optional<double> p_value;
  std::optional<std::string> note;

  Json ToJson() const;
};

// Sample Pearson correlation; nullopt if either coordinate has zero variance.
std::optional<double> PearsonR(std::span<const double> x,
                               std::span<const double> y);

// Exact two-sided binomial test of `discordant` out of n = concordant +
// discordant at p = 1/2: min(1, 2 * P(X <= min(d, n - d))). Nullopt if n = 0.
std::optional<double> SignTestPValue(std::size_t concordant,
                                     std::size_t discordant);

// Counts pairs with distinct entropy and distinct F1 by whether both move in
// the same direction.
std::pair<std::size_t, std::size_t> ConcordantDiscordant(
    std::span<const CorrelationSample> samples);

// Throws Error(kInsufficientSamples) if any class has fewer than 3 samples.
CorrelationReport CorrelationAnalysis(
    const std::vector<std::pair<std::string, std::vector<CorrelationSample>>>
        &samples);

// ---------------------------------------------------------------------------

struct FigureRow {
  std::string class_id;
  std::string strategy;
  int variation_index = 0;
  double entropy = 0.0;
  double macro_f1 = 0.0;

  bool operator==(const FigureRow &) const = default;
};

inline constexpr std::string_view kFigureCsvHeader =
    "class,strategy,variation_index,entropy,macro_f1";

std::vector<FigureRow> FigureRowsFromReport(const CorrelationReport &report);
std::string FigureRowsToCsv(const std::vector<FigureRow> &rows);
// Throws RowError(kParse) with the offending line.
std::vector<FigureRow> FigureRowsFromCsv(std::string_view csv,
                                         const std::string &source = "<csv>");
void WriteFigureCsv(const std::filesystem::path &path,
                    const std::vector<FigureRow> &rows);

}  // namespace descboost

#endif  // DESCBOOST_EVALUATION_H_
