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

#include "descboost/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

#include "descboost/error.h"

namespace descboost {

namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void FinishClass(ClassMetrics &m) {
  m.support = m.tp + m.fn;
  m.precision = Ratio(m.tp, m.tp + m.fp);
  m.recall = Ratio(m.tp, m.tp + m.fn);
  m.f1 = HarmonicMean(m.precision, m.recall);
}

void FillMacro(EvalReport &r) {
  if (r.per_class.empty()) return;
  double p = 0.0, rec = 0.0, f = 0.0;
  for (const ClassMetrics &m : r.per_class) {
    p += m.precision;
    rec += m.recall;
    f += m.f1;
  }
  const double n = static_cast<double>(r.per_class.size());
  r.macro_precision = p / n;
  r.macro_recall = rec / n;
  r.macro_f1 = f / n;
}

}  // namespace

double HarmonicMean(double a, double b) {
  return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b);
}

Json EvalReport::ToJson() const {
  Json classes = Json::object();
  for (const ClassMetrics &m : per_class) {
    classes[m.class_id] = {{"precision", m.precision}, {"recall", m.recall},
                           {"f1", m.f1},               {"support", m.support},
                           {"tp", m.tp},               {"fp", m.fp},
                           {"fn", m.fn}};
  }
  return {{"task", TaskKindName(kind)},
          {"precision", precision},
          {"recall", recall},
          {"micro_f1", micro_f1},
          {"macro_f1", macro_f1},
          {"accuracy", accuracy},
          {"micro_precision", micro_precision},
          {"micro_recall", micro_recall},
          {"macro_precision", macro_precision},
          {"macro_recall", macro_recall},
          {"num_items", num_items},
          {"per_class", classes}};
}

EvalReport EntityMetrics(const std::vector<std::vector<SpanAnnotation>> &pred,
                         const TokenizedCorpus &gold, const TaskSpec &spec) {
  if (spec.kind() != TaskKind::kEntity) {
    throw Error(ErrorCode::kInvalidArgument, "entity metrics need an entity task");
  }
  if (pred.size() != gold.sentences.size()) {
    throw Error(ErrorCode::kCorpusMismatch,
                "prediction covers " + std::to_string(pred.size()) +
                    " sentences, gold has " +
                    std::to_string(gold.sentences.size()));
  }
  const std::size_t k = spec.size();
  std::vector<ClassMetrics> counts(k);
  std::size_t correct = 0, total = 0;
  std::vector<std::size_t> gold_labels, pred_labels;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    const TokenizedSentence &sentence = gold.sentences[s];
    const int n = static_cast<int>(sentence.tokens.size());
    gold_labels.assign(sentence.tokens.size(), 0);
    pred_labels.assign(sentence.tokens.size(), 0);
    for (const Span &span : sentence.spans) {
      const std::size_t c = spec.IndexOrThrow(span.label);
      for (int t = span.start; t < span.end; ++t) gold_labels[t] = c;
    }
    std::vector<bool> taken(sentence.tokens.size(), false);
    for (const SpanAnnotation &a : pred[s]) {
      if (a.start < 0 || a.end > n || a.start >= a.end) {
        throw Error(ErrorCode::kCorpusMismatch,
                    "predicted span [" + std::to_string(a.start) + "," +
                        std::to_string(a.end) + ") outside sentence " +
                        std::to_string(s));
      }
      const std::size_t c = spec.IndexOrThrow(a.class_id);
      for (int t = a.start; t < a.end; ++t) {
        if (taken[t]) {
          throw Error(ErrorCode::kSchema, "overlapping predicted spans in sentence " +
                                              std::to_string(s));
        }
        taken[t] = true;
        pred_labels[t] = c;
      }
    }
    for (std::size_t t = 0; t < gold_labels.size(); ++t) {
      const std::size_t g = gold_labels[t], p = pred_labels[t];
      ++total;
      if (g == p) {
        ++correct;
        if (g != 0) ++counts[g].tp;
        continue;
      }
      if (p != 0) ++counts[p].fp;
      if (g != 0) ++counts[g].fn;
    }
  }

  EvalReport r;
  r.kind = TaskKind::kEntity;
  r.num_items = total;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t c = 1; c < k; ++c) {
    ClassMetrics m = counts[c];
    m.class_id = spec.at(c).id;
    FinishClass(m);
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
    r.per_class.push_back(std::move(m));
  }
  r.micro_precision = Ratio(tp, tp + fp);
  r.micro_recall = Ratio(tp, tp + fn);
  r.precision = r.micro_precision;
  r.recall = r.micro_recall;
  r.micro_f1 = HarmonicMean(r.precision, r.recall);
  r.accuracy = Ratio(correct, total);
  FillMacro(r);
  return r;
}

EvalReport RelationMetrics(const std::vector<std::string> &pred,
                           const TokenizedCorpus &gold, const TaskSpec &spec) {
  if (spec.kind() != TaskKind::kRelation) {
    throw Error(ErrorCode::kInvalidArgument,
                "relation metrics need a relation task");
  }
  if (pred.size() != gold.sentences.size()) {
    throw Error(ErrorCode::kCorpusMismatch,
                "prediction covers " + std::to_string(pred.size()) +
                    " instances, gold has " +
                    std::to_string(gold.sentences.size()));
  }
  std::vector<ClassMetrics> counts(spec.size());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto &relation = gold.sentences[i].relation;
    if (!relation) {
      throw Error(ErrorCode::kCorpusMismatch,
                  "gold sentence " + std::to_string(i) + " has no relation");
    }
    const std::size_t g = spec.IndexOrThrow(relation->relation);
    const std::size_t p = spec.IndexOrThrow(pred[i]);
    if (g == p) {
      ++correct;
      ++counts[g].tp;
    } else {
      ++counts[p].fp;
      ++counts[g].fn;
    }
  }
  EvalReport r;
  r.kind = TaskKind::kRelation;
  r.num_items = pred.size();
  for (std::size_t c = 0; c < spec.size(); ++c) {
    ClassMetrics m = counts[c];
    m.class_id = spec.at(c).id;
    FinishClass(m);
    r.per_class.push_back(std::move(m));
  }
  FillMacro(r);
  r.accuracy = Ratio(correct, pred.size());
  // Single-label instances: every error is one fp and one fn, so micro
  // precision, micro recall and micro F1 all equal accuracy.
  r.micro_precision = r.accuracy;
  r.micro_recall = r.accuracy;
  r.micro_f1 = r.accuracy;
  r.precision = r.macro_precision;
  r.recall = r.accuracy;
  return r;
}

std::vector<std::vector<SpanAnnotation>> SpansFromCorpus(
    const TokenizedCorpus &corpus) {
  std::vector<std::vector<SpanAnnotation>> out;
  out.reserve(corpus.sentences.size());
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    std::vector<SpanAnnotation> spans;
    for (const Span &span : corpus.sentences[s].spans) {
      spans.push_back({static_cast<int>(s), span.start, span.end, span.label, 1.0});
    }
    out.push_back(std::move(spans));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<double> PearsonR(std::span<const double> x,
                               std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pearson inputs differ in length");
  }
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace {

// P(X <= m) for X ~ Bin(n, 1/2).
double LowerTail(std::size_t n, std::size_t m) {
  if (n <= 1000) {
    // Coefficients stay exact integers up to 2^53, which covers the small
    // cases exactly.
    double c = 1.0, sum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
      sum += c;
      c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return std::ldexp(sum, -static_cast<int>(n));
  }
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  const double ln1 = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double log_c = ln1 - std::lgamma(static_cast<double>(i) + 1.0) -
                         std::lgamma(static_cast<double>(n - i) + 1.0);
    sum += std::exp(log_c + log_half_n);
  }
  return sum;
}

}  // namespace

std::optional<double> SignTestPValue(std::size_t concordant,
                                     std::size_t discordant) {
  const std::size_t n = concordant + discordant;
  if (n == 0) return std::nullopt;
  const std::size_t m = std::min(concordant, discordant);
  return std::min(1.0, 2.0 * LowerTail(n, m));
}

std::pair<std::size_t, std::size_t> ConcordantDiscordant(
    std::span<const CorrelationSample> samples) {
  std::size_t concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double dh = samples[i].entropy - samples[j].entropy;
      const double df = samples[i].macro_f1 - samples[j].macro_f1;
      if (dh == 0.0 || df == 0.0) continue;
      if ((dh > 0.0) == (df > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  return {concordant, discordant};
}

CorrelationReport CorrelationAnalysis(
    const std::vector<std::pair<std::string, std::vector<CorrelationSample>>>
        &samples) {
  CorrelationReport report;
  for (const auto &[class_id, class_samples] : samples) {
    if (class_samples.size() < 3) {
      throw Error(ErrorCode::kInsufficientSamples,
                  "class '" + class_id + "' has " +
                      std::to_string(class_samples.size()) +
                      " samples, at least 3 are needed");
    }
    ClassCorrelation c;
    c.class_id = class_id;
    c.samples = class_samples;
    std::vector<double> h, f;
    for (const CorrelationSample &s : class_samples) {
      h.push_back(s.entropy);
      f.push_back(s.macro_f1);
    }
    c.pearson_r = PearsonR(h, f);
    std::tie(c.concordant, c.discordant) = ConcordantDiscordant(class_samples);
    c.p_value = SignTestPValue(c.concordant, c.discordant);
    if (!c.p_value) c.note = "insufficient_samples: no pair differs in both entropy and macro_f1";
    report.concordant += c.concordant;
    report.discordant += c.discordant;
    report.classes.push_back(std::move(c));
  }
  report.p_value = SignTestPValue(report.concordant, report.discordant);
  if (!report.p_value) {
    report.note = "insufficient_samples: no pair differs in both entropy and macro_f1";
  }
  return report;
}

namespace {

Json OptionalJson(const std::optional<double> &v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json CorrelationReport::ToJson() const {
  Json classes_json = Json::array();
  for (const ClassCorrelation &c : classes) {
    Json pairs = Json::array();
    for (const CorrelationSample &s : c.samples) {
      pairs.push_back({{"strategy", s.strategy},
                       {"variation_index", s.variation_index},
                       {"entropy", s.entropy},
                       {"macro_f1", s.macro_f1}});
    }
    classes_json.push_back({{"class_id", c.class_id},
                            {"pearson_r", OptionalJson(c.pearson_r)},
                            {"concordant", c.concordant},
                            {"discordant", c.discordant},
                            {"p_value", OptionalJson(c.p_value)},
                            {"note", c.note ? Json(*c.note) : Json(nullptr)},
                            {"samples", std::move(pairs)}});
  }
  return {{"classes", std::move(classes_json)},
          {"aggregate",
           {{"concordant", concordant},
            {"discordant", discordant},
            {"p_value", OptionalJson(p_value)},
            {"note", note ? Json(*note) : Json(nullptr)}}}};
}

// ---------------------------------------------------------------------------

std::vector<FigureRow> FigureRowsFromReport(const CorrelationReport &report) {
  std::vector<FigureRow> rows;
  for (const ClassCorrelation &c : report.classes) {
    for (const CorrelationSample &s : c.samples) {
      rows.push_back({c.class_id, s.strategy, s.variation_index, s.entropy, s.macro_f1});
    }
  }
  return rows;
}

namespace {

std::string CsvField(const std::string &value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<std::string> SplitCsvLine(std::string_view line,
                                      const std::string &source, int line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw RowError(ErrorCode::kParse, source, line_no, "unterminated quote");
  return fields;
}

template <typename T>
T ParseNumber(const std::string &field, const std::string &source, int line_no) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw RowError(ErrorCode::kParse, source, line_no,
                   "bad number '" + field + "'");
  }
  return value;
}

}  // namespace

std::string FigureRowsToCsv(const std::vector<FigureRow> &rows) {
  std::string out(kFigureCsvHeader);
  out += '\n';
  for (const FigureRow &r : rows) {
    out += CsvField(r.class_id) + ',' + CsvField(r.strategy) + ',' +
           std::to_string(r.variation_index) + ',' + FormatDouble(r.entropy) +
           ',' + FormatDouble(r.macro_f1) + '\n';
  }
  return out;
}

std::vector<FigureRow> FigureRowsFromCsv(std::string_view csv,
                                         const std::string &source) {
  std::vector<FigureRow> rows;
  int line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kFigureCsvHeader) {
        throw RowError(ErrorCode::kParse, source, line_no, "unexpected header");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line, source, line_no);
    if (f.size() != 5) {
      throw RowError(ErrorCode::kParse, source, line_no,
                     "expected 5 fields, got " + std::to_string(f.size()));
    }
    rows.push_back({f[0], f[1], ParseNumber<int>(f[2], source, line_no),
                    ParseNumber<double>(f[3], source, line_no),
                    ParseNumber<double>(f[4], source, line_no)});
  }
  if (!header_seen) throw RowError(ErrorCode::kParse, source, 0, "empty file");
  return rows;
}

void WriteFigureCsv(const std::filesystem::path &path,
                    const std::vector<FigureRow> &rows) {
  WriteFileAtomic(path, FigureRowsToCsv(rows));
}

}  // namespace descboost
