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

#include "descboost/cli.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "descboost/config.h"
#include "descboost/ensemble.h"
#include "descboost/error.h"
#include "descboost/evaluation.h"
#include "descboost/pipeline.h"
#include "descboost/ranking.h"

namespace descboost {

namespace {

namespace fs = std::filesystem;

enum class OutputFormat { kJson, kText };

struct Options {
  std::string format = "json";
  std::string config;
  std::string pipeline;
  std::string class_id;
  std::string in, out, splits_map, corpus_format = "jsonl", task = "entity", name;
  std::string pred, gold;
  std::string candidates;
};

OutputFormat FormatOf(const Options &o) {
  return o.format == "text" ? OutputFormat::kText : OutputFormat::kJson;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void PrintEval(const EvalReport &r, OutputFormat format, std::ostream &out) {
  if (format == OutputFormat::kJson) {
    out << DumpJson(r.ToJson());
    return;
  }
  out << "precision " << Fixed(r.precision) << "\n"
      << "recall    " << Fixed(r.recall) << "\n"
      << "micro_f1  " << Fixed(r.micro_f1) << "\n"
      << "macro_f1  " << Fixed(r.macro_f1) << "\n"
      << "accuracy  " << Fixed(r.accuracy) << "\n";
  for (const ClassMetrics &m : r.per_class) {
    out << "  " << m.class_id << " p=" << Fixed(m.precision) << " r=" << Fixed(m.recall)
        << " f1=" << Fixed(m.f1) << " support=" << m.support << "\n";
  }
}

void PrintCorrelation(const CorrelationReport &r, OutputFormat format,
                      std::ostream &out) {
  if (format == OutputFormat::kJson) {
    out << DumpJson(r.ToJson());
    return;
  }
  auto opt = [](const std::optional<double> &v) { return v ? Fixed(*v) : std::string("n/a"); };
  for (const ClassCorrelation &c : r.classes) {
    out << c.class_id << " n=" << c.samples.size() << " r=" << opt(c.pearson_r)
        << " concordant=" << c.concordant << " discordant=" << c.discordant
        << " p=" << opt(c.p_value) << "\n";
  }
  out << "aggregate concordant=" << r.concordant << " discordant=" << r.discordant
      << " p=" << opt(r.p_value) << "\n";
}

// Loads the configured data, spec and variation archive shared by most
// subcommands.
struct Loaded {
  ConvertedData data;
  TaskSpec spec;
  VariationArchive archive;
};

Loaded LoadAll(Engine &engine) {
  ConvertedData data = engine.Convert();
  TaskSpec spec = engine.EvalSpec(data);
  const fs::path path = engine.config().output_dir / "variations.json";
  VariationArchive archive = engine.Variations(spec, path);
  return {std::move(data), std::move(spec), std::move(archive)};
}

void SaveArchive(const Engine &engine, const VariationArchive &archive) {
  ArtifactWriter writer(engine.config().output_dir, engine.RunBlock());
  writer.WriteJson("variations.json", archive.ToJson());
}

int ConvertDataset(const Options &o, std::ostream &out) {
  const CorpusFormat format = ParseCorpusFormat(o.corpus_format);
  const TaskKind kind = ParseTaskKind(o.task);
  RawDataset raw;
  raw.kind = kind;
  for (Split split : kAllSplits) {
    const fs::path path =
        fs::path(o.in) / (std::string(SplitName(split)) +
                          std::string(CorpusFormatExtension(format)));
    if (!fs::exists(path)) continue;
    raw.splits[split] = LoadCorpus(path, format, split, o.name).sentences;
  }
  if (raw.splits.empty()) {
    throw Error(ErrorCode::kIo, "no split files found in " + o.in);
  }
  raw.RecomputeInventory();
  const SplitClassMap map = SplitClassMapFromJson(LoadJsonFile(o.splits_map));
  const ConversionResult result = ZeroShotConvert(raw, map);
  fs::create_directories(o.out);
  for (const auto &[split, sentences] : result.dataset.splits) {
    SaveCorpus({o.name, split, sentences},
               fs::path(o.out) / (std::string(SplitName(split)) + ".jsonl"));
  }
  const Json report = result.report.ToJson();
  WriteFileAtomic(fs::path(o.out) / "conversion_report.json", DumpJson(report));
  if (FormatOf(o) == OutputFormat::kJson) {
    out << DumpJson(report);
  } else {
    for (const auto &[split, counts] : result.report.splits) {
      out << SplitName(split) << ": " << counts.sentences_after << " sentences ("
          << counts.sentences_removed << " removed)\n";
    }
  }
  return 0;
}

int GenerateCommand(const Options &o, std::ostream &out) {
  Engine engine(LoadRunConfig(o.config));
  const Loaded l = LoadAll(engine);
  SaveArchive(engine, l.archive);
  if (FormatOf(o) == OutputFormat::kJson) {
    out << DumpJson({{"sets", l.archive.size()},
                     {"variations", l.archive.total_variations()},
                     {"generator_calls", engine.generator_calls()}});
  } else {
    out << l.archive.size() << " sets, " << l.archive.total_variations()
        << " variations, " << engine.generator_calls() << " generator calls\n";
  }
  return 0;
}

int PredictCommand(const Options &o, std::ostream &out) {
  Engine engine(LoadRunConfig(o.config));
  const Loaded l = LoadAll(engine);
  SaveArchive(engine, l.archive);
  const PipelineDef def = engine.FindPipeline(l.spec, l.archive, o.pipeline);
  const TokenizedCorpus &gold = engine.EvalCorpus(l.data);
  const PredictionSet ps = engine.Predict(gold, def.spec, def.id);
  Json json = PredictionSetToJson(ps);
  json["run"] = engine.RunBlock();
  if (!o.out.empty()) WriteFileAtomic(o.out, DumpJson(json));
  if (FormatOf(o) == OutputFormat::kText) {
    PrintEval(EvaluatePredictions(ps, gold, def.spec), OutputFormat::kText, out);
  } else if (o.out.empty()) {
    out << DumpJson(json);
  }
  return 0;
}

int RankCommand(const Options &o, std::ostream &out) {
  Engine engine(LoadRunConfig(o.config));
  const Loaded l = LoadAll(engine);
  SaveArchive(engine, l.archive);
  const std::size_t index = l.spec.IndexOrThrow(o.class_id);
  std::vector<std::string> candidates;
  if (!o.candidates.empty()) {
    const Json list = LoadJsonFile(o.candidates);
    if (!list.is_array()) {
      throw Error(ErrorCode::kSchema, o.candidates + ": expected a JSON array of strings");
    }
    for (const Json &text : list) {
      if (!text.is_string()) {
        throw Error(ErrorCode::kSchema, o.candidates + ": candidates must be strings");
      }
      candidates.push_back(text.get<std::string>());
    }
  } else {
    candidates.push_back(l.spec.at(index).description);
    for (VariationStrategy s : engine.config().variations.strategies) {
      for (const Variation &v : l.archive.Get(o.class_id, s).variations) {
        candidates.push_back(v.text);
      }
    }
  }
  const std::vector<EntropyReport> reports = RankDescriptions(
      o.class_id, candidates, engine.EvalCorpus(l.data), l.spec, engine.predictor(),
      engine.config().normalized_entropy);
  Json json = {{"class_id", o.class_id},
               {"selected", SelectMinEntropy(reports)},
               {"reports", EntropyReportsToJson(reports)},
               {"run", engine.RunBlock()}};
  if (!o.out.empty()) WriteFileAtomic(o.out, DumpJson(json));
  if (FormatOf(o) == OutputFormat::kJson) {
    if (o.out.empty()) out << DumpJson(json);
  } else {
    for (const EntropyReport &r : reports) {
      out << (r.error ? std::string("failed") : Fixed(r.corpus_entropy)) << "\t"
          << r.description << "\n";
    }
  }
  return 0;
}

int EnsembleCommand(const Options &o, std::ostream &out) {
  Engine engine(LoadRunConfig(o.config));
  const Loaded l = LoadAll(engine);
  SaveArchive(engine, l.archive);
  const TokenizedCorpus &gold = engine.EvalCorpus(l.data);
  const std::vector<PipelineResult> results =
      engine.PredictAll(engine.Pipelines(l.spec, l.archive), gold);
  std::vector<PredictionSet> sets;
  for (const PipelineResult &r : results) sets.push_back(r.predictions);
  TokenizedCorpus annotated;
  EvalReport report;
  if (engine.config().task == TaskKind::kEntity) {
    const auto spans = EnsembleEntities(sets, engine.config().ensemble);
    annotated = AnnotationsToCorpus(gold, spans);
    report = EntityMetrics(spans, gold, l.spec);
  } else {
    std::vector<std::string> labels;
    for (std::size_t w : EnsembleRelations(sets, engine.config().ensemble)) {
      labels.push_back(l.spec.at(w).id);
    }
    annotated = RelationLabelsToCorpus(gold, labels);
    report = RelationMetrics(labels, gold, l.spec);
  }
  ArtifactWriter writer(engine.config().output_dir, engine.RunBlock());
  const std::string relative = o.out.empty() ? "ensemble/annotations.jsonl" : "";
  if (relative.empty()) {
    WriteFileAtomic(o.out, CorpusToJsonl(annotated));
  } else {
    writer.WriteText(relative, CorpusToJsonl(annotated));
  }
  PrintEval(report, FormatOf(o), out);
  return 0;
}

int EvaluateCommand(const Options &o, std::ostream &out) {
  const TaskKind kind = ParseTaskKind(o.task);
  const TokenizedCorpus pred = LoadCorpus(o.pred, CorpusFormat::kJsonl, Split::kTest);
  const TokenizedCorpus gold = LoadCorpus(o.gold, CorpusFormat::kJsonl, Split::kTest);
  const TaskSpec spec = SpecFromLabels(kind, {&gold, &pred});
  EvalReport report;
  if (kind == TaskKind::kEntity) {
    report = EntityMetrics(SpansFromCorpus(pred), gold, spec);
  } else {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < pred.sentences.size(); ++i) {
      if (!pred.sentences[i].relation) {
        throw Error(ErrorCode::kCorpusMismatch,
                    "prediction row " + std::to_string(i + 1) + " has no relation");
      }
      labels.push_back(pred.sentences[i].relation->relation);
    }
    report = RelationMetrics(labels, gold, spec);
  }
  PrintEval(report, FormatOf(o), out);
  return 0;
}

int AnalyzeCommand(const Options &o, std::ostream &out) {
  Engine engine(LoadRunConfig(o.config));
  const Loaded l = LoadAll(engine);
  SaveArchive(engine, l.archive);
  const TokenizedCorpus &gold = engine.EvalCorpus(l.data);
  std::vector<std::pair<std::string, std::vector<CorrelationSample>>> samples;
  std::vector<FigureRow> rows;
  for (std::size_t c = engine.config().task == TaskKind::kEntity ? 1 : 0;
       c < l.spec.size(); ++c) {
    const ClassAnalysis a = engine.AnalyzeClass(l.spec.at(c).id, l.spec, l.archive, gold);
    std::vector<CorrelationSample> class_samples;
    for (std::size_t i = 1; i < a.candidates.size(); ++i) {
      if (std::isnan(a.entropy[i])) continue;
      class_samples.push_back({a.candidates[i].strategy, a.candidates[i].variation_index,
                               a.entropy[i], a.macro_f1[i]});
    }
    samples.emplace_back(a.class_id, std::move(class_samples));
  }
  const CorrelationReport report = CorrelationAnalysis(samples);
  ArtifactWriter writer(engine.config().output_dir, engine.RunBlock());
  writer.WriteJson("reports/correlation.json", report.ToJson());
  writer.WriteText("figures/variations.csv", FigureRowsToCsv(FigureRowsFromReport(report)));
  PrintCorrelation(report, FormatOf(o), out);
  return 0;
}

int RunCommand(const Options &o, std::ostream &out, std::ostream &err) {
  Engine engine(LoadRunConfig(o.config));
  const RunSummary summary = engine.Run();
  if (summary.corrupt_cache_entries > 0) {
    err << "warning: " << summary.corrupt_cache_entries
        << " corrupt cache entries were recomputed\n";
  }
  Json json = {{"manifest", (engine.config().output_dir / "manifest.json").string()},
               {"pipelines", summary.manifest["num_pipelines"]},
               {"artifacts", summary.manifest["artifacts"].size()},
               {"predictor_calls", summary.predictor_calls},
               {"generator_calls", summary.generator_calls},
               {"cache_hits", summary.cache_hits}};
  if (FormatOf(o) == OutputFormat::kJson) {
    out << DumpJson(json);
  } else {
    for (const auto &[key, value] : json.items()) out << key << ": " << value << "\n";
  }
  return 0;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Description boosting for zero-shot entity and relation classification",
               "descboost"};
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App *cmd) {
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
  };
  auto add_config = [&](CLI::App *cmd) {
    cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
  };

  CLI::App *convert = app.add_subcommand("convert-dataset", "Convert a dataset to zero-shot splits");
  convert->add_option("--in", o.in, "Directory with train/validation/test files")->required();
  convert->add_option("--out", o.out, "Output directory")->required();
  convert->add_option("--splits-map", o.splits_map, "JSON map split -> class ids")->required();
  convert->add_option("--input-format", o.corpus_format, "jsonl, conll, ontonotes, pubtator, fewrel or wikizs")
      ->capture_default_str();
  convert->add_option("--task", o.task, "entity or relation")->capture_default_str();
  convert->add_option("--name", o.name, "Dataset name");
  add_format(convert);

  CLI::App *generate = app.add_subcommand("generate-variations", "Populate the variation archive");
  add_config(generate);
  add_format(generate);

  CLI::App *predict = app.add_subcommand("predict", "Predict with one pipeline");
  add_config(predict);
  predict->add_option("--pipeline", o.pipeline, "Pipeline id, e.g. original or paraphrase-03")
      ->required();
  predict->add_option("--out", o.out, "Write the prediction set here");
  add_format(predict);

  CLI::App *rank = app.add_subcommand("rank", "Rank one class's descriptions by entropy");
  add_config(rank);
  rank->add_option("--class", o.class_id, "Class id")->required();
  rank->add_option("--candidates", o.candidates,
                   "JSON array of descriptions to rank instead of the archive");
  rank->add_option("--out", o.out, "Write the entropy report here");
  add_format(rank);

  CLI::App *ensemble = app.add_subcommand("ensemble", "Ensemble every pipeline");
  add_config(ensemble);
  ensemble->add_option("--out", o.out, "Annotations JSONL path");
  add_format(ensemble);

  CLI::App *evaluate = app.add_subcommand("evaluate", "Score predictions against gold");
  evaluate->add_option("--pred", o.pred, "Predicted JSONL")->required();
  evaluate->add_option("--gold", o.gold, "Gold JSONL")->required();
  evaluate->add_option("--task", o.task, "entity or relation")->required();
  add_format(evaluate);

  CLI::App *analyze = app.add_subcommand("analyze", "Entropy versus macro F1 correlation");
  add_config(analyze);
  add_format(analyze);

  CLI::App *run = app.add_subcommand("run", "Execute the full chain and write a manifest");
  add_config(run);
  add_format(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    std::ostringstream captured_out, captured_err;
    const int code = app.exit(e, captured_out, captured_err);
    out << captured_out.str();
    err << captured_err.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (*convert) return ConvertDataset(o, out);
    if (*generate) return GenerateCommand(o, out);
    if (*predict) return PredictCommand(o, out);
    if (*rank) return RankCommand(o, out);
    if (*ensemble) return EnsembleCommand(o, out);
    if (*evaluate) return EvaluateCommand(o, out);
    if (*analyze) return AnalyzeCommand(o, out);
    if (*run) return RunCommand(o, out, err);
  } catch (const Error &e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace descboost
