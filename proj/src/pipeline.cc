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

#include "descboost/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "descboost/ensemble.h"
#include "descboost/error.h"
#include "descboost/hashing.h"

namespace descboost {

namespace fs = std::filesystem;

void ParallelFor(std::size_t n, int parallelism,
                 const std::function<void(std::size_t)> &fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
    for (std::thread &t : threads) t.join();
  }
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------

ArtifactWriter::ArtifactWriter(fs::path root, Json run_block)
    : root_(std::move(root)), run_block_(std::move(run_block)) {}

void ArtifactWriter::Write(const std::string &relative, std::string_view data) {
  const fs::path path = root_ / relative;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string() +
                                    ": " + ec.message());
  }
  WriteFileAtomic(path, data);
  std::lock_guard<std::mutex> lock(mu_);
  hashes_[relative] = Sha256Hex(data);
}

void ArtifactWriter::WriteJson(const std::string &relative, Json json) {
  json["run"] = run_block_;
  Write(relative, DumpJson(json));
}

void ArtifactWriter::WriteText(const std::string &relative, std::string_view data) {
  Write(relative, data);
  Json meta = {{"artifact", fs::path(relative).filename().string()},
               {"sha256", Sha256Hex(data)}};
  WriteJson(relative + ".meta.json", std::move(meta));
}

std::map<std::string, std::string> ArtifactWriter::artifacts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hashes_;
}

// ---------------------------------------------------------------------------

namespace {

class CountingGenerator : public Generator {
 public:
  CountingGenerator(Generator &inner, std::atomic<std::size_t> &calls)
      : inner_(inner), calls_(calls) {}
  std::vector<std::string> Generate(const GenerationRequest &request) override {
    ++calls_;
    return inner_.Generate(request);
  }

 private:
  Generator &inner_;
  std::atomic<std::size_t> &calls_;
};

// Classes whose descriptions vary between pipelines: everything but O.
std::vector<std::string> DescribedClasses(const TaskSpec &spec) {
  std::vector<std::string> ids;
  const std::size_t first =
      spec.kind() == TaskKind::kEntity ? 1 : spec.first_positive();
  for (std::size_t i = first; i < spec.size(); ++i) ids.push_back(spec.at(i).id);
  return ids;
}

std::string PipelineId(VariationStrategy strategy, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "-%02d", index);
  return std::string(StrategyName(strategy)) + buf;
}

std::unique_ptr<Generator> MakeGenerator(const VariationConfig &config) {
  switch (config.generator) {
    case GeneratorKind::kEcho:
      return std::make_unique<EchoGenerator>();
    case GeneratorKind::kRemote:
      return std::make_unique<RemoteGenerator>(config.remote);
    case GeneratorKind::kSimulated:
      break;
  }
  return std::make_unique<SimulatedGenerator>();
}

bool SetIsCurrent(const VariationSet &set, const LabelClass &cls,
                  const GenerationParams &params, int n) {
  if (set.params != params) return false;
  if (set.variations.size() != static_cast<std::size_t>(n)) return false;
  return set.variations.front().source_hash ==
         VariationSourceHash(cls.description, set.strategy, params, 0);
}

Json BriefReport(const std::string &id, const EvalReport &r) {
  return {{"pipeline", id},          {"precision", r.precision},
          {"recall", r.recall},      {"micro_f1", r.micro_f1},
          {"macro_f1", r.macro_f1},  {"accuracy", r.accuracy}};
}

}  // namespace

Engine::Engine(RunConfig config, std::unique_ptr<Predictor> backend,
               std::unique_ptr<Generator> generator)
    : config_(std::move(config)),
      backend_(backend ? std::move(backend) : MakePredictor(config_.predictor)),
      generator_(generator ? std::move(generator) : MakeGenerator(config_.variations)),
      cache_(std::make_unique<PredictionCache>(config_.cache_dir)),
      predictor_(std::make_unique<CachingPredictor>(*backend_, *cache_)) {}

Engine::~Engine() = default;

Json Engine::RunBlock() const {
  return {{"config_hash", config_.config_hash}, {"seed", config_.seed}};
}

std::size_t Engine::predictor_calls() const { return predictor_->inner_calls(); }

ConvertedData Engine::Convert() const {
  const DatasetConfig &d = config_.dataset;
  RawDataset raw;
  raw.kind = config_.task;
  for (const auto &[split, path] : d.files) {
    raw.splits[split] = LoadCorpus(path, d.format, split, d.name).sentences;
  }
  raw.RecomputeInventory();

  std::optional<SplitClassMap> map;
  if (d.splits_map) {
    map = SplitClassMapFromJson(LoadJsonFile(*d.splits_map));
  } else if (d.class_split) {
    std::set<std::string> ids;
    for (const auto &[split, labels] : raw.label_inventory) {
      ids.insert(labels.begin(), labels.end());
    }
    map = RandomClassSplit({ids.begin(), ids.end()}, *d.class_split, config_.seed);
  }

  ConvertedData out;
  std::set<std::string> eval_classes;
  if (map) {
    ConversionResult result = ZeroShotConvert(raw, *map);
    if (d.class_split) result.report.split_seed = config_.seed;
    raw = std::move(result.dataset);
    out.report = std::move(result.report);
    if (auto it = map->find(config_.eval_split); it != map->end()) {
      eval_classes = it->second;
    }
  } else if (auto it = raw.label_inventory.find(config_.eval_split);
             it != raw.label_inventory.end()) {
    eval_classes = it->second;
  }
  for (auto &[split, sentences] : raw.splits) {
    out.corpora[split] = {d.name, split, std::move(sentences)};
  }
  if (eval_classes.empty()) {
    throw Error(ErrorCode::kEmptyCandidates,
                "no classes in the " + std::string(SplitName(config_.eval_split)) +
                    " split");
  }
  const DescriptionFile descriptions = LoadDescriptions(config_.descriptions, config_.task);
  descriptions.CheckCovers({eval_classes.begin(), eval_classes.end()});
  for (const auto &[id, text] : descriptions.entries) {
    if (eval_classes.contains(id)) out.eval_classes.push_back(id);
  }
  return out;
}

const TokenizedCorpus &Engine::EvalCorpus(const ConvertedData &data) const {
  auto it = data.corpora.find(config_.eval_split);
  if (it == data.corpora.end() || it->second.sentences.empty()) {
    throw Error(ErrorCode::kCorpusMismatch,
                "the " + std::string(SplitName(config_.eval_split)) +
                    " split has no sentences after conversion");
  }
  return it->second;
}

TaskSpec Engine::EvalSpec(const ConvertedData &data) const {
  return LoadDescriptions(config_.descriptions, config_.task)
      .ToTaskSpec(data.eval_classes);
}

VariationArchive Engine::Variations(const TaskSpec &spec, const fs::path &path) {
  std::optional<VariationArchive> previous;
  if (fs::exists(path)) previous = VariationArchive::Load(path);

  VariationArchive archive(config_.dataset.name);
  archive.metadata() = {
      {"strategies", Json::array()},
      {"n", config_.variations.n},
      {"finetuned_extend_context",
       "first 10 words of the description; the class name is sent separately"}};
  for (VariationStrategy s : config_.variations.strategies) {
    archive.metadata()["strategies"].push_back(StrategyName(s));
  }

  struct Job {
    const LabelClass *cls;
    VariationStrategy strategy;
  };
  std::vector<Job> jobs;
  for (const std::string &id : DescribedClasses(spec)) {
    const LabelClass &cls = spec.at(spec.IndexOrThrow(id));
    for (VariationStrategy s : config_.variations.strategies) {
      GenerationParams params = config_.variations.ParamsFor(s);
      params.num_return = config_.variations.n;
      if (previous && previous->Contains(id, s) &&
          SetIsCurrent(previous->Get(id, s), cls, params, config_.variations.n)) {
        archive.Put(previous->Get(id, s));
      } else {
        jobs.push_back({&cls, s});
      }
    }
  }
  CountingGenerator counting(*generator_, generator_calls_);
  ParallelFor(jobs.size(), config_.parallelism, [&](std::size_t i) {
    const Job &job = jobs[i];
    archive.Put(GenerateVariations(*job.cls, job.strategy, config_.variations.n,
                                   config_.variations.ParamsFor(job.strategy),
                                   counting));
  });
  return archive;
}

std::vector<PipelineDef> Engine::Pipelines(const TaskSpec &spec,
                                           const VariationArchive &archive) const {
  std::vector<PipelineDef> defs;
  if (config_.variations.include_original) defs.push_back({"original", spec});
  const std::vector<std::string> ids = DescribedClasses(spec);
  for (VariationStrategy s : config_.variations.strategies) {
    for (int i = 0; i < config_.variations.n; ++i) {
      TaskSpec variant = spec;
      for (const std::string &id : ids) {
        variant = variant.WithDescription(id, archive.Get(id, s).variations.at(i).text);
      }
      defs.push_back({PipelineId(s, i), std::move(variant)});
    }
  }
  return defs;
}

PipelineDef Engine::FindPipeline(const TaskSpec &spec,
                                 const VariationArchive &archive,
                                 const std::string &id) const {
  for (PipelineDef &def : Pipelines(spec, archive)) {
    if (def.id == id) return std::move(def);
  }
  throw Error(ErrorCode::kNotFound, "no pipeline '" + id + "'");
}

PredictionSet Engine::Predict(const TokenizedCorpus &corpus, const TaskSpec &spec,
                              const std::string &pipeline_id) const {
  return predictor_->Predict(corpus, spec, pipeline_id);
}

std::vector<PipelineResult> Engine::PredictAll(const std::vector<PipelineDef> &defs,
                                               const TokenizedCorpus &gold) const {
  std::vector<std::optional<PipelineResult>> slots(defs.size());
  ParallelFor(defs.size(), config_.parallelism, [&](std::size_t i) {
    PredictionSet ps = Predict(gold, defs[i].spec, defs[i].id);
    EvalReport report = EvaluatePredictions(ps, gold, defs[i].spec);
    slots[i] = PipelineResult{defs[i].id, std::move(ps), std::move(report)};
  });
  std::vector<PipelineResult> out;
  out.reserve(slots.size());
  for (auto &slot : slots) out.push_back(std::move(*slot));
  return out;
}

ClassAnalysis Engine::AnalyzeClass(const std::string &class_id, const TaskSpec &spec,
                                   const VariationArchive &archive,
                                   const TokenizedCorpus &gold) const {
  ClassAnalysis a;
  a.class_id = class_id;
  a.candidates.push_back({"original", 0, spec.at(spec.IndexOrThrow(class_id)).description});
  for (VariationStrategy s : config_.variations.strategies) {
    const VariationSet &set = archive.Get(class_id, s);
    for (std::size_t i = 0; i < set.variations.size(); ++i) {
      a.candidates.push_back({std::string(StrategyName(s)), static_cast<int>(i),
                              set.variations[i].text});
    }
  }
  const std::size_t n = a.candidates.size();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  a.entropy.assign(n, kNaN);
  a.macro_f1.assign(n, kNaN);
  a.ranking.resize(n);
  // Same pipeline ids as RankDescriptions, so both share cache entries.
  ParallelFor(n, config_.parallelism, [&](std::size_t i) {
    EntropyReport &report = a.ranking[i];
    report.class_id = class_id;
    report.description = a.candidates[i].text;
    report.normalized = config_.normalized_entropy;
    try {
      const TaskSpec variant = spec.WithDescription(class_id, a.candidates[i].text);
      const PredictionSet ps =
          Predict(gold, variant, "rank/" + class_id + "/" + std::to_string(i));
      CorpusEntropy h = ComputeCorpusEntropy(ps, config_.normalized_entropy);
      report.corpus_entropy = h.value;
      report.mentions_per_sentence = std::move(h.mentions_per_sentence);
      report.fell_back_to_all_tokens = h.fell_back_to_all_tokens;
      a.entropy[i] = h.value;
      a.macro_f1[i] = EvaluatePredictions(ps, gold, variant).macro_f1;
    } catch (const std::exception &e) {
      report.error = e.what();
    }
  });
  SortReports(a.ranking);
  return a;
}

RunSummary Engine::Run() {
  ArtifactWriter writer(config_.output_dir, RunBlock());
  const std::size_t hits_before = cache_->hits();

  const ConvertedData data = Convert();
  for (const auto &[split, corpus] : data.corpora) {
    writer.WriteText("converted/" + std::string(SplitName(split)) + ".jsonl",
                     CorpusToJsonl(corpus));
  }
  if (data.report) writer.WriteJson("converted/conversion_report.json", data.report->ToJson());
  const TokenizedCorpus &gold = EvalCorpus(data);
  const TaskSpec spec = EvalSpec(data);
  writer.WriteJson("task_spec.json", TaskSpecToJson(spec));

  const VariationArchive archive = Variations(spec, config_.output_dir / "variations.json");
  writer.WriteJson("variations.json", archive.ToJson());

  const std::vector<PipelineDef> defs = Pipelines(spec, archive);
  const std::vector<PipelineResult> results = PredictAll(defs, gold);
  std::vector<PredictionSet> sets;
  sets.reserve(results.size());
  for (const PipelineResult &r : results) sets.push_back(r.predictions);

  EvalReport ensemble_report;
  if (config_.task == TaskKind::kEntity) {
    const auto spans = EnsembleEntities(sets, config_.ensemble);
    writer.WriteText("ensemble/annotations.jsonl",
                     CorpusToJsonl(AnnotationsToCorpus(gold, spans)));
    ensemble_report = EntityMetrics(spans, gold, spec);
  } else {
    const std::vector<std::size_t> winners = EnsembleRelations(sets, config_.ensemble);
    std::vector<std::string> labels;
    for (std::size_t w : winners) labels.push_back(spec.at(w).id);
    writer.WriteText("ensemble/annotations.jsonl",
                     CorpusToJsonl(RelationLabelsToCorpus(gold, labels)));
    ensemble_report = RelationMetrics(labels, gold, spec);
  }

  // Ranking and correlation share one sweep over each class's candidates.
  const std::vector<std::string> classes = DescribedClasses(spec);
  std::vector<ClassAnalysis> analyses;
  for (const std::string &id : classes) {
    analyses.push_back(AnalyzeClass(id, spec, archive, gold));
  }
  Json rankings = {{"normalized", config_.normalized_entropy}, {"classes", Json::array()}};
  TaskSpec selected = spec;
  std::vector<std::pair<std::string, std::vector<CorrelationSample>>> samples;
  std::vector<FigureRow> rows;
  for (const ClassAnalysis &a : analyses) {
    const std::string best = SelectMinEntropy(a.ranking);
    selected = selected.WithDescription(a.class_id, best);
    rankings["classes"].push_back({{"class_id", a.class_id},
                                   {"selected", best},
                                   {"reports", EntropyReportsToJson(a.ranking)}});
    std::vector<CorrelationSample> class_samples;
    for (std::size_t i = 1; i < a.candidates.size(); ++i) {
      if (std::isnan(a.entropy[i])) continue;
      class_samples.push_back({a.candidates[i].strategy, a.candidates[i].variation_index,
                               a.entropy[i], a.macro_f1[i]});
      rows.push_back({a.class_id, a.candidates[i].strategy,
                      a.candidates[i].variation_index, a.entropy[i], a.macro_f1[i]});
    }
    samples.emplace_back(a.class_id, std::move(class_samples));
  }
  writer.WriteJson("reports/rankings.json", std::move(rankings));
  try {
    writer.WriteJson("reports/correlation.json", CorrelationAnalysis(samples).ToJson());
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kInsufficientSamples) throw;
    writer.WriteJson("reports/correlation.json",
                     {{"classes", Json::array()}, {"note", e.what()}});
  }
  writer.WriteText("figures/variations.csv", FigureRowsToCsv(rows));

  const PredictionSet min_entropy = Predict(gold, selected, "min_entropy");
  Json pipelines = Json::array();
  double mean_macro = 0.0, mean_accuracy = 0.0;
  for (const PipelineResult &r : results) {
    pipelines.push_back(BriefReport(r.id, r.report));
    mean_macro += r.report.macro_f1;
    mean_accuracy += r.report.accuracy;
  }
  const double count = static_cast<double>(results.size());
  Json eval = {{"task", TaskKindName(config_.task)},
               {"split", SplitName(config_.eval_split)},
               {"ensemble", ensemble_report.ToJson()},
               {"min_entropy", EvaluatePredictions(min_entropy, gold, selected).ToJson()}};
  for (const PipelineResult &r : results) {
    if (r.id == "original") eval["original"] = r.report.ToJson();
  }
  eval["mean_pipeline"] = {{"macro_f1", mean_macro / count},
                           {"accuracy", mean_accuracy / count}};
  eval["pipelines"] = std::move(pipelines);
  writer.WriteJson("reports/eval.json", std::move(eval));

  Json ids = Json::array();
  for (const PipelineDef &def : defs) ids.push_back(def.id);
  Json artifacts = Json::array();
  for (const auto &[path, sha] : writer.artifacts()) {
    artifacts.push_back({{"path", path}, {"sha256", sha}});
  }
  Json manifest = {{"format", "descboost-manifest"},
                   {"version", 1},
                   {"run", RunBlock()},
                   {"task", TaskKindName(config_.task)},
                   {"dataset", config_.dataset.name},
                   {"config", RunConfigToJson(config_)},
                   {"num_pipelines", defs.size()},
                   {"pipelines", std::move(ids)},
                   {"artifacts", std::move(artifacts)}};
  WriteFileAtomic(config_.output_dir / "manifest.json", DumpJson(manifest));

  RunSummary summary;
  summary.manifest = std::move(manifest);
  summary.predictor_calls = predictor_calls();
  summary.generator_calls = generator_calls_;
  summary.cache_hits = cache_->hits() - hits_before;
  summary.corrupt_cache_entries = cache_->corrupt_entries();
  return summary;
}

// ---------------------------------------------------------------------------

TokenizedCorpus AnnotationsToCorpus(
    const TokenizedCorpus &gold,
    const std::vector<std::vector<SpanAnnotation>> &spans) {
  if (spans.size() != gold.sentences.size()) {
    throw Error(ErrorCode::kCorpusMismatch, "annotation count differs from corpus");
  }
  TokenizedCorpus out{gold.name, gold.split, {}};
  for (std::size_t s = 0; s < spans.size(); ++s) {
    TokenizedSentence sentence{gold.sentences[s].tokens, {}, std::nullopt};
    for (const SpanAnnotation &a : spans[s]) {
      sentence.spans.push_back({a.start, a.end, a.class_id});
    }
    out.sentences.push_back(std::move(sentence));
  }
  return out;
}

TokenizedCorpus RelationLabelsToCorpus(const TokenizedCorpus &gold,
                                       const std::vector<std::string> &labels) {
  if (labels.size() != gold.sentences.size()) {
    throw Error(ErrorCode::kCorpusMismatch, "label count differs from corpus");
  }
  TokenizedCorpus out = gold;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!out.sentences[i].relation) {
      throw Error(ErrorCode::kCorpusMismatch,
                  "sentence " + std::to_string(i) + " has no relation instance");
    }
    out.sentences[i].relation->relation = labels[i];
  }
  return out;
}

EvalReport EvaluatePredictions(const PredictionSet &ps, const TokenizedCorpus &gold,
                               const TaskSpec &spec) {
  if (ps.kind() == TaskKind::kEntity) {
    return EntityMetrics(ps.decoded_spans(), gold, spec);
  }
  std::vector<std::string> labels;
  labels.reserve(ps.decoded_labels().size());
  for (std::size_t c : ps.decoded_labels()) labels.push_back(ps.class_ids()[c]);
  return RelationMetrics(labels, gold, spec);
}

TaskSpec SpecFromLabels(TaskKind kind,
                        const std::vector<const TokenizedCorpus *> &corpora) {
  std::set<std::string> ids;
  for (const TokenizedCorpus *corpus : corpora) {
    for (const TokenizedSentence &s : corpus->sentences) {
      if (kind == TaskKind::kEntity) {
        for (const Span &span : s.spans) ids.insert(span.label);
      } else if (s.relation) {
        ids.insert(s.relation->relation);
      }
    }
  }
  ids.erase(std::string(kOutsideClassId));
  if (ids.empty()) throw Error(ErrorCode::kSchema, "no labels found");
  std::vector<LabelClass> classes;
  for (const std::string &id : ids) classes.push_back({id, id, id, kind});
  return kind == TaskKind::kEntity ? TaskSpec::Entities(std::move(classes))
                                   : TaskSpec::Relations(std::move(classes));
}

}  // namespace descboost
