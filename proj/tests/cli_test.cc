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

#include "doctest.h"

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "descboost/cli.h"
#include "descboost/config.h"
#include "descboost/error.h"
#include "descboost/hashing.h"
#include "descboost/serialization.h"
#include "test_util.h"

namespace descboost {
namespace {

namespace fs = std::filesystem;
using testing::CodeOf;
using testing::DataDir;
using testing::TempDir;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "descboost");
  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

EnvLookup MapEnv(std::map<std::string, std::string> vars) {
  return [vars](const std::string &name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

// Toy entity config with data paths relative to the config directory.
Json ToyConfig() {
  return Json::parse(R"({
    "task": "entity",
    "seed": 7,
    "dataset": {"name": "toy", "format": "jsonl",
      "files": {"train": "data/train.jsonl", "validation": "data/validation.jsonl",
                "test": "data/test.jsonl"},
      "splits_map": "data/splits.json"},
    "descriptions": "data/descriptions.json",
    "variations": {"n": 2},
    "predictor": {"backend": "noisy_oracle", "error_rate": 0.2},
    "cache_dir": "cache",
    "output_dir": "out"
  })");
}

fs::path StageToy(const TempDir &dir, const Json &config) {
  fs::create_directories(dir / "data");
  for (const auto &entry : fs::directory_iterator(DataDir() / "toy")) {
    fs::copy_file(entry.path(), dir / "data" / entry.path().filename());
  }
  const fs::path path = dir / "config.json";
  WriteFileAtomic(path, config.dump(2));
  return path;
}

TEST_CASE("config errors name the field") {
  TempDir dir;
  StageToy(dir, ToyConfig());
  auto error_for = [&](const Json &config) -> std::string {
    try {
      ParseRunConfig(config.dump(), dir / "config.json", MapEnv({}));
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kConfig);
      return e.what();
    }
    FAIL("expected a config error");
    return "";
  };
  Json bad = ToyConfig();
  bad["variations"]["n"] = "ten";
  CHECK(error_for(bad).find("variations.n") != std::string::npos);
  bad = ToyConfig();
  bad["predictor"]["error_rat"] = 0.1;
  CHECK(error_for(bad).find("predictor.error_rat") != std::string::npos);
  bad = ToyConfig();
  bad["ensemble"] = {{"min_votes", 0}};
  CHECK(error_for(bad).find("ensemble") != std::string::npos);
  bad = ToyConfig();
  bad["dataset"]["files"]["test"] = "data/missing.jsonl";
  CHECK(error_for(bad).find("dataset.files.test") != std::string::npos);

  const RunConfig ok = ParseRunConfig(ToyConfig().dump(), dir / "config.json", MapEnv({}));
  CHECK(ok.num_pipelines() == 9);
  CHECK(ok.output_dir == dir / "out");
  CHECK(ok.dataset.files.at(Split::kTest) == dir / "data" / "test.jsonl");
}

TEST_CASE("environment interpolation") {
  const EnvLookup env = MapEnv({{"HOST", "localhost"}, {"PORT", "9000"}});
  CHECK(Interpolate("http://${HOST}:${PORT}/", env, "f") == "http://localhost:9000/");
  CHECK(Interpolate("plain", env, "f") == "plain");
  CHECK(CodeOf([&] { Interpolate("${NOPE}", env, "f"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([&] { Interpolate("${HOST", env, "f"); }) == ErrorCode::kConfig);

  TempDir dir;
  Json config = ToyConfig();
  config["cache_dir"] = "${CACHE_ROOT}/c";
  StageToy(dir, config);
  const RunConfig parsed = ParseRunConfig(config.dump(), dir / "config.json",
                                          MapEnv({{"CACHE_ROOT", (dir / "x").string()}}));
  CHECK(parsed.cache_dir == dir / "x" / "c");
}

TEST_CASE("exit codes") {
  CHECK(Cli({"--help"}).code == 0);
  CHECK(Cli({"run"}).code == 1);
  CHECK(Cli({"frobnicate"}).code == 1);
  TempDir dir;
  CHECK(Cli({"run", "--config", (dir / "absent.json").string()}).code == 2);
  Json bad = ToyConfig();
  bad["task"] = "poetry";
  const fs::path path = StageToy(dir, bad);
  const CliResult r = Cli({"run", "--config", path.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("task") != std::string::npos);

  WriteFileAtomic(dir / "pred.jsonl", R"({"tokens": ["a"], "spans": [{"start": 0, "end": 1, "label": "X"}]})");
  WriteFileAtomic(dir / "gold.jsonl", "{\"tokens\": [\"a\"], \"spans\": []}\n{\"tokens\": [\"b\"], \"spans\": []}\n");
  CHECK(Cli({"evaluate", "--pred", (dir / "pred.jsonl").string(), "--gold",
             (dir / "gold.jsonl").string(), "--task", "entity"})
            .code == 4);
}

TEST_CASE("evaluate against itself") {
  const std::string gold = (DataDir() / "toy" / "test.jsonl").string();
  const CliResult r = Cli({"evaluate", "--pred", gold, "--gold", gold, "--task", "entity"});
  REQUIRE(r.code == 0);
  const Json report = Json::parse(r.out);
  for (const char *key : {"precision", "recall", "micro_f1", "macro_f1", "accuracy"}) {
    CHECK(report[key].get<double>() == 1.0);
  }
  const std::string rel = (DataDir() / "toy_rel" / "test.jsonl").string();
  const CliResult rr = Cli({"evaluate", "--pred", rel, "--gold", rel, "--task", "relation"});
  REQUIRE(rr.code == 0);
  CHECK(Json::parse(rr.out)["macro_f1"].get<double>() == 1.0);
}

TEST_CASE("rank honours a candidate file") {
  TempDir dir;
  fs::create_directories(dir / "data");
  WriteFileAtomic(dir / "data" / "test.jsonl",
                  R"({"tokens": ["a", "b", "c"], "spans": [{"start": 0, "end": 1, "label": "X"}]})");
  WriteFileAtomic(dir / "data" / "splits.json", R"({"test": ["X"]})");
  WriteFileAtomic(dir / "data" / "descriptions.json", R"({"X": "placeholder text"})");
  WriteFileAtomic(dir / "candidates.json", R"(["a", "a b"])");
  const Json config = Json::parse(R"({
    "task": "entity", "seed": 1,
    "dataset": {"name": "abc", "files": {"test": "data/test.jsonl"},
                "splits_map": "data/splits.json"},
    "descriptions": "data/descriptions.json",
    "variations": {"n": 1, "strategies": ["paraphrase"]},
    "predictor": {"backend": "lexical_sim", "window": 2, "o_bias": 1.0, "temperature": 0.001}
  })");
  WriteFileAtomic(dir / "config.json", config.dump());
  const CliResult r = Cli({"rank", "--config", (dir / "config.json").string(), "--class", "X",
                           "--candidates", (dir / "candidates.json").string()});
  REQUIRE(r.code == 0);
  const Json out = Json::parse(r.out);
  CHECK(out["selected"] == "a b");
  CHECK(out["reports"][0]["corpus_entropy"].get<double>() == doctest::Approx(0.0));
  CHECK(out["reports"][1]["fell_back_to_all_tokens"] == true);
  CHECK(Cli({"rank", "--config", (dir / "config.json").string(), "--class", "Y"}).code == 4);
}

TEST_CASE("run writes a manifest and reuses the cache") {
  TempDir dir;
  const fs::path path = StageToy(dir, ToyConfig());
  const CliResult first = Cli({"run", "--config", path.string()});
  REQUIRE(first.code == 0);
  const Json summary = Json::parse(first.out);
  CHECK(summary["pipelines"] == 9);
  CHECK(summary["predictor_calls"].get<int>() > 0);
  const std::string manifest = ReadFile(dir / "out" / "manifest.json");

  const CliResult second = Cli({"run", "--config", path.string()});
  REQUIRE(second.code == 0);
  CHECK(Json::parse(second.out)["predictor_calls"] == 0);
  CHECK(Json::parse(second.out)["generator_calls"] == 0);
  CHECK(ReadFile(dir / "out" / "manifest.json") == manifest);

  const Json m = Json::parse(manifest);
  for (const Json &artifact : m["artifacts"]) {
    const std::string rel = artifact["path"];
    CHECK(Sha256Hex(ReadFile(dir / "out" / rel)) == artifact["sha256"]);
  }
  CHECK(fs::exists(dir / "out" / "ensemble" / "annotations.jsonl.meta.json"));

  const CliResult eval =
      Cli({"evaluate", "--pred", (dir / "out" / "ensemble" / "annotations.jsonl").string(),
           "--gold", (dir / "out" / "converted" / "test.jsonl").string(), "--task", "entity"});
  CHECK(eval.code == 0);
}

}  // namespace
}  // namespace descboost
