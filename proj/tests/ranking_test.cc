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

#include <cmath>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "descboost/error.h"
#include "descboost/inference.h"
#include "descboost/ranking.h"
#include "oracles.h"
#include "test_util.h"

namespace descboost {
namespace {

using testing::Class;
using testing::CodeOf;
using testing::Sentence;

TEST_CASE("entropy bounds and extremes") {
  std::mt19937_64 rng(42);
  std::gamma_distribution<double> gamma(0.5, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 2 + trial % 19;
    std::vector<double> p(k);
    double total = 0.0;
    for (double &v : p) total += (v = gamma(rng));
    for (double &v : p) v /= total;
    const double h = DistEntropy(p, false);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(k)) + 1e-12);
    CHECK(h == doctest::Approx(static_cast<double>(oracle::Entropy(p))).epsilon(1e-12));
    const double hn = DistEntropy(p, true);
    CHECK(hn >= 0.0);
    CHECK(hn <= 1.0);
  }
  for (std::size_t k = 2; k <= 20; ++k) {
    CHECK(DistEntropy(ProbVector::Uniform(k), false) ==
          doctest::Approx(std::log(static_cast<double>(k))));
    CHECK(DistEntropy(ProbVector::Uniform(k), true) == doctest::Approx(1.0));
    CHECK(DistEntropy(ProbVector::OneHot(k, k - 1), true) == 0.0);
  }
  CHECK(CodeOf([] { DistEntropy(ProbVector({1.0}), true); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("oracle corpus entropy has a closed form") {
  const NoisyOraclePredictor model("oracle", {0.0, 1});
  const TaskSpec spec =
      TaskSpec::Entities({Class("A", "a"), Class("B", "b"), Class("C", "c")});
  const TokenizedCorpus corpus{
      "c", Split::kTest, {Sentence("x y z", {{0, 1, "A"}, {2, 3, "C"}}), Sentence("w")}};
  const CorpusEntropy h = ComputeCorpusEntropy(model.Predict(corpus, spec, "p"), false);
  const double expected = -(0.9 * std::log(0.9) + 0.1 * std::log(0.1 / 3));
  CHECK(h.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(h.mentions_per_sentence == std::vector<std::size_t>{2, 0});
  CHECK_FALSE(h.fell_back_to_all_tokens);
}

TEST_CASE("sharper description ranks first") {
  const LexicalSimPredictor model("lex", {2, 1.0, 0.001});
  const TaskSpec spec = TaskSpec::Entities({Class("X", "placeholder")});
  const TokenizedCorpus corpus{"c", Split::kTest, {Sentence("a b c")}};
  const auto reports = RankDescriptions("X", {"a", "a b"}, corpus, spec, model, true);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].description == "a b");
  CHECK(reports[0].corpus_entropy == doctest::Approx(0.0));
  CHECK_FALSE(reports[0].fell_back_to_all_tokens);
  CHECK(reports[0].mentions_per_sentence == std::vector<std::size_t>{3});
  CHECK(reports[1].description == "a");
  CHECK(reports[1].corpus_entropy == doctest::Approx(1.0));
  CHECK(reports[1].fell_back_to_all_tokens);
  CHECK(SelectMinEntropy(reports) == "a b");
}

// Records every spec it is asked about and fails on a poisoned description.
class RecordingPredictor : public Predictor {
 public:
  explicit RecordingPredictor(const Predictor &inner) : inner_(inner) {}
  const std::string &model_id() const override { return inner_.model_id(); }
  std::string CacheSalt(std::string_view id) const override { return inner_.CacheSalt(id); }
  PredictionSet PredictEntities(const TokenizedCorpus &corpus, const TaskSpec &spec,
                                std::string_view id) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      specs.push_back(spec);
      ids.emplace_back(id);
    }
    for (const LabelClass &c : spec.classes()) {
      if (c.description == "poison") throw Error(ErrorCode::kServiceUnavailable, "down");
    }
    return inner_.PredictEntities(corpus, spec, id);
  }
  PredictionSet PredictRelations(const TokenizedCorpus &corpus, const TaskSpec &spec,
                                 std::string_view id) const override {
    return inner_.PredictRelations(corpus, spec, id);
  }

  mutable std::vector<TaskSpec> specs;
  mutable std::vector<std::string> ids;

 private:
  const Predictor &inner_;
  mutable std::mutex mu_;
};

TEST_CASE("only the ranked class description changes") {
  const LexicalSimPredictor lex("lex", {});
  const RecordingPredictor model(lex);
  const TaskSpec spec = TaskSpec::Entities(
      {Class("X", "alpha"), Class("Y", "beta words"), Class("Z", "gamma words")});
  const TokenizedCorpus corpus{"c", Split::kTest, {Sentence("alpha beta gamma")}};
  const auto reports =
      RankDescriptions("Y", {"one", "poison", "two three"}, corpus, spec, model, true);
  REQUIRE(model.specs.size() == 3);
  for (std::size_t i = 0; i < model.specs.size(); ++i) {
    CHECK(model.specs[i].at(1) == spec.at(1));
    CHECK(model.specs[i].at(3) == spec.at(3));
    CHECK(model.specs[i].at(0) == spec.at(0));
    CHECK(model.ids[i] == "rank/Y/" + std::to_string(i));
  }
  CHECK(model.specs[2].at(2).description == "two three");
  REQUIRE(reports.size() == 3);
  CHECK(reports[2].description == "poison");
  CHECK(reports[2].error.has_value());
  CHECK_FALSE(reports[0].error.has_value());
  CHECK(reports.back().ToJson()["error"].is_string());
}

TEST_CASE("ranking failures") {
  const LexicalSimPredictor lex("lex", {});
  const RecordingPredictor model(lex);
  const TaskSpec spec = TaskSpec::Entities({Class("X", "alpha")});
  const TokenizedCorpus corpus{"c", Split::kTest, {Sentence("alpha")}};
  CHECK(CodeOf([&] { RankDescriptions("X", {}, corpus, spec, model); }) ==
        ErrorCode::kEmptyCandidates);
  CHECK(CodeOf([&] { RankDescriptions("Q", {"a"}, corpus, spec, model); }) ==
        ErrorCode::kUnknownClass);
  const auto all_failed = RankDescriptions("X", {"poison"}, corpus, spec, model);
  CHECK(CodeOf([&] { SelectMinEntropy(all_failed); }) == ErrorCode::kEmptyCandidates);
}

TEST_CASE("ties break by length then text") {
  std::vector<EntropyReport> reports(3);
  reports[0].description = "bb";
  reports[1].description = "a";
  reports[2].description = "ab";
  SortReports(reports);
  CHECK(reports[0].description == "a");
  CHECK(reports[1].description == "ab");
  CHECK(reports[2].description == "bb");
}

}  // namespace
}  // namespace descboost
