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

#include "descboost/core.h"
#include "descboost/error.h"
#include "descboost/hashing.h"
#include "descboost/serialization.h"
#include "test_util.h"

namespace descboost {
namespace {

using testing::Class;
using testing::CodeOf;
using testing::Sentence;

TEST_CASE("entity task specs put O first") {
  const TaskSpec spec = TaskSpec::Entities({Class("LOC", "a place"), Class("FAC", "a building")});
  CHECK(spec.size() == 3);
  CHECK(spec.at(0).id == "O");
  CHECK(spec.IndexOrThrow("FAC") == 2);
  CHECK_FALSE(spec.IndexOf("PER").has_value());
  CHECK(CodeOf([&] { spec.IndexOrThrow("PER"); }) == ErrorCode::kUnknownClass);
  CHECK(CodeOf([] { TaskSpec::Entities({Class("A", "x"), Class("A", "y")}); }) ==
        ErrorCode::kSchema);
  CHECK(CodeOf([] { TaskSpec::Entities({Class("O", "x")}); }) == ErrorCode::kSchema);
  CHECK(CodeOf([] { TaskSpec::Entities({Class("A", "")}); }) == ErrorCode::kSchema);
}

TEST_CASE("WithDescription replaces exactly one class") {
  const TaskSpec spec = TaskSpec::Entities({Class("LOC", "a place"), Class("FAC", "a building")});
  const TaskSpec changed = spec.WithDescription("LOC", "a city");
  CHECK(changed.at(1).description == "a city");
  CHECK(changed.at(2) == spec.at(2));
  CHECK(spec.at(1).description == "a place");
  CHECK(CodeOf([&] { spec.WithDescription("PER", "x"); }) == ErrorCode::kUnknownClass);
}

TEST_CASE("relation specs with a negative class") {
  const TaskSpec spec = TaskSpec::Relations({Class("born_in", "birth place", TaskKind::kRelation)},
                                            Class("none", "no relation", TaskKind::kRelation));
  CHECK(spec.includes_negative());
  CHECK(spec.first_positive() == 1);
  CHECK(spec.at(0).id == "none");
}

TEST_CASE("ProbVector validation and argmax ties") {
  CHECK(CodeOf([] { ProbVector({}); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ProbVector({0.5, 0.4}); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ProbVector({1.5, -0.5}); }) == ErrorCode::kInvalidArgument);
  CHECK_NOTHROW(ProbVector({0.5, 0.50005}));
  CHECK(ProbVector({0.25, 0.375, 0.375}).ArgMax() == 1);
  CHECK(ProbVector::Uniform(4).ArgMax() == 0);
  CHECK(ProbVector::OneHot(3, 2).ArgMax() == 2);
}

TEST_CASE("sentence validation") {
  CHECK_NOTHROW(ValidateSentence(Sentence("a b c", {{0, 1, "X"}, {1, 3, "Y"}})));
  CHECK(CodeOf([] { ValidateSentence(Sentence("a b c", {{0, 2, "X"}, {1, 3, "Y"}})); }) ==
        ErrorCode::kSchema);
  CHECK(CodeOf([] { ValidateSentence(Sentence("a b", {{1, 3, "X"}})); }) == ErrorCode::kSchema);
  CHECK(CodeOf([] { ValidateSentence(Sentence("a b", {{1, 1, "X"}})); }) == ErrorCode::kSchema);
}

TEST_CASE("decoding merges runs of one class") {
  const std::vector<std::string> ids{"O", "A", "B"};
  const std::vector<ProbVector> probs{
      ProbVector({0.1, 0.8, 0.1}), ProbVector({0.2, 0.6, 0.2}), ProbVector({0.1, 0.2, 0.7}),
      ProbVector({0.9, 0.05, 0.05}), ProbVector({0.3, 0.4, 0.3})};
  const auto spans = DecodeTokenPredictions(probs, ids, 3);
  REQUIRE(spans.size() == 3);
  CHECK(spans[0] == SpanAnnotation{3, 0, 2, "A", (0.8 + 0.6) / 2});
  CHECK(spans[1] == SpanAnnotation{3, 2, 3, "B", 0.7});
  CHECK(spans[2] == SpanAnnotation{3, 4, 5, "A", 0.4});
}

TEST_CASE("prediction sets check widths") {
  CHECK(CodeOf([] {
          PredictionSet::ForEntities("p", {"O", "A"}, {{ProbVector({0.2, 0.3, 0.5})}});
        }) == ErrorCode::kShape);
  const PredictionSet ps =
      PredictionSet::ForRelations("p", {"r1", "r2"}, {ProbVector({0.3, 0.7})});
  CHECK(ps.decoded_labels() == std::vector<std::size_t>{1});
  CHECK(ps.WithPipelineId("q").pipeline_id() == "q");
}

TEST_CASE("stable hashing matches frozen values") {
  // Frozen from an independent FNV-1a/SplitMix64 computation.
  CHECK(Hex64(StableHasher().Add(std::uint64_t{1}).Add("ab").Finish()) == "017bb518d893255b");
  CHECK(Hex64(StableHasher().Finish()) == "f52a15e9a9b5e89b");
  CHECK(StableHasher().Add("ab").Add("c").Finish() != StableHasher().Add("a").Add("bc").Finish());
  for (std::uint64_t x : {0ULL, 1ULL, ~0ULL, 0x123456789ULL}) {
    const double u = HashToUnit(x);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("sha256 known vector and content hashes") {
  CHECK(Sha256Hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  TokenizedCorpus a{"c", Split::kTest, {Sentence("a b", {{0, 1, "X"}})}};
  TokenizedCorpus b = a;
  CHECK(CorpusHash(a) == CorpusHash(b));
  b.sentences[0].spans[0].label = "Y";
  CHECK(CorpusHash(a) != CorpusHash(b));
  const TaskSpec s1 = TaskSpec::Entities({Class("X", "one")});
  CHECK(TaskSpecHash(s1) != TaskSpecHash(s1.WithDescription("X", "two")));
}

TEST_CASE("sentence and prediction JSON round trips") {
  TokenizedSentence s = Sentence("Alice met Bob", {{0, 1, "PER"}, {2, 3, "PER"}});
  CHECK(SentenceFromJson(SentenceToJson(s)) == s);
  TokenizedSentence r = Sentence("Rome is in Italy");
  r.relation = RelationInstance{{0, 1}, {3, 4}, "located_in"};
  CHECK(SentenceFromJson(SentenceToJson(r)) == r);
  CHECK(CodeOf([] { SentenceFromJson(Json::parse(R"({"spans": []})")); }) ==
        ErrorCode::kSchema);

  const PredictionSet ps = PredictionSet::ForEntities(
      "pipe", {"O", "A"}, {{ProbVector({0.1, 0.9}), ProbVector({0.7, 0.3})}, {}});
  CHECK(PredictionSetFromJson(PredictionSetToJson(ps)) == ps);
  CHECK(CodeOf([] { PredictionSetFromJson(Json::parse("{}")); }) == ErrorCode::kProtocol);
}

TEST_CASE("JSON documents report the failing line") {
  try {
    ParseJsonDocument("{\n\"a\": 1,\n}", "doc.json");
    FAIL("expected a parse error");
  } catch (const RowError &e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("exit codes by error class") {
  CHECK(ExitCodeFor(ErrorCode::kConfig) == 1);
  CHECK(ExitCodeFor(ErrorCode::kIo) == 2);
  CHECK(ExitCodeFor(ErrorCode::kParse) == 2);
  CHECK(ExitCodeFor(ErrorCode::kServiceUnavailable) == 3);
  CHECK(ExitCodeFor(ErrorCode::kGenerationEmpty) == 3);
  CHECK(ExitCodeFor(ErrorCode::kCorpusMismatch) == 4);
  CHECK(ExitCodeFor(ErrorCode::kInsufficientSamples) == 4);
}

}  // namespace
}  // namespace descboost
