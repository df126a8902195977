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

#include <map>
#include <set>
#include <string>

#include "descboost/datasets.h"
#include "descboost/error.h"
#include "descboost/serialization.h"
#include "test_util.h"

namespace descboost {
namespace {

using testing::CodeOf;
using testing::DataDir;
using testing::Sentence;
using Counts = std::map<std::string, std::size_t>;

RawDataset LoadToy() {
  RawDataset raw;
  for (Split split : kAllSplits) {
    const auto path = DataDir() / "toy" / (std::string(SplitName(split)) + ".jsonl");
    raw.splits[split] = LoadCorpus(path, CorpusFormat::kJsonl, split).sentences;
  }
  raw.RecomputeInventory();
  return raw;
}

SplitClassMap ToySplits() {
  return SplitClassMapFromJson(LoadJsonFile(DataDir() / "toy" / "splits.json"));
}

TEST_CASE("toy conversion matches hand counts") {
  const ConversionResult result = ZeroShotConvert(LoadToy(), ToySplits());
  const auto &train = result.report.splits.at(Split::kTrain);
  CHECK(train.sentences_before == 6);
  CHECK(train.sentences_after == 3);
  CHECK(train.sentences_removed == 3);
  CHECK(train.mentions_before == Counts{{"PER", 3}, {"ORG", 2}, {"LOC", 2}, {"FAC", 1}, {"DATE", 2}});
  CHECK(train.mentions_after == Counts{{"PER", 3}, {"ORG", 2}});

  const auto &validation = result.report.splits.at(Split::kValidation);
  CHECK(validation.sentences_before == 3);
  CHECK(validation.sentences_after == 2);
  CHECK(validation.mentions_before == Counts{{"PER", 2}, {"DATE", 2}, {"ORG", 1}, {"LOC", 1}});
  CHECK(validation.mentions_after == Counts{{"DATE", 2}});

  const auto &test = result.report.splits.at(Split::kTest);
  CHECK(test.sentences_before == 6);
  CHECK(test.sentences_after == 4);
  CHECK(test.sentences_removed == 2);
  CHECK(test.mentions_before == Counts{{"PER", 4}, {"FAC", 3}, {"LOC", 4}, {"ORG", 2}, {"DATE", 2}});
  CHECK(test.mentions_after == Counts{{"FAC", 3}, {"LOC", 4}});

  CHECK(result.dataset.label_inventory.at(Split::kTest) == std::set<std::string>{"FAC", "LOC"});
  for (const auto &sentence : result.dataset.splits.at(Split::kTest)) {
    CHECK_FALSE(sentence.spans.empty());
  }
}

TEST_CASE("conversion keeps surviving spans untouched") {
  RawDataset raw;
  raw.splits[Split::kTest] = {Sentence("a b c d", {{0, 1, "X"}, {2, 4, "Y"}})};
  const auto out = ZeroShotConvert(raw, {{Split::kTest, {"Y"}}, {Split::kTrain, {"X"}}});
  REQUIRE(out.dataset.splits.at(Split::kTest).size() == 1);
  const auto &s = out.dataset.splits.at(Split::kTest)[0];
  CHECK(s.tokens.size() == 4);
  CHECK(s.spans == std::vector<Span>{{2, 4, "Y"}});
}

TEST_CASE("conversion errors") {
  RawDataset raw;
  raw.splits[Split::kTest] = {Sentence("a", {{0, 1, "Z"}})};
  CHECK(CodeOf([&] { ZeroShotConvert(raw, {{Split::kTest, {"X"}}}); }) ==
        ErrorCode::kUnknownClass);
  CHECK(CodeOf([&] {
          ZeroShotConvert(raw, {{Split::kTest, {"Z"}}, {Split::kTrain, {"Z"}}});
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("relation conversion drops instances of other splits") {
  RawDataset raw;
  raw.kind = TaskKind::kRelation;
  TokenizedSentence a = Sentence("x y");
  a.relation = RelationInstance{{0, 1}, {1, 2}, "r1"};
  TokenizedSentence b = a;
  b.relation->relation = "r2";
  raw.splits[Split::kTest] = {a, b, a};
  const auto out = ZeroShotConvert(raw, {{Split::kTest, {"r1"}}, {Split::kTrain, {"r2"}}});
  CHECK(out.report.splits.at(Split::kTest).sentences_after == 2);
  CHECK(out.report.splits.at(Split::kTest).mentions_after == Counts{{"r1", 2}});
}

TEST_CASE("random class split is a deterministic partition") {
  std::vector<std::string> ids;
  for (int i = 0; i < 20; ++i) ids.push_back("P" + std::to_string(i));
  const std::map<Split, std::size_t> sizes{{Split::kTrain, 12}, {Split::kValidation, 3}, {Split::kTest, 5}};
  const SplitClassMap a = RandomClassSplit(ids, sizes, 7);
  CHECK(a == RandomClassSplit(ids, sizes, 7));
  CHECK(a != RandomClassSplit(ids, sizes, 8));
  std::set<std::string> all;
  for (const auto &[split, classes] : a) {
    CHECK(classes.size() == sizes.at(split));
    all.insert(classes.begin(), classes.end());
  }
  CHECK(all.size() == 20);
  CHECK(CodeOf([&] { RandomClassSplit(ids, {{Split::kTest, 21}}, 1); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("CoNLL BIO columns") {
  const std::string text =
      "-DOCSTART- O\n\n"
      "John B-PER\nSmith I-PER\nvisited O\nNew B-LOC\nYork I-LOC\n\n"
      "Paris B-LOC\nParis B-LOC\n";
  const auto corpus = ParseCorpus(text, CorpusFormat::kConll, Split::kTest, "c", "in.conll");
  REQUIRE(corpus.sentences.size() == 2);
  CHECK(corpus.sentences[0].spans == std::vector<Span>{{0, 2, "PER"}, {3, 5, "LOC"}});
  CHECK(corpus.sentences[1].spans == std::vector<Span>{{0, 1, "LOC"}, {1, 2, "LOC"}});
  CHECK(CodeOf([] {
          ParseCorpus("a X-Y\n", CorpusFormat::kConll, Split::kTest, "c", "in");
        }) == ErrorCode::kParse);
}

TEST_CASE("OntoNotes bracketed entity column") {
  auto row = [](const std::string &word, const std::string &ne) {
    return "doc 0 0 " + word + " NNP - - - - * " + ne + " -\n";
  };
  const std::string text = "#begin document\n" + row("The", "(FAC*") + row("Golden", "*") +
                           row("Gate", "*)") + row("is", "*") + row("big", "*") + "\n" +
                           row("Bob", "(PERSON)") + "#end document\n";
  const auto corpus =
      ParseCorpus(text, CorpusFormat::kOntoNotes, Split::kTest, "o", "in.gold_conll");
  REQUIRE(corpus.sentences.size() == 2);
  CHECK(corpus.sentences[0].tokens ==
        std::vector<std::string>{"The", "Golden", "Gate", "is", "big"});
  CHECK(corpus.sentences[0].spans == std::vector<Span>{{0, 3, "FAC"}});
  CHECK(corpus.sentences[1].spans == std::vector<Span>{{0, 1, "PERSON"}});
}

TEST_CASE("PubTator documents") {
  const std::string text =
      "123|t|Aspirin reduces fever.\n"
      "123|a|It helps Patients with pain.\n"
      "123\t0\t7\tAspirin\tT103,T121\tC0004057\n"
      "123\t33\t41\tPatients\tT101\tC0030705\n"
      "\n";
  const auto corpus = ParseCorpus(text, CorpusFormat::kPubTator, Split::kTest, "m", "in.txt");
  REQUIRE(corpus.sentences.size() == 2);
  CHECK(corpus.sentences[0].tokens ==
        std::vector<std::string>{"Aspirin", "reduces", "fever", "."});
  CHECK(corpus.sentences[0].spans == std::vector<Span>{{0, 1, "T103"}});
  CHECK(corpus.sentences[1].spans == std::vector<Span>{{2, 3, "T101"}});
}

TEST_CASE("FewRel and WikiZS relation inputs") {
  const std::string fewrel = R"({"P17": [{"tokens": ["Rome", "is", "in", "Italy"],
      "h": ["rome", "Q1", [[0]]], "t": ["italy", "Q2", [[3]]]}]})";
  const auto f = ParseCorpus(fewrel, CorpusFormat::kFewRel, Split::kTest, "f", "in.json");
  REQUIRE(f.sentences.size() == 1);
  CHECK(f.sentences[0].relation == RelationInstance{{0, 1}, {3, 4}, "P17"});

  const std::string wiki = R"([{"tokens": ["A", "B", "C", "D"], "edgeSet": [
      {"left": [0, 1], "right": [3], "kbID": "P31"},
      {"left": [2], "right": [3], "kbID": "P279"}]}])";
  const auto w = ParseCorpus(wiki, CorpusFormat::kWikiZs, Split::kTest, "w", "in.json");
  REQUIRE(w.sentences.size() == 2);
  CHECK(w.sentences[0].relation == RelationInstance{{0, 2}, {3, 4}, "P31"});
  CHECK(w.sentences[1].relation->relation == "P279");
}

TEST_CASE("JSONL errors carry line numbers") {
  const std::string good = R"({"tokens": ["a"], "spans": []})";
  try {
    ParseCorpus(good + "\n{not json\n", CorpusFormat::kJsonl, Split::kTest, "j", "in.jsonl");
    FAIL("expected a parse error");
  } catch (const RowError &e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(e.line() == 2);
  }
  try {
    ParseCorpus(good + "\n\n" + R"({"tokens": ["a"], "spans": [{"start": 0, "end": 2, "label": "X"}]})",
                CorpusFormat::kJsonl, Split::kTest, "j", "in.jsonl");
    FAIL("expected a schema error");
  } catch (const RowError &e) {
    CHECK(e.code() == ErrorCode::kSchema);
    CHECK(e.line() == 3);
  }
  CHECK(CodeOf([] { ParseCorpus("  \n", CorpusFormat::kJsonl, Split::kTest, "j", "e"); }) ==
        ErrorCode::kParse);
}

TEST_CASE("JSONL round trip") {
  testing::TempDir dir;
  TokenizedCorpus corpus{"x", Split::kTest, {Sentence("a b", {{1, 2, "Q"}}), Sentence("c")}};
  SaveCorpus(corpus, dir / "x.jsonl");
  CHECK(LoadCorpus(dir / "x.jsonl", CorpusFormat::kJsonl, Split::kTest) == corpus);
}

TEST_CASE("description files") {
  const DescriptionFile file =
      LoadDescriptions(DataDir() / "toy" / "descriptions.json", TaskKind::kEntity);
  CHECK(file.Find("LOC") != nullptr);
  const TaskSpec spec = file.ToTaskSpec({"FAC", "LOC"});
  CHECK(spec.class_ids() == std::vector<std::string>{"O", "FAC", "LOC"});
  CHECK(CodeOf([&] { file.CheckCovers({"LOC", "GPE"}); }) == ErrorCode::kSchema);
  CHECK(CodeOf([] { ParseDescriptions(R"({"A": ""})", TaskKind::kEntity, "d"); }) ==
        ErrorCode::kSchema);
  CHECK(CodeOf([] { ParseDescriptions("[]", TaskKind::kEntity, "d"); }) == ErrorCode::kSchema);
}

TEST_CASE("split statistics") {
  const TokenizedCorpus corpus{"s", Split::kTest,
                               {Sentence("a b c", {{0, 1, "X"}, {1, 2, "X"}}), Sentence("d")}};
  const StatsReport stats = SplitStats(corpus);
  CHECK(stats.sentences == 2);
  CHECK(stats.mention_counts == Counts{{"X", 2}});
  CHECK(stats.tokens_per_sentence.min == 1);
  CHECK(stats.tokens_per_sentence.max == 3);
  CHECK(stats.tokens_per_sentence.mean == doctest::Approx(2.0));
  CHECK(stats.entities_per_sentence.mean == doctest::Approx(1.0));
}

}  // namespace
}  // namespace descboost
