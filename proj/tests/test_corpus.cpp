#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "evcoref/chain_builder.hpp"
#include "evcoref/coref_metrics.hpp"
#include "evcoref/corpus.hpp"
#include "test_helpers.hpp"

using namespace evcoref;

namespace {

std::string temp_path(const std::string& name) {
  return "/tmp/evcoref_test_" + name;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("load_corpus accepts a minimal well-formed document") {
  auto path = temp_path("minimal.jsonl");
  write_text(path,
             R"({"doc_id":"d1","topic":1,"sentences":[[{"w":"fires","p":"VB","l":"fire"},{"w":"burned","p":"VB","l":"burn"},{"w":"today","p":"NN","l":"today"}]],"mentions":[{"id":"m1","sent":0,"start":0,"end":0}],"chains":[["m1"]]})"
             "\n");
  Corpus c = load_corpus(path);
  REQUIRE(c.documents.size() == 1);
  auto s = corpus_stats(c);
  CHECK(s.documents == 1);
  CHECK(s.sentences == 1);
  CHECK(s.mentions == 1);
  CHECK(s.chains == 1);
  CHECK(s.mean_chain_length == doctest::Approx(1.0));
}

TEST_CASE("load_corpus rejects span start > end") {
  auto path = temp_path("badspan.jsonl");
  write_text(path,
             R"({"doc_id":"d1","topic":1,"sentences":[[{"w":"a","p":"X","l":"a"},{"w":"b","p":"X","l":"b"},{"w":"c","p":"X","l":"c"}]],"mentions":[{"id":"m1","sent":0,"start":2,"end":1}],"chains":[]})"
             "\n");
  CHECK_THROWS_WITH_AS(load_corpus(path),
                       doctest::Contains("span start > end"), CorpusError);
}

TEST_CASE("load_corpus rejects duplicate doc_id") {
  auto path = temp_path("dup.jsonl");
  std::string line =
      R"({"doc_id":"d1","topic":1,"sentences":[[{"w":"a","p":"X","l":"a"}]],"mentions":[],"chains":[]})";
  write_text(path, line + "\n" + line + "\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("duplicate"),
                       CorpusError);
}

TEST_CASE("load_corpus rejects unknown fields and reports the line") {
  auto path = temp_path("unknown.jsonl");
  write_text(path,
             R"({"doc_id":"d1","topic":1,"sentences":[],"mentions":[],"chains":[],"extra":1})"
             "\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 1"),
                       CorpusError);
}

TEST_CASE("load_corpus reports malformed JSON with its line number") {
  auto path = temp_path("malformed.jsonl");
  write_text(
      path,
      R"({"doc_id":"d1","topic":1,"sentences":[],"mentions":[],"chains":[]})"
      "\n{not json\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 2"),
                       CorpusError);
}

TEST_CASE("corpus write/load round-trips to an equal corpus") {
  Corpus c = generate_synthetic_corpus(7, 3, 2, 0.3);
  auto path = temp_path("roundtrip.jsonl");
  write_corpus(c, path);
  Corpus back = load_corpus(path);
  CHECK(back == c);
}

TEST_CASE("split_topics routes documents and drops uncovered topics") {
  Corpus c;
  for (int t : {1, 2, 3})
    c.documents.push_back(
        evcoref::testing::make_doc("d" + std::to_string(t), t, {"a/X/a"}));
  auto split = split_topics(c, {1}, {2}, {});
  CHECK(split.train.documents.size() == 1);
  CHECK(split.dev.documents.size() == 1);
  CHECK(split.test.documents.empty());
  CHECK(split.dropped == 1);
}

TEST_CASE("split_topics rejects overlapping topic sets") {
  Corpus c;
  CHECK_THROWS_AS(split_topics(c, {1}, {1}, {}), CorpusError);
}

TEST_CASE("corpus_stats on mixed chain sizes") {
  Document doc = evcoref::testing::make_doc(
      "d1", 1, {"a/X/a", "b/X/b", "c/X/c", "d/X/d", "e/X/e", "f/X/f"});
  for (int i = 0; i < 6; ++i)
    doc.gold_mentions.push_back(
        evcoref::testing::make_mention("m" + std::to_string(i), 0, i));
  doc.gold_chains.push_back({"c0", {"m0", "m1"}});
  doc.gold_chains.push_back({"c1", {"m2", "m3", "m4", "m5"}});
  Corpus c;
  c.documents.push_back(doc);
  auto s = corpus_stats(c);
  CHECK(s.chains == 2);
  CHECK(s.mean_chain_length == doctest::Approx(3.0));
}

TEST_CASE("corpus_stats of an empty corpus is all zeros") {
  auto s = corpus_stats(Corpus{});
  CHECK(s.documents == 0);
  CHECK(s.mean_chain_length == 0.0);
}

TEST_CASE("synthetic generation is a pure function of its arguments") {
  Corpus a = generate_synthetic_corpus(42, 2, 3, 0.25);
  Corpus b = generate_synthetic_corpus(42, 2, 3, 0.25);
  CHECK(a == b);
  Corpus c = generate_synthetic_corpus(43, 2, 3, 0.25);
  CHECK(a.documents.size() == c.documents.size());
  CHECK_FALSE(a == c);
}

TEST_CASE("noise-free synthetic corpus is lemma-pure per chain") {
  Corpus c = generate_synthetic_corpus(11, 2, 3, 0.0);
  for (const auto& doc : c.documents) {
    for (const auto& chain : doc.gold_chains) {
      std::set<std::string> lemmas;
      for (const auto& id : chain.mention_ids)
        lemmas.insert(doc.head_token(*doc.find_mention(id)).lemma);
      CHECK(lemmas.size() == 1);
    }
    // distinct chains use distinct lemma families
    std::set<std::string> chain_lemmas;
    for (const auto& chain : doc.gold_chains)
      chain_lemmas.insert(
          doc.head_token(*doc.find_mention(chain.mention_ids[0])).lemma);
    CHECK(chain_lemmas.size() == doc.gold_chains.size());
  }
}

TEST_CASE("lemma baseline is perfect on a noise-free synthetic corpus") {
  Corpus c = generate_synthetic_corpus(5, 2, 3, 0.0);
  std::vector<ChainSet> gold, pred;
  for (const auto& doc : c.documents) {
    gold.push_back(gold_chain_set(doc));
    pred.push_back(lemma_baseline(doc));
  }
  CHECK(score_corpus(gold, pred).conll == doctest::Approx(1.0));
}

TEST_CASE("noise=0.5 breaks lemma purity somewhere") {
  Corpus c = generate_synthetic_corpus(3, 4, 4, 0.5);
  bool impure = false;
  for (const auto& doc : c.documents)
    for (const auto& chain : doc.gold_chains) {
      std::set<std::string> lemmas;
      for (const auto& id : chain.mention_ids)
        lemmas.insert(doc.head_token(*doc.find_mention(id)).lemma);
      if (lemmas.size() > 1) impure = true;
    }
  CHECK(impure);
}

TEST_CASE("chains are disjoint in generated corpora") {
  Corpus c = generate_synthetic_corpus(9, 3, 3, 0.4);
  for (const auto& doc : c.documents) {
    size_t total = 0;
    std::set<std::string> all;
    for (const auto& chain : doc.gold_chains) {
      total += chain.mention_ids.size();
      all.insert(chain.mention_ids.begin(), chain.mention_ids.end());
    }
    CHECK(total == all.size());
  }
}
