#include <doctest.h>

#include "evcoref/feature_index.hpp"
#include "test_helpers.hpp"

using namespace evcoref;
using evcoref::testing::make_doc;

namespace {

Corpus small_corpus() {
  Corpus c;
  // word frequencies: a:3, b:1
  c.documents.push_back(make_doc("d1", 1, {"a/X/a", "a/X/a", "a/Y/a", "b/X/b"}));
  return c;
}

}  // namespace

TEST_CASE("build_vocab applies min_count and maps rare words to UNK") {
  Vocab v = build_vocab(small_corpus(), 2);
  CHECK(v.word("a") == 2);
  CHECK(v.word("b") == kUnkId);
  CHECK(v.word_to_id.size() == 1);
}

TEST_CASE("build_vocab is deterministic") {
  Vocab a = build_vocab(small_corpus(), 1);
  Vocab b = build_vocab(small_corpus(), 1);
  CHECK(a.word_to_id == b.word_to_id);
  CHECK(a.pos_to_id == b.pos_to_id);
  CHECK(a.lemma_to_id == b.lemma_to_id);
}

TEST_CASE("min_count=0 keeps every distinct string") {
  Vocab v = build_vocab(small_corpus(), 0);
  CHECK(v.word_to_id.size() == 2);
  CHECK(v.pos_to_id.size() == 2);
}

TEST_CASE("vocab ids are dense, frequency-ordered, lexicographic ties") {
  Corpus c;
  c.documents.push_back(make_doc("d1", 1, {"z/X/z", "q/X/q", "z/X/z"}));
  Vocab v = build_vocab(c, 1);
  CHECK(v.word("z") == 2);  // more frequent first
  CHECK(v.word("q") == 3);
}

TEST_CASE("encode_candidate pads beyond sentence boundaries") {
  Document doc = make_doc("d1", 1, {"w0/P0/l0", "w1/P1/l1", "w2/P2/l2"});
  Corpus c;
  c.documents.push_back(doc);
  Vocab v = build_vocab(c, 1);
  FeatureConfig cfg;
  auto idx = encode_candidate(doc, 0, 0, v, cfg);
  REQUIRE(idx.context_ids.size() == 5);
  CHECK(idx.context_ids[0] == kPadId);
  CHECK(idx.context_ids[1] == kPadId);
  CHECK(idx.context_ids[2] == v.word("w0"));
  CHECK(idx.context_ids[3] == v.word("w1"));
  CHECK(idx.context_ids[4] == v.word("w2"));
}

TEST_CASE("encode_candidate centers the POS window") {
  Document doc = make_doc("d1", 1, {"w0/P0/l0", "w1/P1/l1", "w2/P2/l2"});
  Corpus c;
  c.documents.push_back(doc);
  Vocab v = build_vocab(c, 1);
  FeatureConfig cfg;
  auto idx = encode_candidate(doc, 0, 1, v, cfg);
  REQUIRE(idx.pos_ids.size() == 3);
  CHECK(idx.pos_ids[0] == v.pos("P0"));
  CHECK(idx.pos_ids[1] == v.pos("P1"));
  CHECK(idx.pos_ids[2] == v.pos("P2"));
}

TEST_CASE("unseen candidate word maps to UNK") {
  Document doc = make_doc("d1", 1, {"novel/P/novel"});
  Corpus empty;
  empty.documents.push_back(make_doc("d2", 1, {"other/P/other"}));
  Vocab v = build_vocab(empty, 1);
  FeatureConfig cfg;
  auto idx = encode_candidate(doc, 0, 0, v, cfg);
  CHECK(idx.word_id == kUnkId);
  CHECK(idx.lemma_id == kUnkId);
}

TEST_CASE("encode_candidate is pure and validates positions") {
  Document doc = make_doc("d1", 1, {"a/X/a", "b/X/b"});
  Corpus c;
  c.documents.push_back(doc);
  Vocab v = build_vocab(c, 1);
  FeatureConfig cfg;
  CHECK(encode_candidate(doc, 0, 1, v, cfg) ==
        encode_candidate(doc, 0, 1, v, cfg));
  CHECK_THROWS_AS(encode_candidate(doc, 0, 2, v, cfg), std::out_of_range);
  CHECK_THROWS_AS(encode_candidate(doc, 1, 0, v, cfg), std::out_of_range);
}

TEST_CASE("no id in a bundle exceeds the vocabulary size") {
  Corpus c = generate_synthetic_corpus(3, 2, 2, 0.2);
  Vocab v = build_vocab(c, 1);
  FeatureConfig cfg;
  for (const auto& doc : c.documents)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent) {
        auto idx = encode_candidate(doc, tok.sentence_index, tok.token_index,
                                    v, cfg);
        for (int id : idx.context_ids) CHECK(id < v.word_size());
        for (int id : idx.pos_ids) CHECK(id < v.pos_size());
        CHECK(idx.word_id < v.word_size());
        CHECK(idx.lemma_id < v.lemma_size());
      }
}
