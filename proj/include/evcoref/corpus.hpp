#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evcoref {

struct Token {
  std::string surface;
  std::string pos;
  std::string lemma;
  int sentence_index = 0;
  int token_index = 0;

  bool operator==(const Token&) const = default;
};

// A mention is a token span with a designated head token.
// head_index is always the span start; multi-word mentions are represented
// by their first word.
struct Mention {
  std::string mention_id;
  int sentence_index = 0;
  int start = 0;
  int end = 0;
  int head_index = 0;

  bool operator==(const Mention&) const = default;
};

struct Chain {
  std::string chain_id;
  std::vector<std::string> mention_ids;  // kept sorted, size >= 1

  bool operator==(const Chain&) const = default;
};

struct Document {
  std::string doc_id;
  int topic_id = 0;
  std::vector<std::vector<Token>> sentences;
  std::vector<Mention> gold_mentions;
  std::vector<Chain> gold_chains;

  const Mention* find_mention(const std::string& id) const;
  const Token& head_token(const Mention& m) const;

  bool operator==(const Document&) const = default;
};

struct Corpus {
  std::vector<Document> documents;

  bool operator==(const Corpus&) const = default;
};

struct CorpusStats {
  std::int64_t documents = 0;
  std::int64_t sentences = 0;
  std::int64_t mentions = 0;
  std::int64_t chains = 0;
  double mean_chain_length = 0.0;  // 0.0 when there are no chains
};

struct SplitResult {
  Corpus train;
  Corpus dev;
  Corpus test;
  int dropped = 0;  // documents whose topic is in no split
};

// Thrown for malformed input files and invariant violations. The message
// carries the line number or doc_id where the problem was found.
struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Corpus load_corpus(const std::string& path);
void write_corpus(const Corpus& corpus, const std::string& path);

// Validates all document invariants; throws CorpusError naming the doc_id
// and the violated invariant.
void validate_document(const Document& doc);

SplitResult split_topics(const Corpus& corpus,
                         const std::vector<int>& train_topics,
                         const std::vector<int>& dev_topics,
                         const std::vector<int>& test_topics);

CorpusStats corpus_stats(const Corpus& corpus);

// Deterministic synthetic corpus with planted event chains. Mentions of a
// chain share a lemma family and per-chain context vocabulary; with noise=0
// the gold clustering is exactly recoverable from head lemmas.
Corpus generate_synthetic_corpus(std::uint64_t seed, int n_topics,
                                 int docs_per_topic, double noise);

}  // namespace evcoref
