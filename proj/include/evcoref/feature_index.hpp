#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "evcoref/corpus.hpp"

namespace evcoref {

constexpr int kPadId = 0;
constexpr int kUnkId = 1;

struct Vocab {
  std::unordered_map<std::string, int> word_to_id;
  std::unordered_map<std::string, int> pos_to_id;
  std::unordered_map<std::string, int> lemma_to_id;

  static int lookup(const std::unordered_map<std::string, int>& map,
                    const std::string& key) {
    auto it = map.find(key);
    return it == map.end() ? kUnkId : it->second;
  }

  int word(const std::string& s) const { return lookup(word_to_id, s); }
  int pos(const std::string& s) const { return lookup(pos_to_id, s); }
  int lemma(const std::string& s) const { return lookup(lemma_to_id, s); }

  int word_size() const { return static_cast<int>(word_to_id.size()) + 2; }
  int pos_size() const { return static_cast<int>(pos_to_id.size()) + 2; }
  int lemma_size() const { return static_cast<int>(lemma_to_id.size()) + 2; }
};

struct FeatureConfig {
  int context_window = 5;  // odd, centered on the candidate
  int pos_window = 3;      // odd
  int word_dim = 100;
  int pos_dim = 10;
  int lemma_dim = 100;
};

struct CandidateIndices {
  std::vector<int> context_ids;  // length = context_window
  std::vector<int> pos_ids;      // length = pos_window
  int word_id = kUnkId;
  int lemma_id = kUnkId;

  bool operator==(const CandidateIndices&) const = default;
};

// Ids are assigned by descending frequency, ties broken lexicographically,
// so a given corpus always yields the same vocabulary.
Vocab build_vocab(const Corpus& corpus, int min_count = 1);

CandidateIndices encode_candidate(const Document& doc, int sentence_index,
                                  int token_index, const Vocab& vocab,
                                  const FeatureConfig& config);

}  // namespace evcoref
