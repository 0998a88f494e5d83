#pragma once

#include <string>
#include <vector>

#include "evcoref/corpus.hpp"

namespace evcoref {

// Output of classifying and scoring one mention pair.
struct PairDecision {
  std::string doc_id;
  std::string a_id;
  std::string b_id;
  bool coref = false;
  double confidence = 0.5;  // softmax probability of the predicted class
  double similarity = 0.0;  // cosine score in [-1, 1]
};

struct FilterThresholds {
  double similarity_min = 0.5;  // strict >
  double confidence_max = 0.6;  // strict <
  // When false only the classifier label merges pairs (C-NN / C-MLNN
  // inference); the threshold rescue rule is disabled.
  bool use_threshold_rule = true;
};

// A full partition of one document's mentions, singletons included.
struct ChainSet {
  std::string doc_id;
  std::vector<std::vector<std::string>> clusters;
};

struct UnionFind {
  std::vector<int> parent;
  std::vector<int> rank_;

  explicit UnionFind(int n) : parent(n), rank_(n, 0) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

bool filter_decision(const PairDecision& d, const FilterThresholds& t);

// Connected components over the pairs passing the filter. Output clusters
// are sorted (members and cluster list) so the result is independent of
// decision order.
ChainSet build_chains(const std::string& doc_id,
                      const std::vector<std::string>& mention_ids,
                      const std::vector<PairDecision>& decisions,
                      const FilterThresholds& t);

// Clusters mentions by exact equality of the head token's lemma.
ChainSet lemma_baseline(const Document& doc);

ChainSet gold_chain_set(const Document& doc);

// JSONL with a self-describing header line; the reader accepts files with
// or without one.
void write_chain_sets(const std::vector<ChainSet>& sets,
                      const std::string& path, const std::string& stage);
std::vector<ChainSet> read_chain_sets(const std::string& path);

}  // namespace evcoref
