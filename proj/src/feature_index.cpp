#include "evcoref/feature_index.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace evcoref {

namespace {

std::unordered_map<std::string, int> assign_ids(
    const std::map<std::string, int>& freq, int min_count) {
  std::vector<std::pair<std::string, int>> entries;
  for (const auto& [s, n] : freq)
    if (n >= min_count) entries.emplace_back(s, n);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::unordered_map<std::string, int> out;
  int next = kUnkId + 1;
  for (const auto& [s, n] : entries) out[s] = next++;
  return out;
}

}  // namespace

Vocab build_vocab(const Corpus& corpus, int min_count) {
  std::map<std::string, int> word_freq, pos_freq, lemma_freq;
  for (const auto& doc : corpus.documents)
    for (const auto& sent : doc.sentences)
      for (const auto& tok : sent) {
        ++word_freq[tok.surface];
        ++pos_freq[tok.pos];
        ++lemma_freq[tok.lemma];
      }
  Vocab v;
  v.word_to_id = assign_ids(word_freq, min_count);
  v.pos_to_id = assign_ids(pos_freq, min_count);
  v.lemma_to_id = assign_ids(lemma_freq, min_count);
  return v;
}

CandidateIndices encode_candidate(const Document& doc, int sentence_index,
                                  int token_index, const Vocab& vocab,
                                  const FeatureConfig& config) {
  if (sentence_index < 0 ||
      sentence_index >= static_cast<int>(doc.sentences.size()))
    throw std::out_of_range("encode_candidate: sentence index out of range");
  const auto& sent = doc.sentences[sentence_index];
  if (token_index < 0 || token_index >= static_cast<int>(sent.size()))
    throw std::out_of_range("encode_candidate: token index out of range");

  CandidateIndices idx;
  int chalf = (config.context_window - 1) / 2;
  for (int off = -chalf; off <= chalf; ++off) {
    int pos = token_index + off;
    idx.context_ids.push_back(pos < 0 || pos >= static_cast<int>(sent.size())
                                  ? kPadId
                                  : vocab.word(sent[pos].surface));
  }
  int phalf = (config.pos_window - 1) / 2;
  for (int off = -phalf; off <= phalf; ++off) {
    int pos = token_index + off;
    idx.pos_ids.push_back(pos < 0 || pos >= static_cast<int>(sent.size())
                              ? kPadId
                              : vocab.pos(sent[pos].pos));
  }
  idx.word_id = vocab.word(sent[token_index].surface);
  idx.lemma_id = vocab.lemma(sent[token_index].lemma);
  return idx;
}

}  // namespace evcoref
