#pragma once

#include <iosfwd>
#include <optional>

#include "evcoref/neuralcore.hpp"

namespace evcoref {

struct ExtractorConfig {
  FeatureConfig features;
  int ctx_fv_dim = 150;
  int pos_fv_dim = 20;
  int hidden1 = 150;
  int hidden2 = 80;
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 1;
  int min_count = 1;
  // Restrict candidates to tokens whose POS starts with V or N.
  bool restrict_candidates = false;
  // Keep this fraction of negative candidates per epoch; 1.0 keeps all.
  double negative_keep = 1.0;
};

struct MentionExtractorModel {
  ExtractorConfig config;
  Vocab vocab;
  EventEncoder encoder;
  DenseLayer hidden1;
  DenseLayer hidden2;
  DenseLayer output;  // 2 logits: [mention, non-mention]

  std::vector<ParamView> params();
  void zero_grads();
};

MentionExtractorModel make_extractor_model(const ExtractorConfig& config,
                                           const Vocab& vocab);

// Returns (p_mention, p_non_mention).
Vec extractor_forward(const MentionExtractorModel& model,
                      const CandidateIndices& indices);

struct ExtractionScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ExtractorEpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  ExtractionScores dev;
};

// Accumulates analytic gradients of the batch-mean cross-entropy into the
// model's grad buffers (no optimizer step); returns the batch loss.
double accumulate_extractor_gradients(
    MentionExtractorModel& model,
    const std::vector<std::pair<CandidateIndices, int>>& batch);

// Every token is a candidate, positive iff it is the head token of a gold
// mention. The model with the best dev recall across epochs is returned.
MentionExtractorModel train_extractor(const Corpus& train, const Corpus& dev,
                                      const ExtractorConfig& config,
                                      std::vector<ExtractorEpochLog>* log =
                                          nullptr,
                                      std::ostream* progress = nullptr);

// Single-token mentions for every token with p_mention strictly above 0.5.
std::vector<Mention> predict_mentions(const MentionExtractorModel& model,
                                      const Document& doc);

// Gives a predicted mention the gold mention's id when both name the same
// (sentence, head token) position, so downstream chain scoring can intersect
// clusters across the two sides; unmatched mentions keep their generated ids
// and are scored as twinless.
std::vector<Mention> align_mentions_to_gold(const Document& doc,
                                            std::vector<Mention> mentions);

struct MentionKey {
  std::string doc_id;
  int sentence_index = 0;
  int head_index = 0;
  auto operator<=>(const MentionKey&) const = default;
};

ExtractionScores evaluate_extraction(const std::vector<MentionKey>& pred,
                                     const std::vector<MentionKey>& gold);

std::vector<MentionKey> gold_mention_keys(const Corpus& corpus);

// Predicts mentions for every document and scores them against gold.
ExtractionScores evaluate_on_corpus(const MentionExtractorModel& model,
                                    const Corpus& corpus);

}  // namespace evcoref
