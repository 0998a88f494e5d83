#pragma once

#include <iosfwd>

#include "evcoref/chain_builder.hpp"
#include "evcoref/neuralcore.hpp"

namespace evcoref {

// C-NN trains the classifier alone; C-MLNN and MLNN train jointly. At
// inference only MLNN enables the threshold rescue rule.
enum class AblationMode { CNN, CMLNN, MLNN };

AblationMode parse_mode(const std::string& name);
std::string mode_name(AblationMode mode);
bool mode_trains_jointly(AblationMode mode);
bool mode_uses_threshold_rule(AblationMode mode);

struct MLNNConfig {
  FeatureConfig features;
  int ctx_fv_dim = 150;
  int pos_fv_dim = 20;
  int cn_hidden1 = 300;
  int cn_hidden2 = 150;
  int sn_hidden1 = 150;
  int sn_hidden2 = 80;
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 1;
  int min_count = 1;
  double negative_keep = 1.0;  // fraction of non-coref pairs kept per epoch
  FilterThresholds thresholds;
};

struct MLNNModel {
  MLNNConfig config;
  Vocab vocab;
  EventEncoder encoder;  // shared by CN and SN
  DenseLayer cn_hidden1;
  DenseLayer cn_hidden2;
  DenseLayer cn_output;  // 2 logits: [coref, non-coref]
  DenseLayer sn_hidden1;
  DenseLayer sn_hidden2;

  std::vector<ParamView> params();
  std::vector<ParamView> sn_params();
  void zero_grads();
};

MLNNModel make_mlnn_model(const MLNNConfig& config, const Vocab& vocab);

// Label 0 = coreferent (same gold chain), 1 = not.
struct PairExample {
  Mention a;  // a precedes b in document order
  Mention b;
  int label = 1;
};

std::vector<PairExample> generate_pairs(const std::vector<Mention>& mentions,
                                        const std::vector<Chain>* gold_chains);

EncoderTrace encode_event(const MLNNModel& model, const Document& doc,
                          const Mention& mention);

struct PairOutput {
  bool coref = false;
  double confidence = 0.5;  // probability of the predicted class
  double p_non_coref = 0.5;  // y-hat of the loss
  double similarity = 0.0;
  bool zero_norm = false;
};

PairOutput classify_and_score(const MLNNModel& model, const Document& doc,
                              const Mention& a, const Mention& b);

// l1 = batch-mean cross-entropy, l2 = batch-sum similarity loss (zero in
// C-NN mode), l_all = l1 + l2.
LossValues joint_loss(const std::vector<double>& p_non_coref,
                      const std::vector<double>& similarities,
                      const std::vector<int>& labels, bool jointly);

struct JointEpochLog {
  int epoch = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double l_all = 0.0;
  double dev_conll = 0.0;
};

// Accumulates analytic gradients of the batch loss into the model's grad
// buffers (no optimizer step). Used by training and by gradient checks.
LossValues accumulate_pair_gradients(MLNNModel& model, const Document& doc,
                                     const std::vector<PairExample>& batch,
                                     bool jointly);

MLNNModel train_joint(const Corpus& train, const Corpus& dev,
                      const MLNNConfig& config, AblationMode mode,
                      std::vector<JointEpochLog>* log = nullptr,
                      std::ostream* progress = nullptr);

// One decision per generated pair, in document-pair order.
std::vector<PairDecision> predict_pairs(const MLNNModel& model,
                                        const Document& doc,
                                        const std::vector<Mention>& mentions);

}  // namespace evcoref
