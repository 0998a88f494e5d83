#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "evcoref/feature_index.hpp"

namespace evcoref {

using Vec = std::vector<double>;

struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const {
    return a.data() + static_cast<size_t>(r) * cols;
  }
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { Tanh, Identity };

// Dense layer y = act(x.W + b). Gradients accumulate into gw/gb until
// zero_grads().
struct DenseLayer {
  Mat w;  // in_dim x out_dim
  Vec b;
  Activation act = Activation::Tanh;
  Mat gw;
  Vec gb;

  DenseLayer() = default;
  DenseLayer(int in_dim, int out_dim, Activation a)
      : w(in_dim, out_dim), b(out_dim, 0.0), act(a), gw(in_dim, out_dim),
        gb(out_dim, 0.0) {}

  int in_dim() const { return w.rows; }
  int out_dim() const { return w.cols; }

  Vec forward(const Vec& x) const;
  // x and y are the forward input and post-activation output; dy is the
  // upstream gradient. Returns dL/dx and accumulates dL/dW, dL/db.
  Vec backward(const Vec& x, const Vec& y, const Vec& dy);
};

// Lookup table with the PAD row (row 0) frozen at all-zeros.
struct EmbeddingTable {
  Mat m;
  Mat grad;

  EmbeddingTable() = default;
  EmbeddingTable(int vocab_size, int dim) : m(vocab_size, dim),
                                            grad(vocab_size, dim) {}

  int dim() const { return m.cols; }
  void accumulate(int id, const double* d);  // no-op for the PAD row
};

// One named trainable parameter block; frozen_prefix leading elements are
// excluded from updates and gradient checks (the PAD embedding row).
struct ParamView {
  std::string name;
  Vec* value = nullptr;
  Vec* grad = nullptr;
  size_t frozen_prefix = 0;
};

struct AdadeltaState {
  double rho = 0.95;
  double eps = 1e-6;
  std::vector<Vec> acc_grad;    // E[g^2], parallel to the param list
  std::vector<Vec> acc_update;  // E[dx^2]
};

void adadelta_step(const std::vector<ParamView>& params, AdadeltaState& state);

// ---- activations and losses ----

Vec softmax(const Vec& logits);

constexpr double kProbClamp = 1e-7;
constexpr double kSimClampEps = 1e-4;

// Per-example cross-entropy -[y ln p + (1-y) ln(1-p)], with p
// clamped to [1e-7, 1-1e-7]. `clamped` reports whether the clamp fired.
double cross_entropy(double y_hat, int label, bool* clamped = nullptr);

// ln(max(|m - s|, 1e-4)) with m = +1 for label 0 (coreferent), -1 for
// label 1.
double similarity_loss(double s, int label, bool* clamped = nullptr);
double similarity_margin(int label);

double cosine_similarity(const Vec& u, const Vec& v,
                         bool* zero_norm = nullptr);

double total_loss(double l1, double l2);

struct LossValues {
  double l1 = 0.0;
  double l2 = 0.0;
  double l_all = 0.0;
};

// ---- initialization ----

void init_dense(DenseLayer& layer, std::mt19937_64& rng);
void init_embedding(EmbeddingTable& table, std::mt19937_64& rng);

// ---- shared feature encoder (context, POS, word, lemma) ----

struct EncoderTrace {
  CandidateIndices idx;
  Vec ctx_in;  // concatenated context word embeddings
  Vec pos_in;
  Vec ctx_fv;  // post-tanh projections
  Vec pos_fv;
  Vec feat;    // [ctx_fv | pos_fv | word emb | lemma emb]
};

struct EventEncoder {
  FeatureConfig config;
  EmbeddingTable word_emb;
  EmbeddingTable pos_emb;
  EmbeddingTable lemma_emb;
  DenseLayer ctx_proj;
  DenseLayer pos_proj;

  EventEncoder() = default;
  EventEncoder(const FeatureConfig& cfg, int word_vocab, int pos_vocab,
               int lemma_vocab, int ctx_fv_dim, int pos_fv_dim);

  int feature_dim() const {
    return ctx_proj.out_dim() + pos_proj.out_dim() + config.word_dim +
           config.lemma_dim;
  }

  EncoderTrace forward(const CandidateIndices& idx) const;
  void backward(const EncoderTrace& trace, const Vec& dfeat);

  void init(std::mt19937_64& rng);
  void zero_grads();
  void collect_params(const std::string& prefix,
                      std::vector<ParamView>& out);
};

// ---- generic helpers ----

void zero_param_grads(const std::vector<ParamView>& params);

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  size_t checked = 0;
  size_t skipped_clamped = 0;
};

struct LossEval {
  double loss = 0.0;
  bool clamped = false;  // any clamp fired during this evaluation
};

// Central finite differences against the analytic gradients currently in
// the params' grad buffers. Elements whose perturbed evaluations hit a
// clamp boundary are excluded from the max.
GradCheckResult gradient_check(const std::vector<ParamView>& params,
                               const std::function<LossEval()>& loss_fn,
                               double step = 1e-5);

void check_finite(const std::vector<ParamView>& params);

}  // namespace evcoref
