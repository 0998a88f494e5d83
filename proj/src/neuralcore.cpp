#include "evcoref/neuralcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evcoref {

Vec DenseLayer::forward(const Vec& x) const {
  if (static_cast<int>(x.size()) != in_dim())
    throw std::invalid_argument("dense_forward: input length " +
                                std::to_string(x.size()) + " != in_dim " +
                                std::to_string(in_dim()));
  Vec y(b);
  for (int i = 0; i < w.rows; ++i) {
    double xi = x[i];
    if (xi == 0.0) continue;
    const double* wr = w.row(i);
    for (int j = 0; j < w.cols; ++j) y[j] += xi * wr[j];
  }
  if (act == Activation::Tanh)
    for (double& v : y) v = std::tanh(v);
  return y;
}

Vec DenseLayer::backward(const Vec& x, const Vec& y, const Vec& dy) {
  Vec dz(dy);
  if (act == Activation::Tanh)
    for (int j = 0; j < w.cols; ++j) dz[j] *= 1.0 - y[j] * y[j];
  for (int j = 0; j < w.cols; ++j) gb[j] += dz[j];
  Vec dx(w.rows, 0.0);
  for (int i = 0; i < w.rows; ++i) {
    double xi = x[i];
    const double* wr = w.row(i);
    double* gr = gw.row(i);
    double acc = 0.0;
    for (int j = 0; j < w.cols; ++j) {
      gr[j] += xi * dz[j];
      acc += wr[j] * dz[j];
    }
    dx[i] = acc;
  }
  return dx;
}

void EmbeddingTable::accumulate(int id, const double* d) {
  if (id == kPadId) return;  // PAD row frozen
  double* g = grad.row(id);
  for (int j = 0; j < grad.cols; ++j) g[j] += d[j];
}

void adadelta_step(const std::vector<ParamView>& params, AdadeltaState& state) {
  if (state.acc_grad.empty()) {
    for (const auto& p : params) {
      state.acc_grad.emplace_back(p.value->size(), 0.0);
      state.acc_update.emplace_back(p.value->size(), 0.0);
    }
  }
  const double rho = state.rho, eps = state.eps;
  for (size_t k = 0; k < params.size(); ++k) {
    const auto& p = params[k];
    Vec& eg2 = state.acc_grad[k];
    Vec& edx2 = state.acc_update[k];
    for (size_t i = p.frozen_prefix; i < p.value->size(); ++i) {
      double g = (*p.grad)[i];
      eg2[i] = rho * eg2[i] + (1.0 - rho) * g * g;
      double dx = -std::sqrt(edx2[i] + eps) / std::sqrt(eg2[i] + eps) * g;
      edx2[i] = rho * edx2[i] + (1.0 - rho) * dx * dx;
      (*p.value)[i] += dx;
    }
  }
}

Vec softmax(const Vec& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  Vec p(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double cross_entropy(double y_hat, int label, bool* clamped) {
  double p = std::clamp(y_hat, kProbClamp, 1.0 - kProbClamp);
  if (clamped) *clamped = (p != y_hat);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

double similarity_margin(int label) { return label == 0 ? 1.0 : -1.0; }

double similarity_loss(double s, int label, bool* clamped) {
  double gap = std::fabs(similarity_margin(label) - s);
  if (clamped) *clamped = (gap < kSimClampEps);
  return std::log(std::max(gap, kSimClampEps));
}

double cosine_similarity(const Vec& u, const Vec& v, bool* zero_norm) {
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    if (zero_norm) *zero_norm = true;
    return 0.0;
  }
  if (zero_norm) *zero_norm = false;
  return std::clamp(uv / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

double total_loss(double l1, double l2) { return l1 + l2; }

void init_dense(DenseLayer& layer, std::mt19937_64& rng) {
  double bound = std::sqrt(6.0 / (layer.in_dim() + layer.out_dim()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : layer.w.a) v = dist(rng);
  std::fill(layer.b.begin(), layer.b.end(), 0.0);
}

void init_embedding(EmbeddingTable& table, std::mt19937_64& rng) {
  double bound = 0.5 / table.dim();
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : table.m.a) v = dist(rng);
  for (int j = 0; j < table.m.cols; ++j) table.m.at(kPadId, j) = 0.0;
}

EventEncoder::EventEncoder(const FeatureConfig& cfg, int word_vocab,
                           int pos_vocab, int lemma_vocab, int ctx_fv_dim,
                           int pos_fv_dim)
    : config(cfg),
      word_emb(word_vocab, cfg.word_dim),
      pos_emb(pos_vocab, cfg.pos_dim),
      lemma_emb(lemma_vocab, cfg.lemma_dim),
      ctx_proj(cfg.context_window * cfg.word_dim, ctx_fv_dim,
               Activation::Tanh),
      pos_proj(cfg.pos_window * cfg.pos_dim, pos_fv_dim, Activation::Tanh) {}

EncoderTrace EventEncoder::forward(const CandidateIndices& idx) const {
  EncoderTrace t;
  t.idx = idx;
  t.ctx_in.reserve(idx.context_ids.size() * config.word_dim);
  for (int id : idx.context_ids) {
    const double* r = word_emb.m.row(id);
    t.ctx_in.insert(t.ctx_in.end(), r, r + config.word_dim);
  }
  t.pos_in.reserve(idx.pos_ids.size() * config.pos_dim);
  for (int id : idx.pos_ids) {
    const double* r = pos_emb.m.row(id);
    t.pos_in.insert(t.pos_in.end(), r, r + config.pos_dim);
  }
  t.ctx_fv = ctx_proj.forward(t.ctx_in);
  t.pos_fv = pos_proj.forward(t.pos_in);
  t.feat = t.ctx_fv;
  t.feat.insert(t.feat.end(), t.pos_fv.begin(), t.pos_fv.end());
  const double* wr = word_emb.m.row(idx.word_id);
  t.feat.insert(t.feat.end(), wr, wr + config.word_dim);
  const double* lr = lemma_emb.m.row(idx.lemma_id);
  t.feat.insert(t.feat.end(), lr, lr + config.lemma_dim);
  return t;
}

void EventEncoder::backward(const EncoderTrace& t, const Vec& dfeat) {
  int cdim = ctx_proj.out_dim();
  int pdim = pos_proj.out_dim();
  Vec d_ctx_fv(dfeat.begin(), dfeat.begin() + cdim);
  Vec d_pos_fv(dfeat.begin() + cdim, dfeat.begin() + cdim + pdim);
  const double* d_word = dfeat.data() + cdim + pdim;
  const double* d_lemma = d_word + config.word_dim;

  Vec d_ctx_in = ctx_proj.backward(t.ctx_in, t.ctx_fv, d_ctx_fv);
  Vec d_pos_in = pos_proj.backward(t.pos_in, t.pos_fv, d_pos_fv);
  for (size_t k = 0; k < t.idx.context_ids.size(); ++k)
    word_emb.accumulate(t.idx.context_ids[k],
                        d_ctx_in.data() + k * config.word_dim);
  for (size_t k = 0; k < t.idx.pos_ids.size(); ++k)
    pos_emb.accumulate(t.idx.pos_ids[k], d_pos_in.data() + k * config.pos_dim);
  word_emb.accumulate(t.idx.word_id, d_word);
  lemma_emb.accumulate(t.idx.lemma_id, d_lemma);
}

void EventEncoder::init(std::mt19937_64& rng) {
  init_embedding(word_emb, rng);
  init_embedding(pos_emb, rng);
  init_embedding(lemma_emb, rng);
  init_dense(ctx_proj, rng);
  init_dense(pos_proj, rng);
}

void EventEncoder::zero_grads() {
  std::fill(word_emb.grad.a.begin(), word_emb.grad.a.end(), 0.0);
  std::fill(pos_emb.grad.a.begin(), pos_emb.grad.a.end(), 0.0);
  std::fill(lemma_emb.grad.a.begin(), lemma_emb.grad.a.end(), 0.0);
  std::fill(ctx_proj.gw.a.begin(), ctx_proj.gw.a.end(), 0.0);
  std::fill(ctx_proj.gb.begin(), ctx_proj.gb.end(), 0.0);
  std::fill(pos_proj.gw.a.begin(), pos_proj.gw.a.end(), 0.0);
  std::fill(pos_proj.gb.begin(), pos_proj.gb.end(), 0.0);
}

void EventEncoder::collect_params(const std::string& prefix,
                                  std::vector<ParamView>& out) {
  out.push_back({prefix + "word_emb", &word_emb.m.a, &word_emb.grad.a,
                 static_cast<size_t>(word_emb.dim())});
  out.push_back({prefix + "pos_emb", &pos_emb.m.a, &pos_emb.grad.a,
                 static_cast<size_t>(pos_emb.dim())});
  out.push_back({prefix + "lemma_emb", &lemma_emb.m.a, &lemma_emb.grad.a,
                 static_cast<size_t>(lemma_emb.dim())});
  out.push_back({prefix + "ctx_proj.w", &ctx_proj.w.a, &ctx_proj.gw.a, 0});
  out.push_back({prefix + "ctx_proj.b", &ctx_proj.b, &ctx_proj.gb, 0});
  out.push_back({prefix + "pos_proj.w", &pos_proj.w.a, &pos_proj.gw.a, 0});
  out.push_back({prefix + "pos_proj.b", &pos_proj.b, &pos_proj.gb, 0});
}

void zero_param_grads(const std::vector<ParamView>& params) {
  for (const auto& p : params) std::fill(p.grad->begin(), p.grad->end(), 0.0);
}

GradCheckResult gradient_check(const std::vector<ParamView>& params,
                               const std::function<LossEval()>& loss_fn,
                               double step) {
  GradCheckResult result;
  for (const auto& p : params) {
    for (size_t i = p.frozen_prefix; i < p.value->size(); ++i) {
      double saved = (*p.value)[i];
      (*p.value)[i] = saved + step;
      LossEval up = loss_fn();
      (*p.value)[i] = saved - step;
      LossEval down = loss_fn();
      (*p.value)[i] = saved;
      if (up.clamped || down.clamped) {
        ++result.skipped_clamped;
        continue;
      }
      double numeric = (up.loss - down.loss) / (2.0 * step);
      double analytic = (*p.grad)[i];
      double denom =
          std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      double rel = std::fabs(analytic - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

void check_finite(const std::vector<ParamView>& params) {
  for (const auto& p : params) {
    for (double g : *p.grad)
      if (!std::isfinite(g))
        throw NumericError("non-finite gradient in parameter " + p.name);
    for (double v : *p.value)
      if (!std::isfinite(v))
        throw NumericError("non-finite value in parameter " + p.name);
  }
}

}  // namespace evcoref
