#include "evcoref/coref_mlnn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "evcoref/coref_metrics.hpp"

namespace evcoref {

AblationMode parse_mode(const std::string& name) {
  if (name == "C-NN") return AblationMode::CNN;
  if (name == "C-MLNN") return AblationMode::CMLNN;
  if (name == "MLNN") return AblationMode::MLNN;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected C-NN, C-MLNN or MLNN)");
}

std::string mode_name(AblationMode mode) {
  switch (mode) {
    case AblationMode::CNN: return "C-NN";
    case AblationMode::CMLNN: return "C-MLNN";
    case AblationMode::MLNN: return "MLNN";
  }
  return "?";
}

bool mode_trains_jointly(AblationMode mode) {
  return mode != AblationMode::CNN;
}

bool mode_uses_threshold_rule(AblationMode mode) {
  return mode == AblationMode::MLNN;
}

std::vector<ParamView> MLNNModel::params() {
  std::vector<ParamView> out;
  encoder.collect_params("encoder.", out);
  out.push_back({"cn_hidden1.w", &cn_hidden1.w.a, &cn_hidden1.gw.a, 0});
  out.push_back({"cn_hidden1.b", &cn_hidden1.b, &cn_hidden1.gb, 0});
  out.push_back({"cn_hidden2.w", &cn_hidden2.w.a, &cn_hidden2.gw.a, 0});
  out.push_back({"cn_hidden2.b", &cn_hidden2.b, &cn_hidden2.gb, 0});
  out.push_back({"cn_output.w", &cn_output.w.a, &cn_output.gw.a, 0});
  out.push_back({"cn_output.b", &cn_output.b, &cn_output.gb, 0});
  out.push_back({"sn_hidden1.w", &sn_hidden1.w.a, &sn_hidden1.gw.a, 0});
  out.push_back({"sn_hidden1.b", &sn_hidden1.b, &sn_hidden1.gb, 0});
  out.push_back({"sn_hidden2.w", &sn_hidden2.w.a, &sn_hidden2.gw.a, 0});
  out.push_back({"sn_hidden2.b", &sn_hidden2.b, &sn_hidden2.gb, 0});
  return out;
}

std::vector<ParamView> MLNNModel::sn_params() {
  std::vector<ParamView> out;
  out.push_back({"sn_hidden1.w", &sn_hidden1.w.a, &sn_hidden1.gw.a, 0});
  out.push_back({"sn_hidden1.b", &sn_hidden1.b, &sn_hidden1.gb, 0});
  out.push_back({"sn_hidden2.w", &sn_hidden2.w.a, &sn_hidden2.gw.a, 0});
  out.push_back({"sn_hidden2.b", &sn_hidden2.b, &sn_hidden2.gb, 0});
  return out;
}

void MLNNModel::zero_grads() { zero_param_grads(params()); }

MLNNModel make_mlnn_model(const MLNNConfig& config, const Vocab& vocab) {
  MLNNModel m;
  m.config = config;
  m.vocab = vocab;
  m.encoder = EventEncoder(config.features, vocab.word_size(),
                           vocab.pos_size(), vocab.lemma_size(),
                           config.ctx_fv_dim, config.pos_fv_dim);
  int fdim = m.encoder.feature_dim();
  m.cn_hidden1 = DenseLayer(2 * fdim, config.cn_hidden1, Activation::Tanh);
  m.cn_hidden2 =
      DenseLayer(config.cn_hidden1, config.cn_hidden2, Activation::Tanh);
  m.cn_output = DenseLayer(config.cn_hidden2, 2, Activation::Identity);
  m.sn_hidden1 = DenseLayer(fdim, config.sn_hidden1, Activation::Tanh);
  m.sn_hidden2 =
      DenseLayer(config.sn_hidden1, config.sn_hidden2, Activation::Tanh);
  return m;
}

namespace {

bool mention_before(const Mention& a, const Mention& b) {
  if (a.sentence_index != b.sentence_index)
    return a.sentence_index < b.sentence_index;
  if (a.start != b.start) return a.start < b.start;
  return a.mention_id < b.mention_id;
}

}  // namespace

std::vector<PairExample> generate_pairs(const std::vector<Mention>& mentions,
                                        const std::vector<Chain>* gold_chains) {
  std::vector<Mention> sorted = mentions;
  std::sort(sorted.begin(), sorted.end(), mention_before);

  std::unordered_map<std::string, int> chain_of;
  if (gold_chains) {
    for (size_t c = 0; c < gold_chains->size(); ++c)
      for (const auto& id : (*gold_chains)[c].mention_ids)
        chain_of[id] = static_cast<int>(c);
  }

  std::vector<PairExample> pairs;
  for (size_t i = 0; i < sorted.size(); ++i)
    for (size_t j = i + 1; j < sorted.size(); ++j) {
      PairExample p;
      p.a = sorted[i];
      p.b = sorted[j];
      if (gold_chains) {
        auto ia = chain_of.find(p.a.mention_id);
        auto ib = chain_of.find(p.b.mention_id);
        p.label = (ia != chain_of.end() && ib != chain_of.end() &&
                   ia->second == ib->second)
                      ? 0
                      : 1;
      }
      pairs.push_back(std::move(p));
    }
  return pairs;
}

EncoderTrace encode_event(const MLNNModel& model, const Document& doc,
                          const Mention& mention) {
  auto idx = encode_candidate(doc, mention.sentence_index, mention.head_index,
                              model.vocab, model.config.features);
  return model.encoder.forward(idx);
}

namespace {

struct PairTrace {
  EncoderTrace ea, eb;
  Vec cn_x, c1, c2, logits, probs;
  Vec sa1, sa2, sb1, sb2;
  double similarity = 0.0;
  bool zero_norm = false;
};

PairTrace pair_forward(const MLNNModel& m, const EncoderTrace& ea,
                       const EncoderTrace& eb) {
  PairTrace t;
  t.ea = ea;
  t.eb = eb;
  t.cn_x = ea.feat;
  t.cn_x.insert(t.cn_x.end(), eb.feat.begin(), eb.feat.end());
  t.c1 = m.cn_hidden1.forward(t.cn_x);
  t.c2 = m.cn_hidden2.forward(t.c1);
  t.logits = m.cn_output.forward(t.c2);
  t.probs = softmax(t.logits);
  t.sa1 = m.sn_hidden1.forward(ea.feat);
  t.sa2 = m.sn_hidden2.forward(t.sa1);
  t.sb1 = m.sn_hidden1.forward(eb.feat);
  t.sb2 = m.sn_hidden2.forward(t.sb1);
  t.similarity = cosine_similarity(t.sa2, t.sb2, &t.zero_norm);
  return t;
}

PairOutput output_of(const PairTrace& t) {
  PairOutput out;
  out.coref = t.probs[0] > t.probs[1];  // tie resolves to non-coref
  out.confidence = std::max(t.probs[0], t.probs[1]);
  out.p_non_coref = t.probs[1];
  out.similarity = t.similarity;
  out.zero_norm = t.zero_norm;
  return out;
}

// d(cos)/du with s = cos(u, v)
void cosine_backward(const Vec& u, const Vec& v, double s, Vec& du, Vec& dv) {
  double nu = 0.0, nv = 0.0;
  for (double x : u) nu += x * x;
  for (double x : v) nv += x * x;
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);
  du.assign(u.size(), 0.0);
  dv.assign(v.size(), 0.0);
  if (nu == 0.0 || nv == 0.0) return;  // similarity defined as 0, flat
  for (size_t i = 0; i < u.size(); ++i) {
    du[i] = v[i] / (nu * nv) - s * u[i] / (nu * nu);
    dv[i] = u[i] / (nu * nv) - s * v[i] / (nv * nv);
  }
}

}  // namespace

PairOutput classify_and_score(const MLNNModel& model, const Document& doc,
                              const Mention& a, const Mention& b) {
  return output_of(
      pair_forward(model, encode_event(model, doc, a),
                   encode_event(model, doc, b)));
}

LossValues joint_loss(const std::vector<double>& p_non_coref,
                      const std::vector<double>& similarities,
                      const std::vector<int>& labels, bool jointly) {
  if (labels.empty())
    throw std::invalid_argument("joint_loss: empty batch");
  LossValues lv;
  for (size_t i = 0; i < labels.size(); ++i)
    lv.l1 += cross_entropy(p_non_coref[i], labels[i]);
  lv.l1 /= static_cast<double>(labels.size());
  if (jointly)
    for (size_t i = 0; i < labels.size(); ++i)
      lv.l2 += similarity_loss(similarities[i], labels[i]);
  lv.l_all = total_loss(lv.l1, lv.l2);
  return lv;
}

namespace {

struct TrainPair {
  int doc = 0;
  PairExample pair;
};

// Forward + backward for one pair; returns its loss contributions.
// inv_n scales the classification term (batch mean); the similarity term
// is summed as printed.
LossValues pair_backward(MLNNModel& m, const Document& doc,
                         const TrainPair& tp, double inv_n, bool jointly) {
  EncoderTrace ea = encode_event(m, doc, tp.pair.a);
  EncoderTrace eb = encode_event(m, doc, tp.pair.b);
  PairTrace t = pair_forward(m, ea, eb);
  int y = tp.pair.label;

  LossValues lv;
  lv.l1 = cross_entropy(t.probs[1], y) * inv_n;

  // classification branch
  Vec dlogits = t.probs;
  dlogits[y == 0 ? 0 : 1] -= 1.0;
  for (double& v : dlogits) v *= inv_n;
  Vec dc2 = m.cn_output.backward(t.c2, t.logits, dlogits);
  Vec dc1 = m.cn_hidden2.backward(t.c1, t.c2, dc2);
  Vec dcn_x = m.cn_hidden1.backward(t.cn_x, t.c1, dc1);
  int fdim = m.encoder.feature_dim();
  Vec dfa(dcn_x.begin(), dcn_x.begin() + fdim);
  Vec dfb(dcn_x.begin() + fdim, dcn_x.end());

  // scoring branch
  if (jointly) {
    bool clamped = false;
    lv.l2 = similarity_loss(t.similarity, y, &clamped);
    double gap = similarity_margin(y) - t.similarity;
    double dl_ds = clamped ? 0.0 : -1.0 / gap;
    if (dl_ds != 0.0 && !t.zero_norm) {
      Vec dua, dub;
      cosine_backward(t.sa2, t.sb2, t.similarity, dua, dub);
      for (double& v : dua) v *= dl_ds;
      for (double& v : dub) v *= dl_ds;
      Vec dsa1 = m.sn_hidden2.backward(t.sa1, t.sa2, dua);
      Vec dfa_sn = m.sn_hidden1.backward(ea.feat, t.sa1, dsa1);
      Vec dsb1 = m.sn_hidden2.backward(t.sb1, t.sb2, dub);
      Vec dfb_sn = m.sn_hidden1.backward(eb.feat, t.sb1, dsb1);
      for (int i = 0; i < fdim; ++i) {
        dfa[i] += dfa_sn[i];
        dfb[i] += dfb_sn[i];
      }
    }
  }

  m.encoder.backward(ea, dfa);
  m.encoder.backward(eb, dfb);
  lv.l_all = total_loss(lv.l1, lv.l2);
  return lv;
}

double dev_conll(const MLNNModel& model, const Corpus& dev,
                 AblationMode mode) {
  FilterThresholds t = model.config.thresholds;
  t.use_threshold_rule = mode_uses_threshold_rule(mode);
  std::vector<ChainSet> gold, pred;
  for (const auto& doc : dev.documents) {
    gold.push_back(gold_chain_set(doc));
    auto decisions = predict_pairs(model, doc, doc.gold_mentions);
    std::vector<std::string> ids;
    for (const auto& m : doc.gold_mentions) ids.push_back(m.mention_id);
    pred.push_back(build_chains(doc.doc_id, ids, decisions, t));
  }
  return score_corpus(gold, pred).conll;
}

}  // namespace

LossValues accumulate_pair_gradients(MLNNModel& model, const Document& doc,
                                     const std::vector<PairExample>& batch,
                                     bool jointly) {
  if (batch.empty())
    throw std::invalid_argument("accumulate_pair_gradients: empty batch");
  double inv_n = 1.0 / static_cast<double>(batch.size());
  LossValues total;
  for (const auto& p : batch) {
    TrainPair tp{0, p};
    LossValues lv = pair_backward(model, doc, tp, inv_n, jointly);
    total.l1 += lv.l1;
    total.l2 += lv.l2;
  }
  total.l_all = total_loss(total.l1, total.l2);
  return total;
}

MLNNModel train_joint(const Corpus& train, const Corpus& dev,
                      const MLNNConfig& config, AblationMode mode,
                      std::vector<JointEpochLog>* log,
                      std::ostream* progress) {
  std::vector<TrainPair> all;
  for (size_t d = 0; d < train.documents.size(); ++d) {
    const auto& doc = train.documents[d];
    for (auto& p : generate_pairs(doc.gold_mentions, &doc.gold_chains))
      all.push_back({static_cast<int>(d), std::move(p)});
  }
  if (all.empty())
    throw std::invalid_argument("train_joint: no training pairs");

  Vocab vocab = build_vocab(train, config.min_count);
  MLNNModel model = make_mlnn_model(config, vocab);
  std::mt19937_64 rng(config.seed);
  model.encoder.init(rng);
  init_dense(model.cn_hidden1, rng);
  init_dense(model.cn_hidden2, rng);
  init_dense(model.cn_output, rng);
  init_dense(model.sn_hidden1, rng);
  init_dense(model.sn_hidden2, rng);

  bool jointly = mode_trains_jointly(mode);
  AdadeltaState opt;
  // In C-NN mode the SN layers are left out of the optimizer entirely, so
  // they stay bitwise at initialization.
  std::vector<ParamView> trainable;
  for (auto& p : model.params()) {
    if (!jointly && p.name.rfind("sn_", 0) == 0) continue;
    trainable.push_back(p);
  }

  MLNNModel best = model;
  double best_conll = -1.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<TrainPair> epoch_set;
    if (config.negative_keep < 1.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (const auto& tp : all)
        if (tp.pair.label == 0 || u(rng) < config.negative_keep)
          epoch_set.push_back(tp);
    } else {
      epoch_set = all;
    }
    std::shuffle(epoch_set.begin(), epoch_set.end(), rng);

    LossValues epoch_lv;
    size_t n_batches = 0;
    for (size_t start = 0; start < epoch_set.size();
         start += config.batch_size) {
      size_t end = std::min(epoch_set.size(),
                            start + static_cast<size_t>(config.batch_size));
      double inv_n = 1.0 / static_cast<double>(end - start);
      model.zero_grads();
      LossValues batch_lv;
      for (size_t k = start; k < end; ++k) {
        const auto& tp = epoch_set[k];
        LossValues lv = pair_backward(model, train.documents[tp.doc], tp,
                                      inv_n, jointly);
        batch_lv.l1 += lv.l1;
        batch_lv.l2 += lv.l2;
      }
      batch_lv.l_all = total_loss(batch_lv.l1, batch_lv.l2);
      check_finite(trainable);
      adadelta_step(trainable, opt);
      epoch_lv.l1 += batch_lv.l1;
      epoch_lv.l2 += batch_lv.l2;
      epoch_lv.l_all += batch_lv.l_all;
      ++n_batches;
    }
    double scale = 1.0 / static_cast<double>(std::max<size_t>(n_batches, 1));
    epoch_lv.l1 *= scale;
    epoch_lv.l2 *= scale;
    epoch_lv.l_all *= scale;

    double conll = dev_conll(model, dev, mode);
    if (log) log->push_back({epoch, epoch_lv.l1, epoch_lv.l2, epoch_lv.l_all,
                             conll});
    if (progress)
      *progress << "epoch " << epoch << " l1 " << epoch_lv.l1 << " l2 "
                << epoch_lv.l2 << " dev CoNLL " << conll << "\n";
    if (conll > best_conll) {
      best_conll = conll;
      best = model;
    }
  }
  return best;
}

std::vector<PairDecision> predict_pairs(const MLNNModel& model,
                                        const Document& doc,
                                        const std::vector<Mention>& mentions) {
  std::vector<PairDecision> out;
  std::unordered_map<std::string, EncoderTrace> cache;
  for (const auto& p : generate_pairs(mentions, nullptr)) {
    for (const Mention* m : {&p.a, &p.b})
      if (!cache.count(m->mention_id))
        cache.emplace(m->mention_id, encode_event(model, doc, *m));
    PairOutput po = output_of(pair_forward(model, cache.at(p.a.mention_id),
                                           cache.at(p.b.mention_id)));
    PairDecision d;
    d.doc_id = doc.doc_id;
    d.a_id = p.a.mention_id;
    d.b_id = p.b.mention_id;
    d.coref = po.coref;
    d.confidence = po.confidence;
    d.similarity = po.similarity;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace evcoref
