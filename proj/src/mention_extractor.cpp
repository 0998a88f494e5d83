#include "evcoref/mention_extractor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace evcoref {

std::vector<ParamView> MentionExtractorModel::params() {
  std::vector<ParamView> out;
  encoder.collect_params("encoder.", out);
  out.push_back({"hidden1.w", &hidden1.w.a, &hidden1.gw.a, 0});
  out.push_back({"hidden1.b", &hidden1.b, &hidden1.gb, 0});
  out.push_back({"hidden2.w", &hidden2.w.a, &hidden2.gw.a, 0});
  out.push_back({"hidden2.b", &hidden2.b, &hidden2.gb, 0});
  out.push_back({"output.w", &output.w.a, &output.gw.a, 0});
  out.push_back({"output.b", &output.b, &output.gb, 0});
  return out;
}

void MentionExtractorModel::zero_grads() { zero_param_grads(params()); }

MentionExtractorModel make_extractor_model(const ExtractorConfig& config,
                                           const Vocab& vocab) {
  MentionExtractorModel m;
  m.config = config;
  m.vocab = vocab;
  m.encoder = EventEncoder(config.features, vocab.word_size(),
                           vocab.pos_size(), vocab.lemma_size(),
                           config.ctx_fv_dim, config.pos_fv_dim);
  m.hidden1 = DenseLayer(m.encoder.feature_dim(), config.hidden1,
                         Activation::Tanh);
  m.hidden2 = DenseLayer(config.hidden1, config.hidden2, Activation::Tanh);
  m.output = DenseLayer(config.hidden2, 2, Activation::Identity);
  return m;
}

namespace {

struct ExtractorTrace {
  EncoderTrace enc;
  Vec h1, h2, logits, probs;
};

ExtractorTrace forward_trace(const MentionExtractorModel& m,
                             const CandidateIndices& idx) {
  ExtractorTrace t;
  t.enc = m.encoder.forward(idx);
  t.h1 = m.hidden1.forward(t.enc.feat);
  t.h2 = m.hidden2.forward(t.h1);
  t.logits = m.output.forward(t.h2);
  t.probs = softmax(t.logits);
  return t;
}

struct Candidate {
  int doc = 0;
  int sent = 0;
  int token = 0;
  int label = 0;  // 1 = event mention
};

bool candidate_pos_ok(const ExtractorConfig& cfg, const Token& tok) {
  if (!cfg.restrict_candidates) return true;
  return !tok.pos.empty() && (tok.pos[0] == 'V' || tok.pos[0] == 'N');
}

std::vector<Candidate> collect_candidates(const Corpus& corpus,
                                          const ExtractorConfig& cfg) {
  std::vector<Candidate> out;
  for (size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    std::set<std::pair<int, int>> heads;
    for (const auto& m : doc.gold_mentions)
      heads.insert({m.sentence_index, m.head_index});
    for (size_t s = 0; s < doc.sentences.size(); ++s)
      for (size_t t = 0; t < doc.sentences[s].size(); ++t) {
        if (!candidate_pos_ok(cfg, doc.sentences[s][t])) continue;
        Candidate c;
        c.doc = static_cast<int>(d);
        c.sent = static_cast<int>(s);
        c.token = static_cast<int>(t);
        c.label = heads.count({c.sent, c.token}) ? 1 : 0;
        out.push_back(c);
      }
  }
  return out;
}

}  // namespace

Vec extractor_forward(const MentionExtractorModel& model,
                      const CandidateIndices& indices) {
  return forward_trace(model, indices).probs;
}

double accumulate_extractor_gradients(
    MentionExtractorModel& model,
    const std::vector<std::pair<CandidateIndices, int>>& batch) {
  if (batch.empty())
    throw std::invalid_argument("accumulate_extractor_gradients: empty batch");
  double inv_n = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& [idx, label] : batch) {
    ExtractorTrace t = forward_trace(model, idx);
    // probs[0] = P(mention); class index 0 when label == 1
    int cls = label == 1 ? 0 : 1;
    loss += cross_entropy(t.probs[0], label) * inv_n;
    Vec dlogits = t.probs;
    dlogits[cls] -= 1.0;
    for (double& v : dlogits) v *= inv_n;
    Vec dh2 = model.output.backward(t.h2, t.logits, dlogits);
    Vec dh1 = model.hidden2.backward(t.h1, t.h2, dh2);
    Vec dfeat = model.hidden1.backward(t.enc.feat, t.h1, dh1);
    model.encoder.backward(t.enc, dfeat);
  }
  return loss;
}

MentionExtractorModel train_extractor(const Corpus& train, const Corpus& dev,
                                      const ExtractorConfig& config,
                                      std::vector<ExtractorEpochLog>* log,
                                      std::ostream* progress) {
  if (train.documents.empty())
    throw std::invalid_argument("train_extractor: empty training set");

  Vocab vocab = build_vocab(train, config.min_count);
  MentionExtractorModel model = make_extractor_model(config, vocab);
  std::mt19937_64 rng(config.seed);
  model.encoder.init(rng);
  init_dense(model.hidden1, rng);
  init_dense(model.hidden2, rng);
  init_dense(model.output, rng);

  std::vector<Candidate> all = collect_candidates(train, config);
  if (all.empty())
    throw std::invalid_argument("train_extractor: no candidates in corpus");

  AdadeltaState opt;
  auto params = model.params();
  MentionExtractorModel best = model;
  double best_recall = -1.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<Candidate> epoch_set;
    if (config.negative_keep < 1.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (const auto& c : all)
        if (c.label == 1 || u(rng) < config.negative_keep)
          epoch_set.push_back(c);
    } else {
      epoch_set = all;
    }
    std::shuffle(epoch_set.begin(), epoch_set.end(), rng);

    double epoch_loss = 0.0;
    size_t n_batches = 0;
    for (size_t start = 0; start < epoch_set.size();
         start += config.batch_size) {
      size_t end = std::min(epoch_set.size(),
                            start + static_cast<size_t>(config.batch_size));
      std::vector<std::pair<CandidateIndices, int>> batch;
      batch.reserve(end - start);
      for (size_t k = start; k < end; ++k) {
        const auto& c = epoch_set[k];
        const auto& doc = train.documents[c.doc];
        batch.emplace_back(
            encode_candidate(doc, c.sent, c.token, vocab, config.features),
            c.label);
      }
      model.zero_grads();
      epoch_loss += accumulate_extractor_gradients(model, batch);
      check_finite(params);
      adadelta_step(params, opt);
      ++n_batches;
    }
    epoch_loss /= static_cast<double>(std::max<size_t>(n_batches, 1));

    ExtractionScores dev_scores = evaluate_on_corpus(model, dev);
    if (log) log->push_back({epoch, epoch_loss, dev_scores});
    if (progress)
      *progress << "epoch " << epoch << " loss " << epoch_loss << " dev P "
                << dev_scores.precision << " R " << dev_scores.recall << " F1 "
                << dev_scores.f1 << "\n";
    if (dev_scores.recall > best_recall) {
      best_recall = dev_scores.recall;
      best = model;
    }
  }
  return best;
}

std::vector<Mention> predict_mentions(const MentionExtractorModel& model,
                                      const Document& doc) {
  std::vector<Mention> out;
  int counter = 0;
  for (size_t s = 0; s < doc.sentences.size(); ++s)
    for (size_t t = 0; t < doc.sentences[s].size(); ++t) {
      if (!candidate_pos_ok(model.config, doc.sentences[s][t])) continue;
      auto idx = encode_candidate(doc, static_cast<int>(s),
                                  static_cast<int>(t), model.vocab,
                                  model.config.features);
      Vec probs = extractor_forward(model, idx);
      if (probs[0] > 0.5) {
        Mention m;
        m.mention_id = "p" + std::to_string(counter++);
        m.sentence_index = static_cast<int>(s);
        m.start = m.end = m.head_index = static_cast<int>(t);
        out.push_back(m);
      }
    }
  return out;
}

std::vector<Mention> align_mentions_to_gold(const Document& doc,
                                            std::vector<Mention> mentions) {
  std::map<std::pair<int, int>, const Mention*> by_pos;
  for (const auto& g : doc.gold_mentions)
    by_pos[{g.sentence_index, g.head_index}] = &g;
  for (auto& m : mentions) {
    auto it = by_pos.find({m.sentence_index, m.head_index});
    if (it != by_pos.end()) m.mention_id = it->second->mention_id;
  }
  return mentions;
}

ExtractionScores evaluate_extraction(const std::vector<MentionKey>& pred,
                                     const std::vector<MentionKey>& gold) {
  std::set<MentionKey> gold_set(gold.begin(), gold.end());
  std::set<MentionKey> pred_set(pred.begin(), pred.end());
  size_t hits = 0;
  for (const auto& k : pred_set)
    if (gold_set.count(k)) ++hits;
  ExtractionScores s;
  s.precision = pred_set.empty()
                    ? 0.0
                    : static_cast<double>(hits) / pred_set.size();
  s.recall =
      gold_set.empty() ? 0.0 : static_cast<double>(hits) / gold_set.size();
  double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

std::vector<MentionKey> gold_mention_keys(const Corpus& corpus) {
  std::vector<MentionKey> keys;
  for (const auto& doc : corpus.documents)
    for (const auto& m : doc.gold_mentions)
      keys.push_back({doc.doc_id, m.sentence_index, m.head_index});
  return keys;
}

ExtractionScores evaluate_on_corpus(const MentionExtractorModel& model,
                                    const Corpus& corpus) {
  std::vector<MentionKey> pred;
  for (const auto& doc : corpus.documents)
    for (const auto& m : predict_mentions(model, doc))
      pred.push_back({doc.doc_id, m.sentence_index, m.head_index});
  return evaluate_extraction(pred, gold_mention_keys(corpus));
}

}  // namespace evcoref
