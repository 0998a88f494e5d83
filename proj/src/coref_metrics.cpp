#include "evcoref/coref_metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace evcoref {

namespace {

// mention id -> index of its cluster
std::unordered_map<std::string, int> cluster_index(const ChainSet& cs) {
  std::unordered_map<std::string, int> idx;
  for (size_t c = 0; c < cs.clusters.size(); ++c)
    for (const auto& m : cs.clusters[c]) idx[m] = static_cast<int>(c);
  return idx;
}

// MUC partition count p(S): predicted clusters intersecting S, plus each
// mention of S absent from the response counted as its own part.
MetricAccum muc_directional(const ChainSet& key, const ChainSet& response) {
  auto resp_idx = cluster_index(response);
  MetricAccum acc;
  for (const auto& s : key.clusters) {
    std::unordered_set<int> parts;
    int twinless = 0;
    for (const auto& m : s) {
      auto it = resp_idx.find(m);
      if (it == resp_idx.end())
        ++twinless;
      else
        parts.insert(it->second);
    }
    acc.recall_num +=
        static_cast<double>(s.size()) -
        static_cast<double>(parts.size() + twinless);
    acc.recall_den += static_cast<double>(s.size()) - 1.0;
  }
  return acc;
}

double b_cubed_sum(const ChainSet& own, const ChainSet& other) {
  auto other_idx = cluster_index(other);
  double total = 0.0;
  for (const auto& c : own.clusters) {
    // overlap of this cluster with each cluster of the other side
    std::unordered_map<int, int> overlap;
    for (const auto& m : c) {
      auto it = other_idx.find(m);
      if (it != other_idx.end()) ++overlap[it->second];
    }
    for (const auto& m : c) {
      auto it = other_idx.find(m);
      if (it != other_idx.end())
        total += static_cast<double>(overlap[it->second]) /
                 static_cast<double>(c.size());
    }
  }
  return total;
}

size_t mention_count(const ChainSet& cs) {
  size_t n = 0;
  for (const auto& c : cs.clusters) n += c.size();
  return n;
}

double phi4(const std::vector<std::string>& a,
            const std::vector<std::string>& b) {
  std::unordered_set<std::string> sa(a.begin(), a.end());
  int inter = 0;
  for (const auto& m : b)
    if (sa.count(m)) ++inter;
  return 2.0 * inter / static_cast<double>(a.size() + b.size());
}

}  // namespace

MetricResult finalize(const MetricAccum& a) {
  MetricResult r;
  r.recall = a.recall_den == 0.0 ? 0.0 : a.recall_num / a.recall_den;
  r.precision =
      a.precision_den == 0.0 ? 0.0 : a.precision_num / a.precision_den;
  double sum = r.recall + r.precision;
  r.f1 = sum == 0.0 ? 0.0 : 2.0 * r.recall * r.precision / sum;
  return r;
}

MetricAccum muc_accum(const ChainSet& gold, const ChainSet& pred) {
  MetricAccum acc = muc_directional(gold, pred);
  MetricAccum prec = muc_directional(pred, gold);
  acc.precision_num = prec.recall_num;
  acc.precision_den = prec.recall_den;
  return acc;
}

MetricAccum b_cubed_accum(const ChainSet& gold, const ChainSet& pred) {
  MetricAccum acc;
  acc.recall_num = b_cubed_sum(gold, pred);
  acc.recall_den = static_cast<double>(mention_count(gold));
  acc.precision_num = b_cubed_sum(pred, gold);
  acc.precision_den = static_cast<double>(mention_count(pred));
  return acc;
}

MetricAccum ceaf_e_accum(const ChainSet& gold, const ChainSet& pred) {
  std::vector<std::vector<double>> weight(gold.clusters.size());
  for (size_t i = 0; i < gold.clusters.size(); ++i) {
    weight[i].resize(pred.clusters.size());
    for (size_t j = 0; j < pred.clusters.size(); ++j)
      weight[i][j] = phi4(gold.clusters[i], pred.clusters[j]);
  }
  double phi = max_weight_matching(weight);
  MetricAccum acc;
  acc.recall_num = phi;
  acc.recall_den = static_cast<double>(gold.clusters.size());
  acc.precision_num = phi;
  acc.precision_den = static_cast<double>(pred.clusters.size());
  return acc;
}

MetricResult muc(const ChainSet& gold, const ChainSet& pred) {
  return finalize(muc_accum(gold, pred));
}

MetricResult b_cubed(const ChainSet& gold, const ChainSet& pred) {
  return finalize(b_cubed_accum(gold, pred));
}

MetricResult ceaf_e(const ChainSet& gold, const ChainSet& pred) {
  return finalize(ceaf_e_accum(gold, pred));
}

double conll_f1(double muc_f1, double b3_f1, double ceafe_f1) {
  return (muc_f1 + b3_f1 + ceafe_f1) / 3.0;
}

CorpusScores score_corpus(const std::vector<ChainSet>& gold,
                          const std::vector<ChainSet>& pred) {
  std::unordered_map<std::string, const ChainSet*> pred_by_id;
  for (const auto& cs : pred)
    if (!pred_by_id.emplace(cs.doc_id, &cs).second)
      throw std::invalid_argument("duplicate predicted doc_id " + cs.doc_id);
  if (gold.size() != pred.size())
    throw std::invalid_argument("gold/pred document count mismatch");

  MetricAccum muc_a, b3_a, ceafe_a;
  for (const auto& g : gold) {
    auto it = pred_by_id.find(g.doc_id);
    if (it == pred_by_id.end())
      throw std::invalid_argument("no prediction for doc_id " + g.doc_id);
    muc_a += muc_accum(g, *it->second);
    b3_a += b_cubed_accum(g, *it->second);
    ceafe_a += ceaf_e_accum(g, *it->second);
  }
  CorpusScores s;
  s.muc = finalize(muc_a);
  s.b3 = finalize(b3_a);
  s.ceafe = finalize(ceafe_a);
  s.conll = conll_f1(s.muc.f1, s.b3.f1, s.ceafe.f1);
  return s;
}

// Kuhn-Munkres with potentials on the padded square cost matrix.
double max_weight_matching(const std::vector<std::vector<double>>& weight) {
  int n = static_cast<int>(weight.size());
  if (n == 0) return 0.0;
  int m = static_cast<int>(weight[0].size());
  if (m == 0) return 0.0;
  int dim = std::max(n, m);
  std::vector<std::vector<double>> cost(dim + 1,
                                        std::vector<double>(dim + 1, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) cost[i + 1][j + 1] = -weight[i][j];

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0);
  std::vector<int> match(dim + 1, 0), way(dim + 1, 0);
  for (int i = 1; i <= dim; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(dim + 1, inf);
    std::vector<char> used(dim + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= dim; ++j) {
        if (used[j]) continue;
        double cur = cost[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= dim; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= dim; ++j)
    if (match[j] != 0) total += cost[match[j]][j];
  return -total;
}

}  // namespace evcoref
