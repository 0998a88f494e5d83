#pragma once

#include <vector>

#include "evcoref/chain_builder.hpp"

namespace evcoref {

struct MetricResult {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Numerator/denominator sums, so documents aggregate by micro-averaging
// exactly as the reference scorer does.
struct MetricAccum {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  MetricAccum& operator+=(const MetricAccum& o) {
    recall_num += o.recall_num;
    recall_den += o.recall_den;
    precision_num += o.precision_num;
    precision_den += o.precision_den;
    return *this;
  }
};

MetricResult finalize(const MetricAccum& a);

MetricAccum muc_accum(const ChainSet& gold, const ChainSet& pred);
MetricAccum b_cubed_accum(const ChainSet& gold, const ChainSet& pred);
MetricAccum ceaf_e_accum(const ChainSet& gold, const ChainSet& pred);

MetricResult muc(const ChainSet& gold, const ChainSet& pred);
MetricResult b_cubed(const ChainSet& gold, const ChainSet& pred);
MetricResult ceaf_e(const ChainSet& gold, const ChainSet& pred);

double conll_f1(double muc_f1, double b3_f1, double ceafe_f1);

struct CorpusScores {
  MetricResult muc;
  MetricResult b3;
  MetricResult ceafe;
  double conll = 0.0;
};

// Documents are matched by doc_id; throws std::invalid_argument on a
// mismatch between the two sets.
CorpusScores score_corpus(const std::vector<ChainSet>& gold,
                          const std::vector<ChainSet>& pred);

// Maximum-weight one-to-one assignment over a rows x cols weight matrix
// (weights >= 0). Returns the total matched weight. Exposed for the metric
// oracle tests.
double max_weight_matching(const std::vector<std::vector<double>>& weight);

}  // namespace evcoref
