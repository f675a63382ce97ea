#pragma once

#include "streammvc/partition.hpp"

namespace smvc {

struct MetricReport {
  double acc = 0.0;
  double nmi = 0.0;
  double purity = 0.0;
  double fscore = 0.0;
};

/// Clustering accuracy under the best one-to-one label matching (Hungarian
/// assignment on the contingency table).
double acc(const Partition& truth, const Partition& pred);

/// Mutual information normalized by the geometric mean of the two entropies.
double nmi(const Partition& truth, const Partition& pred);

double purity(const Partition& truth, const Partition& pred);

/// Pairwise F1 over same-cluster sample pairs; 0 when either side has no such pair.
double fscore(const Partition& truth, const Partition& pred);

MetricReport evaluate(const Partition& truth, const Partition& pred);

}  // namespace smvc
