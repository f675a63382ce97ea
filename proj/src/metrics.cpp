#include "streammvc/metrics.hpp"

#include "streammvc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace smvc {

void Partition::validate() const {
  if (k < 1) throw ValidationError("partition: k must be >= 1");
  for (int l : labels) {
    if (l < 0 || l >= k) {
      throw ValidationError("partition: label " + std::to_string(l) + " outside [0, " +
                            std::to_string(k) + ")");
    }
  }
}

namespace {

struct Contingency {
  int rows = 0;  // truth classes
  int cols = 0;  // predicted clusters
  std::vector<double> counts;
  std::vector<double> row_sums;
  std::vector<double> col_sums;
  double total = 0.0;

  double at(int r, int c) const { return counts[static_cast<std::size_t>(r * cols + c)]; }
};

Contingency contingency(const Partition& truth, const Partition& pred) {
  truth.validate();
  pred.validate();
  if (truth.size() != pred.size()) {
    throw ValidationError("metrics: partitions have different lengths (" +
                          std::to_string(truth.size()) + " vs " + std::to_string(pred.size()) + ")");
  }
  if (truth.size() == 0) throw ValidationError("metrics: empty partitions");
  Contingency t;
  t.rows = truth.k;
  t.cols = pred.k;
  t.counts.assign(static_cast<std::size_t>(t.rows * t.cols), 0.0);
  t.row_sums.assign(static_cast<std::size_t>(t.rows), 0.0);
  t.col_sums.assign(static_cast<std::size_t>(t.cols), 0.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int r = truth.labels[i];
    const int c = pred.labels[i];
    t.counts[static_cast<std::size_t>(r * t.cols + c)] += 1.0;
    t.row_sums[static_cast<std::size_t>(r)] += 1.0;
    t.col_sums[static_cast<std::size_t>(c)] += 1.0;
  }
  t.total = static_cast<double>(truth.size());
  return t;
}

// Minimum-cost perfect assignment on an n x n cost matrix (row-major).
// Returns assignment[row] = column.
std::vector<int> hungarian(const std::vector<double>& cost, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<std::size_t>((i0 - 1) * n + (j - 1))] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

double entropy(const std::vector<double>& sums, double total) {
  double h = 0.0;
  for (double s : sums) {
    if (s > 0.0) {
      const double p = s / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double acc(const Partition& truth, const Partition& pred) {
  const Contingency t = contingency(truth, pred);
  const int n = std::max(t.rows, t.cols);
  // Maximize matches: cost = -count, padded with zeros.
  std::vector<double> cost(static_cast<std::size_t>(n * n), 0.0);
  for (int r = 0; r < t.rows; ++r) {
    for (int c = 0; c < t.cols; ++c) cost[static_cast<std::size_t>(r * n + c)] = -t.at(r, c);
  }
  const auto assignment = hungarian(cost, n);
  double matched = 0.0;
  for (int r = 0; r < t.rows; ++r) {
    const int c = assignment[static_cast<std::size_t>(r)];
    if (c < t.cols) matched += t.at(r, c);
  }
  return matched / t.total;
}

double nmi(const Partition& truth, const Partition& pred) {
  const Contingency t = contingency(truth, pred);
  const double h_truth = entropy(t.row_sums, t.total);
  const double h_pred = entropy(t.col_sums, t.total);
  if (h_truth == 0.0 && h_pred == 0.0) return 1.0;  // both constant: identical up to relabeling
  if (h_truth == 0.0 || h_pred == 0.0) return 0.0;
  double mi = 0.0;
  for (int r = 0; r < t.rows; ++r) {
    for (int c = 0; c < t.cols; ++c) {
      const double n_rc = t.at(r, c);
      if (n_rc == 0.0) continue;
      mi += n_rc / t.total * std::log(n_rc * t.total / (t.row_sums[r] * t.col_sums[c]));
    }
  }
  return std::clamp(mi / std::sqrt(h_truth * h_pred), 0.0, 1.0);
}

double purity(const Partition& truth, const Partition& pred) {
  const Contingency t = contingency(truth, pred);
  double majority = 0.0;
  for (int c = 0; c < t.cols; ++c) {
    double best = 0.0;
    for (int r = 0; r < t.rows; ++r) best = std::max(best, t.at(r, c));
    majority += best;
  }
  return majority / t.total;
}

double fscore(const Partition& truth, const Partition& pred) {
  const Contingency t = contingency(truth, pred);
  double tp = 0.0;
  for (double n_rc : t.counts) tp += pairs(n_rc);
  double pred_pairs = 0.0;
  for (double s : t.col_sums) pred_pairs += pairs(s);
  double truth_pairs = 0.0;
  for (double s : t.row_sums) truth_pairs += pairs(s);
  if (pred_pairs == 0.0 || truth_pairs == 0.0 || tp == 0.0) return 0.0;
  const double precision = tp / pred_pairs;
  const double recall = tp / truth_pairs;
  return 2.0 * precision * recall / (precision + recall);
}

MetricReport evaluate(const Partition& truth, const Partition& pred) {
  return {acc(truth, pred), nmi(truth, pred), purity(truth, pred), fscore(truth, pred)};
}

}  // namespace smvc
