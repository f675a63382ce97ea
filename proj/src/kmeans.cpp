#include "streammvc/kmeans.hpp"

#include "streammvc/error.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace smvc {

namespace {

// Index of the first point whose cumulative weight exceeds `target`, skipping zero-weight points.
Index sample_weighted(const std::vector<double>& w, double target) {
  const Index n = static_cast<Index>(w.size());
  for (Index i = 0; i < n; ++i) {
    target -= w[i];
    if (target < 0.0 && w[i] > 0.0) return i;
  }
  for (Index i = n - 1; i >= 0; --i) {
    if (w[i] > 0.0) return i;
  }
  return n - 1;
}

// Greedy k-means++: each new center is the best of several D^2-weighted candidates.
Matrix seed_plus_plus(const Matrix& points, int k, std::mt19937_64& rng) {
  const Index n = points.cols();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Matrix centers(points.rows(), k);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.col(0) = points.col(pick(rng));

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[i] = (points.col(i) - centers.col(0)).squaredNorm();

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> candidate_d2(static_cast<std::size_t>(n)), best_d2;
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    if (total <= 0.0) {
      centers.col(c) = points.col(pick(rng));
      continue;
    }
    Index best = -1;
    double best_potential = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const Index cand = sample_weighted(d2, unit(rng) * total);
      double potential = 0.0;
      for (Index i = 0; i < n; ++i) {
        candidate_d2[i] = std::min(d2[i], (points.col(i) - points.col(cand)).squaredNorm());
        potential += candidate_d2[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        best = cand;
        best_d2 = candidate_d2;
      }
    }
    centers.col(c) = points.col(best);
    d2 = best_d2;
  }
  return centers;
}

}  // namespace

Matrix normalize_columns(const Matrix& points) {
  Matrix out = points;
  for (Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iters) {
  require_finite(points, "kmeans");
  const Index n = points.cols();
  if (k < 1 || k > n) {
    throw ConfigError("kmeans: k=" + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (max_iters < 1) throw ConfigError("kmeans: max_iters must be >= 1");

  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centers = seed_plus_plus(points, k, rng);
  auto& labels = result.partition.labels;
  result.partition.k = k;
  labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n));

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.col(i) - result.centers.col(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[i] = best_d;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    result.iterations = iter + 1;
    if (!changed) break;

    std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
    Matrix sums = Matrix::Zero(points.rows(), k);
    for (Index i = 0; i < n; ++i) {
      sums.col(labels[i]) += points.col(i);
      ++sizes[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      // Re-seed an empty cluster with the farthest point of a cluster that can spare one.
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (sizes[labels[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
      }
      const int from = labels[far];
      sums.col(from) -= points.col(far);
      --sizes[from];
      sums.col(c) = points.col(far);
      sizes[c] = 1;
      labels[far] = c;
      dist[far] = 0.0;
    }
    for (int c = 0; c < k; ++c) result.centers.col(c) = sums.col(c) / static_cast<double>(sizes[c]);
  }

  result.inertia = 0.0;
  for (Index i = 0; i < n; ++i) result.inertia += (points.col(i) - result.centers.col(labels[i])).squaredNorm();
  return result;
}

}  // namespace smvc
