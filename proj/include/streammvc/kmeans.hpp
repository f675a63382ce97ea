#pragma once

#include "streammvc/numeric.hpp"
#include "streammvc/partition.hpp"

#include <cstdint>

namespace smvc {

struct KMeansResult {
  Partition partition;
  Matrix centers;        // dim x k
  double inertia = 0.0;  // within-cluster sum of squares
  int iterations = 0;
};

/// Lloyd's algorithm with greedy k-means++ seeding on the columns of `points` (dim x n).
///
/// Runs until the assignment stops changing or `max_iters` is reached. A cluster
/// that empties is re-seeded with the point farthest from its current center.
/// Deterministic for a fixed seed.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iters = 300);

/// Copy of `points` with every non-zero column scaled to unit Euclidean length.
Matrix normalize_columns(const Matrix& points);

}  // namespace smvc
