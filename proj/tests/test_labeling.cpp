#include "doctest.h"
#include "oracles.hpp"

#include "streammvc/error.hpp"
#include "streammvc/kmeans.hpp"
#include "streammvc/metrics.hpp"

#include <numeric>

using namespace smvc;
using oracle::partition;

TEST_CASE("kmeans separates two tight groups") {
  Matrix pts(1, 6);
  pts << 0, 0.1, 0.2, 10, 10.1, 10.2;
  const KMeansResult r = kmeans(pts, 2, 7);
  CHECK(r.partition.labels[0] == r.partition.labels[1]);
  CHECK(r.partition.labels[1] == r.partition.labels[2]);
  CHECK(r.partition.labels[3] == r.partition.labels[4]);
  CHECK(r.partition.labels[0] != r.partition.labels[3]);
  CHECK(r.inertia == doctest::Approx(0.04));
}

TEST_CASE("kmeans edge cases") {
  std::mt19937_64 rng(3);
  const Matrix pts = oracle::gaussian(3, 9, rng);
  SUBCASE("k = 1") {
    const KMeansResult r = kmeans(pts, 1, 0);
    for (int l : r.partition.labels) CHECK(l == 0);
    CHECK((r.centers.col(0) - pts.rowwise().mean()).norm() < 1e-12);
  }
  SUBCASE("k = n puts every point alone") {
    const KMeansResult r = kmeans(pts, 9, 0);
    std::vector<int> sorted = r.partition.labels;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 9; ++i) CHECK(sorted[i] == i);
    CHECK(r.inertia == doctest::Approx(0.0));
  }
  SUBCASE("invalid k") {
    CHECK_THROWS_AS(kmeans(pts, 0, 0), ConfigError);
    CHECK_THROWS_AS(kmeans(pts, 10, 0), ConfigError);
  }
  SUBCASE("deterministic for a fixed seed") {
    const Matrix many = oracle::gaussian(4, 200, rng);
    const KMeansResult a = kmeans(many, 5, 42), b = kmeans(many, 5, 42);
    CHECK(a.partition.labels == b.partition.labels);
    CHECK(a.inertia == b.inertia);
  }
  SUBCASE("no empty clusters with duplicated points") {
    Matrix dup(2, 8);
    dup.leftCols(6).setZero();
    dup.col(6) << 1, 1;
    dup.col(7) << 2, 2;
    const KMeansResult r = kmeans(dup, 3, 1);
    std::vector<int> counts(3, 0);
    for (int l : r.partition.labels) ++counts[l];
    for (int c : counts) CHECK(c > 0);
  }
}

TEST_CASE("normalize_columns") {
  Matrix pts(2, 3);
  pts << 3, 0, 1, 4, 0, 0;
  const Matrix n = normalize_columns(pts);
  CHECK(n(0, 0) == doctest::Approx(0.6));
  CHECK(n(1, 0) == doctest::Approx(0.8));
  CHECK(n.col(1).norm() == 0.0);
  CHECK(n.col(2).norm() == doctest::Approx(1.0));
}

TEST_CASE("metric worked examples") {
  const Partition t = partition({0, 0, 1, 1});
  CHECK(acc(t, partition({1, 1, 0, 0})) == 1.0);
  CHECK(nmi(t, partition({1, 1, 0, 0})) == doctest::Approx(1.0));
  CHECK(fscore(t, partition({1, 1, 0, 0})) == 1.0);
  CHECK(purity(t, partition({1, 1, 0, 0})) == 1.0);

  CHECK(nmi(t, partition({0, 1, 1, 1})) == doctest::Approx(0.3455920299442113).epsilon(1e-12));
  CHECK(fscore(t, partition({0, 1, 0, 1})) == 0.0);
  CHECK(acc(t, partition({0, 1, 0, 1})) == 0.5);
  CHECK(purity(t, partition({0, 0, 0, 1})) == 0.75);

  CHECK(nmi(partition({0, 0, 0}), partition({0, 0, 0})) == 1.0);
  CHECK(nmi(partition({0, 0, 0}), partition({0, 1, 2})) == 0.0);

  CHECK_THROWS_AS(acc(t, partition({0, 1})), ValidationError);
}

TEST_CASE("metrics agree with brute-force oracles on random partitions") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> kd(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int kt = kd(rng), kp = kd(rng);
    const auto lt = oracle::random_labels(30, kt, rng), lp = oracle::random_labels(30, kp, rng);
    const Partition t = partition(oracle::compact(lt)), p = partition(oracle::compact(lp));
    CHECK(std::abs(acc(t, p) - oracle::acc_bruteforce(lt, lp)) < 1e-10);
    CHECK(std::abs(nmi(t, p) - oracle::nmi_contingency(lt, lp)) < 1e-10);
    CHECK(std::abs(purity(t, p) - oracle::purity_bruteforce(lt, lp)) < 1e-10);
    CHECK(std::abs(fscore(t, p) - oracle::fscore_pairs(lt, lp)) < 1e-10);
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 4;
    const Partition t = partition(oracle::compact(oracle::random_labels(40, k, rng)));
    const Partition p = partition(oracle::compact(oracle::random_labels(40, k, rng)));

    // relabeling the prediction changes nothing
    std::vector<int> perm(p.k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Partition q = p;
    for (int& l : q.labels) l = perm[l];
    CHECK(acc(t, q) == doctest::Approx(acc(t, p)).epsilon(1e-14));
    CHECK(nmi(t, q) == doctest::Approx(nmi(t, p)).epsilon(1e-12));
    CHECK(purity(t, q) == doctest::Approx(purity(t, p)).epsilon(1e-14));
    CHECK(fscore(t, q) == doctest::Approx(fscore(t, p)).epsilon(1e-14));

    CHECK(acc(t, p) >= 1.0 / t.k - 1e-12);
    CHECK(std::abs(nmi(t, p) - nmi(p, t)) < 1e-12);
    for (double v : {acc(t, p), nmi(t, p), purity(t, p), fscore(t, p)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(acc(t, t) == 1.0);
    CHECK(nmi(t, t) == doctest::Approx(1.0));
  }
}
