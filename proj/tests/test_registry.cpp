#include "doctest.h"
#include "oracles.hpp"

#include "streammvc/error.hpp"
#include "streammvc/registry.hpp"

#include <set>

using namespace smvc;

namespace {

ViewBatch batch(std::vector<SampleId> ids, std::size_t index = 1) {
  ViewBatch v;
  v.view_index = index;
  v.data = Matrix::Ones(2, static_cast<Index>(ids.size()));
  v.ids = std::move(ids);
  return v;
}

void check_indicator_invariants(const IndicatorPair& ind) {
  const Matrix m1 = ind.m1_dense();
  const Matrix m2 = ind.m2_dense();
  CHECK((m1.transpose() * m1 - Matrix::Identity(m1.cols(), m1.cols())).norm() == 0.0);
  CHECK((m2.transpose() * m2 - Matrix::Identity(m2.cols(), m2.cols())).norm() == 0.0);
  for (Index r = 0; r < m1.rows(); ++r) {
    CHECK(m1.row(r).sum() <= 1.0);
    CHECK(m2.row(r).sum() <= 1.0);
    CHECK(m1.row(r).sum() + m2.row(r).sum() >= 1.0);  // no orphan rows
  }
}

}  // namespace

TEST_CASE("register_view appends unseen ids and builds the selection matrices") {
  const SampleRegistry reg({"s1", "s2", "s3"});
  auto [next, ind] = register_view(reg, batch({"s2", "s4"}));
  CHECK(next.ids() == std::vector<SampleId>{"s1", "s2", "s3", "s4"});

  Matrix m1 = Matrix::Zero(4, 2);
  m1(1, 0) = 1;
  m1(3, 1) = 1;
  Matrix m2 = Matrix::Zero(4, 3);
  m2(0, 0) = m2(1, 1) = m2(2, 2) = 1;
  CHECK(ind.m1_dense() == m1);
  CHECK(ind.m2_dense() == m2);
  CHECK(ind.absent_rows() == std::vector<Index>{0, 2});
  check_indicator_invariants(ind);
}

TEST_CASE("first view: M2 has no columns and M1 is the identity") {
  auto [next, ind] = register_view(SampleRegistry{}, batch({"a", "b"}));
  CHECK(next.ids() == std::vector<SampleId>{"a", "b"});
  CHECK(ind.m2_dense().cols() == 0);
  CHECK(ind.m1_dense() == Matrix::Identity(2, 2));
}

TEST_CASE("identical id sets in identical order reduce to identity indicators") {
  const SampleRegistry reg({"x", "y", "z"});
  auto [next, ind] = register_view(reg, batch({"x", "y", "z"}));
  CHECK(ind.is_identity());
  CHECK(ind.m1_dense() == Matrix::Identity(3, 3));
  CHECK(ind.m2_dense() == Matrix::Identity(3, 3));
  CHECK(next == reg);

  auto [_, shuffled] = register_view(reg, batch({"y", "x", "z"}));
  CHECK_FALSE(shuffled.is_identity());
}

TEST_CASE("duplicate ids in a batch are rejected") {
  CHECK_THROWS_AS(register_view(SampleRegistry{}, batch({"a", "b", "a"})), ValidationError);
  CHECK_THROWS_AS(SampleRegistry({"a", "a"}), ValidationError);
  ViewBatch bad = batch({"a", "b"});
  bad.ids.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("coverage_check lists ids seen in no view") {
  const SampleRegistry reg({"a", "b", "c"});
  CHECK(coverage_check(reg, {batch({"a", "b"}), batch({"c", "b"})}).empty());
  const auto report = coverage_check(reg, {batch({"a"}), batch({"a", "b"})});
  CHECK(report.uncovered == std::vector<SampleId>{"c"});
}

TEST_CASE("random streams keep registry positions stable and indicators valid") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(0, 59);
  SampleRegistry reg;
  for (int step = 0; step < 30; ++step) {
    std::vector<SampleId> ids;
    std::set<int> used;
    const int count = 1 + pick(rng) % 20;
    while (static_cast<int>(ids.size()) < count) {
      const int id = pick(rng);
      if (used.insert(id).second) ids.push_back("id" + std::to_string(id));
    }
    auto [next, ind] = register_view(reg, batch(ids));
    // previously registered ids keep their positions
    for (std::size_t i = 0; i < reg.size(); ++i) CHECK(next.at(i) == reg.at(i));
    check_indicator_invariants(ind);
    for (std::size_t c = 0; c < ids.size(); ++c) CHECK(next.at(static_cast<std::size_t>(ind.view_rows[c])) == ids[c]);
    // scattering through M1 loses nothing
    const Matrix x = oracle::gaussian(static_cast<Index>(ids.size()), 1, rng);
    CHECK((ind.m1_dense() * x).norm() == doctest::Approx(x.norm()));
    reg = std::move(next);
  }
}
