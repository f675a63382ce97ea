#pragma once

#include "streammvc/numeric.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace smvc {

using SampleId = std::string;

/// One arriving view: a d_t x n_t feature matrix with one column per sample.
struct ViewBatch {
  std::size_t view_index = 1;  // 1-based arrival ordinal
  Matrix data;
  std::vector<SampleId> ids;  // length n_t, one per column

  /// Throws ValidationError on empty/non-finite data, id/column count mismatch,
  /// empty ids or duplicate ids.
  void validate() const;
};

/// Ordered union of all sample ids seen so far. Append-only: the position of a
/// registered id never changes.
class SampleRegistry {
 public:
  SampleRegistry() = default;
  explicit SampleRegistry(std::vector<SampleId> ordered);

  std::size_t size() const { return ordered_.size(); }
  bool empty() const { return ordered_.empty(); }
  const std::vector<SampleId>& ids() const { return ordered_; }
  const SampleId& at(std::size_t pos) const { return ordered_.at(pos); }
  std::optional<std::size_t> find(const SampleId& id) const;
  bool contains(const SampleId& id) const { return index_.contains(id); }

  /// Returns the position of `id`, appending it if unseen.
  std::size_t insert(const SampleId& id);

  friend bool operator==(const SampleRegistry& a, const SampleRegistry& b) {
    return a.ordered_ == b.ordered_;
  }

 private:
  std::vector<SampleId> ordered_;
  std::unordered_map<SampleId, std::size_t> index_;
};

/// The selection matrices M1 (n_a x n_t) and M2 (n_a x n_prev), stored as index maps.
///
/// M1 has a single one per column c, at row view_rows[c]. Because the registry
/// is append-only, M2 is the prefix injection [I; 0]: previous position c maps to
/// row c. All products with M1/M2 are row gathers and scatters.
struct IndicatorPair {
  std::size_t n_total = 0;        // n_a^t
  std::size_t n_prev = 0;         // n_a^{t-1}
  std::vector<Index> view_rows;   // length n_t

  std::size_t n_view() const { return view_rows.size(); }

  /// Union rows that the current view does not observe, ascending.
  std::vector<Index> absent_rows() const;

  /// True when M1 = M2 = I (same id set in the same order).
  bool is_identity() const;

  Matrix m1_dense() const;
  Matrix m2_dense() const;
};

/// Registers `batch` against `reg`: unseen ids are appended in batch column
/// order. Returns the updated registry and the indicator pair for this view.
std::pair<SampleRegistry, IndicatorPair> register_view(const SampleRegistry& reg,
                                                       const ViewBatch& batch);

struct CoverageReport {
  std::vector<SampleId> uncovered;  // registry ids appearing in none of the views
  bool empty() const { return uncovered.empty(); }
};

CoverageReport coverage_check(const SampleRegistry& reg, const std::vector<ViewBatch>& views);

}  // namespace smvc
