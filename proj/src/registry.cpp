#include "streammvc/registry.hpp"

#include "streammvc/error.hpp"

#include <unordered_set>

namespace smvc {

void ViewBatch::validate() const {
  require_finite(data, "view " + std::to_string(view_index));
  if (static_cast<Index>(ids.size()) != data.cols()) {
    throw ValidationError("view " + std::to_string(view_index) + ": " + std::to_string(ids.size()) +
                          " ids for " + std::to_string(data.cols()) + " columns");
  }
  std::unordered_set<SampleId> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (id.empty()) throw ValidationError("view " + std::to_string(view_index) + ": empty sample id");
    if (!seen.insert(id).second) {
      throw ValidationError("view " + std::to_string(view_index) + ": duplicate sample id '" + id + "'");
    }
  }
}

SampleRegistry::SampleRegistry(std::vector<SampleId> ordered) {
  ordered_.reserve(ordered.size());
  index_.reserve(ordered.size());
  for (auto& id : ordered) {
    if (id.empty()) throw ValidationError("registry: empty sample id");
    if (index_.contains(id)) throw ValidationError("registry: duplicate sample id '" + id + "'");
    index_.emplace(id, ordered_.size());
    ordered_.push_back(std::move(id));
  }
}

std::optional<std::size_t> SampleRegistry::find(const SampleId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SampleRegistry::insert(const SampleId& id) {
  auto [it, inserted] = index_.try_emplace(id, ordered_.size());
  if (inserted) ordered_.push_back(id);
  return it->second;
}

std::vector<Index> IndicatorPair::absent_rows() const {
  std::vector<char> hit(n_total, 0);
  for (Index r : view_rows) hit[static_cast<std::size_t>(r)] = 1;
  std::vector<Index> out;
  for (std::size_t r = 0; r < n_total; ++r) {
    if (!hit[r]) out.push_back(static_cast<Index>(r));
  }
  return out;
}

bool IndicatorPair::is_identity() const {
  if (n_prev != n_total || view_rows.size() != n_total) return false;
  for (std::size_t c = 0; c < view_rows.size(); ++c) {
    if (view_rows[c] != static_cast<Index>(c)) return false;
  }
  return true;
}

Matrix IndicatorPair::m1_dense() const {
  Matrix m = Matrix::Zero(static_cast<Index>(n_total), static_cast<Index>(view_rows.size()));
  for (std::size_t c = 0; c < view_rows.size(); ++c) m(view_rows[c], static_cast<Index>(c)) = 1.0;
  return m;
}

Matrix IndicatorPair::m2_dense() const {
  Matrix m = Matrix::Zero(static_cast<Index>(n_total), static_cast<Index>(n_prev));
  m.topRows(static_cast<Index>(n_prev)).setIdentity();
  return m;
}

std::pair<SampleRegistry, IndicatorPair> register_view(const SampleRegistry& reg,
                                                       const ViewBatch& batch) {
  batch.validate();
  SampleRegistry next = reg;
  IndicatorPair ind;
  ind.n_prev = reg.size();
  ind.view_rows.reserve(batch.ids.size());
  for (const auto& id : batch.ids) ind.view_rows.push_back(static_cast<Index>(next.insert(id)));
  ind.n_total = next.size();
  return {std::move(next), std::move(ind)};
}

CoverageReport coverage_check(const SampleRegistry& reg, const std::vector<ViewBatch>& views) {
  std::vector<char> seen(reg.size(), 0);
  for (const auto& v : views) {
    for (const auto& id : v.ids) {
      if (auto pos = reg.find(id)) seen[*pos] = 1;
    }
  }
  CoverageReport report;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (!seen[i]) report.uncovered.push_back(reg.at(i));
  }
  return report;
}

}  // namespace smvc
