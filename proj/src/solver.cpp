#include "streammvc/solver.hpp"

#include "streammvc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace smvc {

namespace {

constexpr double kOrthoTolerance = 1e-8;

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void expect_shape(const Matrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ValidationError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                          std::to_string(cols) + ", got " + dims(m));
  }
}

Index n_total(const IndicatorPair& ind) { return static_cast<Index>(ind.n_total); }
Index n_prev(const IndicatorPair& ind) { return static_cast<Index>(ind.n_prev); }
Index n_view(const IndicatorPair& ind) { return static_cast<Index>(ind.n_view()); }

void check_z_inputs(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                    const IndicatorPair& ind) {
  const Index k = h.cols();
  expect_shape(x, x.rows(), n_view(ind), "X");
  expect_shape(h, x.rows(), k, "H");
  expect_shape(w, k, k, "W");
  expect_shape(z_prev, k, n_prev(ind), "Z_prev");
}

// Gather/scatter route.
struct GatherOps {
  const IndicatorPair& ind;
  std::vector<Index> absent;

  explicit GatherOps(const IndicatorPair& i) : ind(i), absent(i.absent_rows()) {}

  Matrix a(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
           const Matrix* z_current) const {
    Matrix out = Matrix::Zero(n_total(ind), h.cols());
    scatter_add_rows(out, ind.view_rows, x.transpose() * h);
    out.topRows(n_prev(ind)) += z_prev.transpose() * w.transpose();
    if (z_current != nullptr) {
      for (Index r : absent) out.row(r) += z_current->col(r).transpose();
    }
    return out;
  }
  Matrix b(const Matrix& z, const Matrix& z_prev) const {
    return z.leftCols(n_prev(ind)) * z_prev.transpose();
  }
  Matrix c(const Matrix& x, const Matrix& z) const {
    return x * gather_columns(z, ind.view_rows).transpose();
  }
  double obj(const Matrix& x, const Matrix& h, const Matrix& z, const Matrix& w,
             const Matrix& z_prev) const {
    const double fit = 0.5 * (x - h * gather_columns(z, ind.view_rows)).squaredNorm();
    const double align = z.leftCols(n_prev(ind)).cwiseProduct(w * z_prev).sum();
    return fit - align;
  }
};

// Explicit-matrix route.
struct DenseOps {
  Matrix m1;
  Matrix m2;
  Matrix absent_projector;  // I - M1 M1^T

  explicit DenseOps(const IndicatorPair& ind)
      : m1(ind.m1_dense()),
        m2(ind.m2_dense()),
        absent_projector(Matrix::Identity(n_total(ind), n_total(ind)) - m1 * m1.transpose()) {}

  Matrix a(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
           const Matrix* z_current) const {
    Matrix out = m1 * x.transpose() * h + m2 * z_prev.transpose() * w.transpose();
    if (z_current != nullptr) out += absent_projector * z_current->transpose();
    return out;
  }
  Matrix b(const Matrix& z, const Matrix& z_prev) const { return z * m2 * z_prev.transpose(); }
  Matrix c(const Matrix& x, const Matrix& z) const { return x * m1.transpose() * z.transpose(); }
  double obj(const Matrix& x, const Matrix& h, const Matrix& z, const Matrix& w,
             const Matrix& z_prev) const {
    return dense::objective(x, h, z, w, z_prev, m1, m2);
  }
};

template <typename Ops>
ConsensusState solve(const Ops& ops, const ConsensusState& state, const ViewBatch& batch,
                     SampleRegistry registry, const IndicatorPair& ind, const SolverConfig& cfg) {
  const Matrix& x = batch.data;
  const Matrix& z_prev = state.z;
  const int k = state.k;

  SolveDiagnostics diag;
  diag.lower_bound = lower_bound(ind.n_prev, k);

  Matrix h = init_h(x.rows(), k);
  Matrix w = Matrix::Identity(k, k);
  Matrix z;
  double previous = 0.0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const bool majorize = cfg.majorize_absent && iter > 1;
    z = solve_trace_max(ops.a(x, h, w, z_prev, majorize ? &z : nullptr)).transpose();
    diag.max_z_error = std::max(diag.max_z_error, row_orthonormality_error(z));

    w = solve_trace_max(ops.b(z, z_prev));
    diag.max_w_error = std::max(diag.max_w_error, column_orthonormality_error(w));

    h = solve_trace_max(ops.c(x, z));
    diag.max_h_error = std::max(diag.max_h_error, column_orthonormality_error(h));

    const double obj = ops.obj(x, h, z, w, z_prev);
    diag.objective_trace.push_back(obj);
    diag.iters = iter;
    if (iter > 1 && std::abs(previous - obj) / std::max(std::abs(obj), 1e-12) <= cfg.epsilon) {
      diag.converged = true;
      break;
    }
    previous = obj;
  }

  if (diag.max_z_error > kOrthoTolerance || !z.allFinite()) {
    throw NumericalError("integrate_view: consensus matrix lost row-orthonormality (residual " +
                         std::to_string(diag.max_z_error) + ")");
  }

  ConsensusState next;
  next.z = std::move(z);
  next.registry = std::move(registry);
  next.k = k;
  next.views_seen = state.views_seen + 1;
  next.last_diag = std::move(diag);
  return next;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("solver: epsilon must be > 0");
  if (max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
}

void ConsensusState::validate() const {
  if (k < 1) throw ValidationError("state: k must be >= 1");
  if (z.rows() != k) throw ValidationError("state: Z has " + std::to_string(z.rows()) + " rows, k=" + std::to_string(k));
  if (static_cast<std::size_t>(z.cols()) != registry.size()) {
    throw ValidationError("state: Z has " + std::to_string(z.cols()) + " columns for " +
                          std::to_string(registry.size()) + " registered samples");
  }
  if (static_cast<std::size_t>(k) > registry.size()) throw ValidationError("state: k exceeds sample count");
  if (views_seen < 1) throw ValidationError("state: no view integrated yet");
  require_finite(z, "state Z");
  if (row_orthonormality_error(z) > kOrthoTolerance) {
    throw ValidationError("state: Z is not row-orthonormal");
  }
}

Matrix init_h(Index d, Index k) {
  if (k < 1) throw ConfigError("init_h: k must be >= 1");
  if (d < k) {
    throw ConfigError("view has " + std::to_string(d) + " features, fewer than k=" + std::to_string(k));
  }
  Matrix h = Matrix::Zero(d, k);
  h.topRows(k).setIdentity();
  return h;
}

ConsensusState init_first_view(const ViewBatch& batch, int k, const SolverConfig& cfg) {
  cfg.validate();
  if (k < 1) throw ConfigError("k must be >= 1");
  auto [registry, ind] = register_view(SampleRegistry{}, batch);
  const Matrix& x = batch.data;
  if (k > x.cols()) {
    throw ConfigError("k=" + std::to_string(k) + " exceeds the " + std::to_string(x.cols()) +
                      " samples of the first view");
  }
  if (k > x.rows()) {
    throw ConfigError("view has " + std::to_string(x.rows()) + " features, fewer than k=" + std::to_string(k));
  }

  ConsensusState state;
  state.k = k;
  state.views_seen = 1;
  state.registry = std::move(registry);

  Matrix h;
  if (cfg.init == InitMethod::svd) {
    const ThinSvd svd = thin_svd(x);
    state.z = svd.vt.topRows(k);
    h = svd.u.leftCols(k);
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss;
    Matrix g(x.cols(), k);
    for (Index j = 0; j < g.cols(); ++j)
      for (Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
    state.z = solve_trace_max(g).transpose();
    h = solve_trace_max(x * state.z.transpose());
  }

  SolveDiagnostics& diag = state.last_diag;
  diag.objective_trace.push_back(0.5 * (x - h * state.z).squaredNorm());
  diag.iters = 0;
  diag.converged = true;
  diag.lower_bound = lower_bound(0, k);
  diag.max_z_error = row_orthonormality_error(state.z);
  diag.max_h_error = column_orthonormality_error(h);
  return state;
}

Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const IndicatorPair& ind) {
  check_z_inputs(x, h, w, z_prev, ind);
  return GatherOps(ind).a(x, h, w, z_prev, nullptr);
}

Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const IndicatorPair& ind, const Matrix& z_current) {
  check_z_inputs(x, h, w, z_prev, ind);
  expect_shape(z_current, h.cols(), n_total(ind), "Z_current");
  return GatherOps(ind).a(x, h, w, z_prev, &z_current);
}

Matrix w_coefficients(const Matrix& z, const Matrix& z_prev, const IndicatorPair& ind) {
  expect_shape(z, z.rows(), n_total(ind), "Z");
  expect_shape(z_prev, z.rows(), n_prev(ind), "Z_prev");
  return GatherOps(ind).b(z, z_prev);
}

Matrix h_coefficients(const Matrix& x, const Matrix& z, const IndicatorPair& ind) {
  expect_shape(x, x.rows(), n_view(ind), "X");
  expect_shape(z, z.rows(), n_total(ind), "Z");
  return GatherOps(ind).c(x, z);
}

Matrix update_z(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                const IndicatorPair& ind) {
  return solve_trace_max(z_coefficients(x, h, w, z_prev, ind)).transpose();
}

Matrix update_z(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                const IndicatorPair& ind, const Matrix& z_current) {
  return solve_trace_max(z_coefficients(x, h, w, z_prev, ind, z_current)).transpose();
}

Matrix update_w(const Matrix& z, const Matrix& z_prev, const IndicatorPair& ind) {
  return solve_trace_max(w_coefficients(z, z_prev, ind));
}

Matrix update_h(const Matrix& x, const Matrix& z, const IndicatorPair& ind) {
  const Matrix c = h_coefficients(x, z, ind);
  if (c.rows() < c.cols()) {
    throw ConfigError("view has " + std::to_string(c.rows()) + " features, fewer than k=" +
                      std::to_string(c.cols()));
  }
  return solve_trace_max(c);
}

double objective(const Matrix& x, const Matrix& h, const Matrix& z, const Matrix& w,
                 const Matrix& z_prev, const IndicatorPair& ind) {
  const Index k = z.rows();
  expect_shape(z, k, n_total(ind), "Z");
  check_z_inputs(x, h, w, z_prev, ind);
  if (h.cols() != k) throw ValidationError("objective: H and Z disagree on k");
  return GatherOps(ind).obj(x, h, z, w, z_prev);
}

double lower_bound(std::size_t n_prev, int k) {
  return -std::sqrt(static_cast<double>(n_prev)) * std::pow(static_cast<double>(k), 1.5);
}

namespace dense {

Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const Matrix& m1, const Matrix& m2) {
  return m1 * x.transpose() * h + m2 * z_prev.transpose() * w.transpose();
}

Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const Matrix& m1, const Matrix& m2, const Matrix& z_current) {
  const Matrix absent = Matrix::Identity(m1.rows(), m1.rows()) - m1 * m1.transpose();
  return z_coefficients(x, h, w, z_prev, m1, m2) + absent * z_current.transpose();
}

Matrix w_coefficients(const Matrix& z, const Matrix& z_prev, const Matrix& m2) {
  return z * m2 * z_prev.transpose();
}

Matrix h_coefficients(const Matrix& x, const Matrix& z, const Matrix& m1) {
  return x * m1.transpose() * z.transpose();
}

double objective(const Matrix& x, const Matrix& h, const Matrix& z, const Matrix& w,
                 const Matrix& z_prev, const Matrix& m1, const Matrix& m2) {
  const double fit = 0.5 * (x - h * z * m1).squaredNorm();
  const double align = ((z * m2).transpose() * w * z_prev).trace();
  return fit - align;
}

}  // namespace dense

ConsensusState integrate_view(const ConsensusState& state, const ViewBatch& batch,
                              const SolverConfig& cfg) {
  cfg.validate();
  state.validate();
  batch.validate();
  if (batch.view_index != state.views_seen + 1) {
    throw ValidationError("view index " + std::to_string(batch.view_index) + " does not follow " +
                          std::to_string(state.views_seen) + " integrated views");
  }
  if (batch.data.rows() < state.k) {
    throw ConfigError("view " + std::to_string(batch.view_index) + " has " +
                      std::to_string(batch.data.rows()) + " features, fewer than k=" +
                      std::to_string(state.k));
  }
  auto [registry, ind] = register_view(state.registry, batch);
  if (cfg.dense_indicators) return solve(DenseOps(ind), state, batch, std::move(registry), ind, cfg);
  return solve(GatherOps(ind), state, batch, std::move(registry), ind, cfg);
}

ConsensusState run_stream(std::vector<ViewBatch> views, int k, const SolverConfig& cfg) {
  if (views.empty()) throw ValidationError("run_stream: no views");
  for (std::size_t t = 0; t < views.size(); ++t) views[t].view_index = t + 1;
  ConsensusState state = init_first_view(views.front(), k, cfg);
  for (std::size_t t = 1; t < views.size(); ++t) state = integrate_view(state, views[t], cfg);
  return state;
}

std::uint64_t restart_seed(std::uint64_t seed, int r) {
  // splitmix64 finalizer over (seed, r)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(r) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<KMeansResult> label_restarts(const ConsensusState& state, const LabelConfig& cfg) {
  if (cfg.restarts < 1) throw ConfigError("labeling: restarts must be >= 1");
  const int k = cfg.k > 0 ? cfg.k : state.k;
  const Matrix points = cfg.normalize ? normalize_columns(state.z) : state.z;
  std::vector<KMeansResult> runs;
  runs.reserve(static_cast<std::size_t>(cfg.restarts));
  for (int r = 0; r < cfg.restarts; ++r) runs.push_back(kmeans(points, k, restart_seed(cfg.seed, r)));
  return runs;
}

Partition final_labels(const ConsensusState& state, const LabelConfig& cfg) {
  auto runs = label_restarts(state, cfg);
  auto best = std::min_element(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
    return a.inertia < b.inertia;
  });
  return std::move(best->partition);
}

Partition final_labels(const ConsensusState& state, int k, int restarts, std::uint64_t seed) {
  return final_labels(state, LabelConfig{k, restarts, seed, true});
}

}  // namespace smvc
