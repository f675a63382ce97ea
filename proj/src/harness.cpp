#include "streammvc/harness.hpp"

#include "streammvc/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

namespace smvc {

namespace {

std::vector<SampleId> union_ids(const std::vector<ViewBatch>& views) {
  SampleRegistry reg;
  for (const auto& v : views) {
    for (const auto& id : v.ids) reg.insert(id);
  }
  return reg.ids();
}

ViewBatch keep_columns(const ViewBatch& view, const std::vector<Index>& cols) {
  ViewBatch out;
  out.view_index = view.view_index;
  out.data = gather_columns(view.data, cols);
  out.ids.reserve(cols.size());
  for (Index c : cols) out.ids.push_back(view.ids[static_cast<std::size_t>(c)]);
  return out;
}

// Draws `count` distinct entries of `pool` uniformly; the result is sorted ascending.
std::vector<Index> draw(std::vector<Index> pool, std::size_t count, std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

MetricReport combine(const MetricReport& a, const MetricReport& b, double wa, double wb) {
  return {wa * a.acc + wb * b.acc, wa * a.nmi + wb * b.nmi, wa * a.purity + wb * b.purity,
          wa * a.fscore + wb * b.fscore};
}

MetricReport square_dev(const MetricReport& x, const MetricReport& mean) {
  auto sq = [](double v) { return v * v; };
  return {sq(x.acc - mean.acc), sq(x.nmi - mean.nmi), sq(x.purity - mean.purity),
          sq(x.fscore - mean.fscore)};
}

MetricReport scaled(const MetricReport& x, double s) { return combine(x, x, s, 0.0); }

MetricReport sqrt_of(const MetricReport& x) {
  return {std::sqrt(x.acc), std::sqrt(x.nmi), std::sqrt(x.purity), std::sqrt(x.fscore)};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (k < 1) throw ConfigError("synthetic: k must be >= 1");
  if (n < 2 * static_cast<std::size_t>(k)) throw ConfigError("synthetic: n must be >= 2k");
  if (dims.empty()) throw ConfigError("synthetic: at least one view is required");
  for (Index d : dims) {
    if (d < k) throw ConfigError("synthetic: every view needs at least k features");
  }
  if (!(separation > 0.0)) throw ConfigError("synthetic: separation must be > 0");
  if (!(sigma > 0.0)) throw ConfigError("synthetic: sigma must be > 0");
}

Partition LabeledSamples::aligned_to(const std::vector<SampleId>& order) const {
  std::unordered_map<SampleId, int> lookup;
  lookup.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) lookup.emplace(ids[i], truth.labels.at(i));
  Partition out;
  out.k = truth.k;
  out.labels.reserve(order.size());
  for (const auto& id : order) {
    auto it = lookup.find(id);
    if (it == lookup.end()) throw ValidationError("no ground-truth label for sample '" + id + "'");
    out.labels.push_back(it->second);
  }
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss;

  SyntheticData out;
  auto& ids = out.labels.ids;
  auto& labels = out.labels.truth.labels;
  out.labels.truth.k = spec.k;
  ids.reserve(spec.n);
  labels.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    ids.push_back("s" + std::to_string(i));
    labels.push_back(static_cast<int>(i % static_cast<std::size_t>(spec.k)));
  }
  std::shuffle(labels.begin(), labels.end(), rng);

  const double min_dist = spec.separation * spec.sigma;
  for (std::size_t t = 0; t < spec.dims.size(); ++t) {
    const Index d = spec.dims[t];
    Matrix centers(d, spec.k);
    int placed = 0;
    for (int attempt = 0; placed < spec.k; ++attempt) {
      if (attempt == 1000) {
        throw ConfigError("synthetic: cannot place " + std::to_string(spec.k) + " centers " +
                          std::to_string(min_dist) + " apart in " + std::to_string(d) + " dimensions");
      }
      Vector c(d);
      for (Index i = 0; i < d; ++i) c(i) = min_dist * gauss(rng);
      bool ok = true;
      for (int j = 0; j < placed && ok; ++j) ok = (centers.col(j) - c).norm() >= min_dist;
      if (ok) centers.col(placed++) = c;
    }

    ViewBatch view;
    view.view_index = t + 1;
    view.ids = ids;
    view.data.resize(d, static_cast<Index>(spec.n));
    for (std::size_t i = 0; i < spec.n; ++i) {
      auto col = view.data.col(static_cast<Index>(i));
      col = centers.col(labels[i]);
      for (Index r = 0; r < d; ++r) col(r) += spec.sigma * gauss(rng);
    }
    out.views.push_back(std::move(view));
  }
  return out;
}

std::pair<std::vector<ViewBatch>, MissingPattern> apply_missing(const std::vector<ViewBatch>& views,
                                                                double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 0.5)) {
    throw ConfigError("missing ratio " + std::to_string(ratio) + " outside [0, 0.5]");
  }
  if (views.empty()) throw ValidationError("apply_missing: no views");
  for (const auto& v : views) v.validate();

  const std::vector<SampleId> all = union_ids(views);
  const auto drop_count = static_cast<std::size_t>(std::floor(static_cast<double>(all.size()) * ratio + 1e-9));
  std::mt19937_64 rng(seed);

  MissingPattern pattern;
  pattern.ratio = ratio;
  pattern.seed = seed;
  std::vector<ViewBatch> out;
  out.reserve(views.size());
  std::unordered_map<SampleId, int> coverage;

  auto emit = [&](const ViewBatch& view, const std::vector<Index>& dropped) {
    std::vector<char> gone(view.ids.size(), 0);
    for (Index c : dropped) gone[static_cast<std::size_t>(c)] = 1;
    std::vector<Index> kept;
    std::vector<SampleId> kept_ids, dropped_ids;
    for (std::size_t c = 0; c < view.ids.size(); ++c) {
      if (gone[c]) {
        dropped_ids.push_back(view.ids[c]);
      } else {
        kept.push_back(static_cast<Index>(c));
        kept_ids.push_back(view.ids[c]);
      }
    }
    if (kept.empty()) throw ProtocolError("view " + std::to_string(view.view_index) + " would lose every sample");
    for (const auto& id : kept_ids) ++coverage[id];
    out.push_back(keep_columns(view, kept));
    pattern.retained.push_back(std::move(kept_ids));
    pattern.dropped.push_back(std::move(dropped_ids));
  };

  for (std::size_t t = 0; t + 1 < views.size(); ++t) {
    const auto& view = views[t];
    if (view.ids.size() < drop_count) {
      throw ProtocolError("view " + std::to_string(view.view_index) + " has fewer than " +
                          std::to_string(drop_count) + " samples to drop");
    }
    std::vector<Index> pool(view.ids.size());
    std::iota(pool.begin(), pool.end(), Index{0});
    emit(view, draw(std::move(pool), drop_count, rng));
  }

  const auto& last = views.back();
  std::vector<Index> candidates;
  for (std::size_t c = 0; c < last.ids.size(); ++c) {
    if (coverage.contains(last.ids[c])) candidates.push_back(static_cast<Index>(c));
  }
  if (candidates.size() < drop_count) {
    throw ProtocolError("last view has only " + std::to_string(candidates.size()) +
                        " samples observed earlier, cannot drop " + std::to_string(drop_count));
  }
  emit(last, draw(std::move(candidates), drop_count, rng));

  for (const auto& id : all) {
    if (!coverage.contains(id)) throw ProtocolError("sample '" + id + "' would be missing from every view");
  }
  return {std::move(out), std::move(pattern)};
}

std::vector<ViewBatch> fill_views(const std::vector<ViewBatch>& views, FillMode mode) {
  const std::vector<SampleId> all = union_ids(views);
  std::vector<ViewBatch> out;
  out.reserve(views.size());
  for (const auto& view : views) {
    view.validate();
    std::unordered_map<SampleId, Index> column;
    column.reserve(view.ids.size());
    for (std::size_t c = 0; c < view.ids.size(); ++c) column.emplace(view.ids[c], static_cast<Index>(c));

    Vector fill = Vector::Zero(view.data.rows());
    if (mode == FillMode::average) fill = view.data.rowwise().mean();

    ViewBatch filled;
    filled.view_index = view.view_index;
    filled.ids = all;
    filled.data.resize(view.data.rows(), static_cast<Index>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto it = column.find(all[i]);
      filled.data.col(static_cast<Index>(i)) = it == column.end() ? fill : view.data.col(it->second);
    }
    out.push_back(std::move(filled));
  }
  return out;
}

ConsensusState run_fill_stream(const std::vector<ViewBatch>& views, FillMode mode, int k,
                               const SolverConfig& cfg) {
  return run_stream(fill_views(views, mode), k, cfg);
}

Partition run_fill_baseline(const std::vector<ViewBatch>& views, FillMode mode, int k,
                            const SolverConfig& cfg, const LabelConfig& labels) {
  return final_labels(run_fill_stream(views, mode, k, cfg), labels);
}

const char* method_name(Method m) {
  switch (m) {
    case Method::incomplete:
      return "fcmvc-iv";
    case Method::zero_fill:
      return "fcmvc-zf";
    case Method::average_fill:
      return "fcmvc-af";
  }
  return "?";
}

Evaluation evaluate_state(ConsensusState state, const LabeledSamples& truth, const LabelConfig& labels) {
  const Partition aligned = truth.aligned_to(state.registry.ids());
  const auto runs = label_restarts(state, labels);

  std::vector<MetricReport> reports;
  reports.reserve(runs.size());
  for (const auto& run : runs) reports.push_back(evaluate(aligned, run.partition));

  Evaluation ev;
  const double w = 1.0 / static_cast<double>(reports.size());
  for (const auto& r : reports) ev.mean = combine(ev.mean, r, 1.0, 1.0);
  ev.mean = scaled(ev.mean, w);
  MetricReport var;
  for (const auto& r : reports) var = combine(var, square_dev(r, ev.mean), 1.0, 1.0);
  ev.std = sqrt_of(scaled(var, w));

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].inertia < runs[best].inertia) best = i;
  }
  ev.best = reports[best];
  ev.state = std::move(state);
  return ev;
}

Evaluation evaluate_method(const std::vector<ViewBatch>& views, const LabeledSamples& truth,
                           Method method, int k, const SolverConfig& cfg, const LabelConfig& labels) {
  switch (method) {
    case Method::zero_fill:
      return evaluate_state(run_fill_stream(views, FillMode::zero, k, cfg), truth, labels);
    case Method::average_fill:
      return evaluate_state(run_fill_stream(views, FillMode::average, k, cfg), truth, labels);
    case Method::incomplete:
      break;
  }
  return evaluate_state(run_stream(views, k, cfg), truth, labels);
}

std::vector<OrderRun> order_sweep(const std::vector<ViewBatch>& complete_views,
                                  const LabeledSamples& truth, double ratio, int k,
                                  const SolverConfig& cfg, const LabelConfig& labels,
                                  std::size_t permutations, std::uint64_t seed) {
  const std::size_t m = complete_views.size();
  if (m == 0) throw ValidationError("order_sweep: no views");
  if (permutations < 1) throw ConfigError("order_sweep: permutations must be >= 1");
  std::size_t orders = 1;
  for (std::size_t i = 2; i <= m && orders <= permutations; ++i) orders *= i;
  if (permutations > orders) {
    throw ConfigError("order_sweep: " + std::to_string(permutations) + " orders requested but only " +
                      std::to_string(orders) + " exist for " + std::to_string(m) + " views");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> chosen;
  std::vector<std::size_t> base(m);
  std::iota(base.begin(), base.end(), std::size_t{0});
  if (m <= 8) {
    std::vector<std::vector<std::size_t>> all;
    do {
      all.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    std::shuffle(all.begin(), all.end(), rng);
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(permutations));
  } else {
    std::set<std::vector<std::size_t>> seen;
    while (chosen.size() < permutations) {
      std::shuffle(base.begin(), base.end(), rng);
      if (seen.insert(base).second) chosen.push_back(base);
    }
  }

  std::vector<OrderRun> out;
  out.reserve(chosen.size());
  for (const auto& order : chosen) {
    std::vector<ViewBatch> views;
    views.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      views.push_back(complete_views[order[i]]);
      views.back().view_index = i + 1;
    }
    auto [incomplete, pattern] = apply_missing(views, ratio, seed);
    out.push_back({order, evaluate_method(incomplete, truth, Method::incomplete, k, cfg, labels).mean});
  }
  return out;
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepAggregate> out;
  for (const auto& row : rows) {
    if (std::none_of(out.begin(), out.end(), [&](const auto& a) { return a.ratio == row.ratio; })) {
      out.push_back({row.ratio, {}, {}});
    }
  }
  for (auto& agg : out) {
    std::vector<MetricReport> cell;
    for (const auto& row : rows) {
      if (row.ratio == agg.ratio) cell.push_back(row.report);
    }
    const double n = static_cast<double>(cell.size());
    for (const auto& r : cell) agg.mean = combine(agg.mean, r, 1.0, 1.0);
    agg.mean = scaled(agg.mean, 1.0 / n);
    if (cell.size() > 1) {
      MetricReport var;
      for (const auto& r : cell) var = combine(var, square_dev(r, agg.mean), 1.0, 1.0);
      agg.std = sqrt_of(scaled(var, 1.0 / (n - 1.0)));
    }
  }
  return out;
}

std::uint64_t pattern_seed(std::uint64_t seed, std::size_t ratio_index, int rep) {
  return restart_seed(seed ^ (0xA5A5A5A5ULL * (ratio_index + 1)), rep);
}

ExperimentResult ratio_sweep(const SyntheticSpec& spec, const std::vector<double>& ratios, int reps,
                             const SolverConfig& cfg, const LabelConfig& labels, Method method) {
  if (reps < 1) throw ConfigError("ratio_sweep: reps must be >= 1");
  const SyntheticData data = generate_synthetic(spec);
  ExperimentResult result;
  result.method = method;
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    for (int rep = 0; rep < reps; ++rep) {
      auto [views, pattern] = apply_missing(data.views, ratios[ri], pattern_seed(spec.seed, ri, rep));
      const Evaluation ev = evaluate_method(views, data.labels, method, spec.k, cfg, labels);
      result.rows.push_back({ratios[ri], rep, ev.mean});
    }
  }
  result.aggregates = aggregate(result.rows);
  return result;
}

ScaleResult scale_sweep(const std::vector<std::size_t>& ns, int k, Index d, int iters, int repeats,
                        std::uint64_t seed) {
  if (iters < 1 || repeats < 1) throw ConfigError("scale_sweep: iters and repeats must be >= 1");
  SolverConfig cfg;
  cfg.epsilon = std::numeric_limits<double>::min();
  cfg.max_iters = iters;

  ScaleResult result;
  for (std::size_t n : ns) {
    SyntheticSpec spec;
    spec.n = n;
    spec.k = k;
    spec.dims = {d, d};
    spec.seed = seed;
    const SyntheticData data = generate_synthetic(spec);
    auto [views, pattern] = apply_missing(data.views, 0.3, seed);
    const ConsensusState first = init_first_view(views[0], k, cfg);

    ScalePoint point;
    point.n = n;
    point.seconds_per_iter = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const ConsensusState next = integrate_view(first, views[1], cfg);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      point.iters = next.last_diag.iters;
      point.seconds_per_iter = std::min(point.seconds_per_iter, elapsed.count() / next.last_diag.iters);
    }
    result.points.push_back(point);
  }

  if (result.points.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& p : result.points) {
      mx += std::log(static_cast<double>(p.n));
      my += std::log(p.seconds_per_iter);
    }
    mx /= static_cast<double>(result.points.size());
    my /= static_cast<double>(result.points.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& p : result.points) {
      const double dx = std::log(static_cast<double>(p.n)) - mx;
      sxy += dx * (std::log(p.seconds_per_iter) - my);
      sxx += dx * dx;
    }
    result.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return result;
}

}  // namespace smvc
