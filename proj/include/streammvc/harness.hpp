#pragma once

#include "streammvc/metrics.hpp"
#include "streammvc/partition.hpp"
#include "streammvc/registry.hpp"
#include "streammvc/solver.hpp"

#include <cstdint>
#include <vector>

namespace smvc {

/// Gaussian mixture observed through several views. Every view draws its own
/// cluster centers; a sample keeps the same cluster label in every view.
struct SyntheticSpec {
  std::size_t n = 0;
  int k = 0;
  std::vector<Index> dims;  // one entry per view
  double separation = 10.0;  // min center distance in units of the within-cluster std
  double sigma = 1.0;        // within-cluster std
  std::uint64_t seed = 0;

  void validate() const;
};

/// Ground truth keyed by sample id.
struct LabeledSamples {
  std::vector<SampleId> ids;
  Partition truth;  // aligned with ids

  /// Truth labels reordered to `ids` (throws ValidationError on an unknown id).
  Partition aligned_to(const std::vector<SampleId>& order) const;
};

struct SyntheticData {
  std::vector<ViewBatch> views;  // complete views, columns in id order
  LabeledSamples labels;
};

/// Throws ConfigError if well-separated centers cannot be drawn within 1000 attempts.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

struct MissingPattern {
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::vector<SampleId>> retained;  // per view, in column order
  std::vector<std::vector<SampleId>> dropped;   // per view, in column order
};

/// Removes floor(n*r) samples from every view but the last at random, then the
/// same number from the last view, drawn only among samples that an earlier
/// view still observes. Every sample stays in at least one view.
std::pair<std::vector<ViewBatch>, MissingPattern> apply_missing(const std::vector<ViewBatch>& views,
                                                                double ratio, std::uint64_t seed);

enum class FillMode { zero, average };

/// Completes every view over the union of ids (first-appearance order) by
/// inserting zero columns or the view's per-feature mean for missing samples.
std::vector<ViewBatch> fill_views(const std::vector<ViewBatch>& views, FillMode mode);

/// FCMVC on filled views (complete path), labeled by final_labels.
ConsensusState run_fill_stream(const std::vector<ViewBatch>& views, FillMode mode, int k,
                               const SolverConfig& cfg);
Partition run_fill_baseline(const std::vector<ViewBatch>& views, FillMode mode, int k,
                            const SolverConfig& cfg, const LabelConfig& labels = {});

enum class Method { incomplete, zero_fill, average_fill };

const char* method_name(Method m);

/// Metrics of one stream, following the k-means restart protocol.
struct Evaluation {
  MetricReport mean;  // averaged over restarts
  MetricReport std;   // population std over restarts
  MetricReport best;  // restart with the lowest inertia
  ConsensusState state;
};

Evaluation evaluate_state(ConsensusState state, const LabeledSamples& truth, const LabelConfig& labels);

Evaluation evaluate_method(const std::vector<ViewBatch>& views, const LabeledSamples& truth,
                           Method method, int k, const SolverConfig& cfg, const LabelConfig& labels);

struct OrderRun {
  std::vector<std::size_t> order;  // indices into the input views
  MetricReport report;
};

/// Runs the stream under `permutations` distinct random view orders. For every
/// order a fresh missing pattern (ratio, seed) is applied to the reordered views
/// so the last-view constraint binds the final arriving view.
std::vector<OrderRun> order_sweep(const std::vector<ViewBatch>& complete_views,
                                  const LabeledSamples& truth, double ratio, int k,
                                  const SolverConfig& cfg, const LabelConfig& labels,
                                  std::size_t permutations, std::uint64_t seed);

struct SweepRow {
  double ratio = 0.0;
  int rep = 0;
  MetricReport report;
};

struct SweepAggregate {
  double ratio = 0.0;
  MetricReport mean;
  MetricReport std;  // sample std (n-1); 0 for a single repetition
};

struct ExperimentResult {
  Method method = Method::incomplete;
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
};

/// Per-column mean and sample std of the rows at each ratio.
std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows);

/// Seed of the missing pattern for (ratio index, repetition).
std::uint64_t pattern_seed(std::uint64_t seed, std::size_t ratio_index, int rep);

/// For each ratio and repetition: fresh missing pattern on the data generated from `spec`, full
/// stream, metrics. Patterns depend only on (spec.seed, ratio index, rep), so
/// runs with different methods see identical patterns.
ExperimentResult ratio_sweep(const SyntheticSpec& spec, const std::vector<double>& ratios, int reps,
                             const SolverConfig& cfg, const LabelConfig& labels,
                             Method method = Method::incomplete);

struct ScalePoint {
  std::size_t n = 0;
  int iters = 0;
  double seconds_per_iter = 0.0;
};

struct ScaleResult {
  std::vector<ScalePoint> points;
  double slope = 0.0;  // least-squares slope of log(time) against log(n)
};

/// Times integrate_view on a second view (missing ratio 0.3) for each n, with
/// `iters` inner iterations. Each n is timed `repeats` times; the fastest counts.
ScaleResult scale_sweep(const std::vector<std::size_t>& ns, int k, Index d, int iters, int repeats,
                        std::uint64_t seed);

}  // namespace smvc
