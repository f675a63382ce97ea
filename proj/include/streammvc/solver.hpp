#pragma once

#include "streammvc/kmeans.hpp"
#include "streammvc/numeric.hpp"
#include "streammvc/partition.hpp"
#include "streammvc/registry.hpp"

#include <cstdint>
#include <vector>

namespace smvc {

enum class InitMethod { svd, random };

struct SolverConfig {
  double epsilon = 1e-6;  // relative objective change that stops the inner loop
  int max_iters = 100;
  std::uint64_t seed = 0;  // only used by InitMethod::random
  InitMethod init = InitMethod::svd;
  // Reference path: form every M1/M2 product with explicit dense matrices.
  bool dense_indicators = false;
  // From the second inner iteration on, keep the current Z columns of samples the
  // view does not observe in the Z coefficient matrix. Guarantees monotone descent
  // on incomplete views; has no effect when M1 = I.
  bool majorize_absent = true;

  void validate() const;
};

struct SolveDiagnostics {
  std::vector<double> objective_trace;  // one value per inner iteration
  int iters = 0;
  bool converged = false;
  double lower_bound = 0.0;
  // Largest orthonormality residual seen after any subproblem update.
  double max_z_error = 0.0;
  double max_w_error = 0.0;
  double max_h_error = 0.0;
};

/// The only state carried between views: Z (k x n_a, ZZ^T = I_k) and the ids of its columns.
struct ConsensusState {
  Matrix z;
  SampleRegistry registry;
  int k = 0;
  std::size_t views_seen = 0;
  SolveDiagnostics last_diag;

  void validate() const;
};

/// Z^1 from the first view: top-k right singular vectors of the raw data
/// (or a random orthonormal matrix with InitMethod::random).
ConsensusState init_first_view(const ViewBatch& batch, int k, const SolverConfig& cfg = {});

/// d x k base matrix with I_k in its first k rows and zeros elsewhere.
Matrix init_h(Index d, Index k);

// Coefficient matrices of the three trace-maximization subproblems.
//   A = M1 X^T H + M2 Z_prev^T W^T             (n_a x k)
//   B = Z M2 Z_prev^T                           (k x k)
//   C = X M1^T Z^T                              (d x k)
// The overload taking `z_current` adds (I - M1 M1^T) Z_current^T to A.
Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const IndicatorPair& ind);
Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const IndicatorPair& ind, const Matrix& z_current);
Matrix w_coefficients(const Matrix& z, const Matrix& z_prev, const IndicatorPair& ind);
Matrix h_coefficients(const Matrix& x, const Matrix& z, const IndicatorPair& ind);

/// argmax Tr(Z A) subject to Z Z^T = I_k.
Matrix update_z(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                const IndicatorPair& ind);
Matrix update_z(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                const IndicatorPair& ind, const Matrix& z_current);
/// argmax Tr(W^T B) subject to W^T W = I_k.
Matrix update_w(const Matrix& z, const Matrix& z_prev, const IndicatorPair& ind);
/// argmax Tr(H^T C) subject to H^T H = I_k.
Matrix update_h(const Matrix& x, const Matrix& z, const IndicatorPair& ind);

/// 1/2 ||X - H Z M1||_F^2 - Tr((Z M2)^T W Z_prev).
double objective(const Matrix& x, const Matrix& h, const Matrix& z, const Matrix& w,
                 const Matrix& z_prev, const IndicatorPair& ind);

/// -sqrt(n_prev) * k^{3/2}.
double lower_bound(std::size_t n_prev, int k);

/// Dense-matrix forms of the same quantities, for verifying the gather/scatter path.
namespace dense {
Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const Matrix& m1, const Matrix& m2);
Matrix z_coefficients(const Matrix& x, const Matrix& h, const Matrix& w, const Matrix& z_prev,
                      const Matrix& m1, const Matrix& m2, const Matrix& z_current);
Matrix w_coefficients(const Matrix& z, const Matrix& z_prev, const Matrix& m2);
Matrix h_coefficients(const Matrix& x, const Matrix& z, const Matrix& m1);
double objective(const Matrix& x, const Matrix& h, const Matrix& z, const Matrix& w,
                 const Matrix& z_prev, const Matrix& m1, const Matrix& m2);
}  // namespace dense

/// Folds one more view into the consensus. Alternates Z -> W -> H until the
/// relative objective change drops below cfg.epsilon or cfg.max_iters is hit.
/// `state` is not modified.
ConsensusState integrate_view(const ConsensusState& state, const ViewBatch& batch,
                              const SolverConfig& cfg = {});

/// init_first_view on views[0], then integrate_view on the rest in order.
/// View indices are reassigned to the stream position.
ConsensusState run_stream(std::vector<ViewBatch> views, int k, const SolverConfig& cfg = {});

struct LabelConfig {
  int k = 0;  // 0: the state's k
  int restarts = 50;
  std::uint64_t seed = 0;
  bool normalize = true;  // unit-length Z columns before k-means
};

/// Seed of k-means restart `r`.
std::uint64_t restart_seed(std::uint64_t seed, int r);

/// One k-means run per restart on the columns of Z.
std::vector<KMeansResult> label_restarts(const ConsensusState& state, const LabelConfig& cfg);

/// The restart with the lowest within-cluster sum of squares.
Partition final_labels(const ConsensusState& state, const LabelConfig& cfg);
Partition final_labels(const ConsensusState& state, int k, int restarts, std::uint64_t seed);

}  // namespace smvc
