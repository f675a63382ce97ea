#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>

namespace smvc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thin singular value decomposition m = u * diag(sigma) * vt with r = min(rows, cols).
///
/// Singular values are non-increasing. Each column of u is oriented so that its
/// largest-magnitude entry is positive (first such entry on ties), with the
/// matching row of vt flipped alongside, which makes the factors reproducible.
struct ThinSvd {
  Matrix u;      // rows x r
  Vector sigma;  // r
  Matrix vt;     // r x cols
};

ThinSvd thin_svd(const Matrix& m);

/// Maximizer of Tr(Q^T g) over column-orthonormal Q for a p x q matrix g with p >= q.
/// The optimum is Q = u * vt and the achieved trace is the sum of singular values.
Matrix solve_trace_max(const Matrix& g);

/// Throws ValidationError if `m` is empty or contains NaN/Inf.
void require_finite(const Matrix& m, std::string_view what);

/// ||q^T q - I||_F.
double column_orthonormality_error(const Matrix& q);

/// ||q q^T - I||_F.
double row_orthonormality_error(const Matrix& q);

/// Columns of `m` selected by `cols`, in that order.
Matrix gather_columns(const Matrix& m, std::span<const Index> cols);

/// dst.row(rows[i]) += src.row(i) for every i.
void scatter_add_rows(Matrix& dst, std::span<const Index> rows, const Matrix& src);

}  // namespace smvc
