#include "streammvc/numeric.hpp"

#include "streammvc/error.hpp"

#include <cmath>
#include <string>

namespace smvc {

void require_finite(const Matrix& m, std::string_view what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ValidationError(std::string(what) + ": matrix must have at least one row and one column");
  }
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + ": matrix contains non-finite entries");
  }
}

ThinSvd thin_svd(const Matrix& m) {
  require_finite(m, "thin_svd");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
  if (!out.u.allFinite() || !out.vt.allFinite() || !out.sigma.allFinite()) {
    throw NumericalError("thin_svd: factorization did not converge to finite factors");
  }

  for (Index j = 0; j < out.u.cols(); ++j) {
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < out.u.rows(); ++i) {
      const double mag = std::abs(out.u(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (out.u(pivot, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.vt.row(j) = -out.vt.row(j);
    }
  }
  return out;
}

Matrix solve_trace_max(const Matrix& g) {
  if (g.rows() < g.cols()) {
    throw ValidationError("solve_trace_max: expected rows >= cols, got " + std::to_string(g.rows()) +
                          "x" + std::to_string(g.cols()));
  }
  const ThinSvd svd = thin_svd(g);
  return svd.u * svd.vt;
}

double column_orthonormality_error(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

double row_orthonormality_error(const Matrix& q) {
  return (q * q.transpose() - Matrix::Identity(q.rows(), q.rows())).norm();
}

Matrix gather_columns(const Matrix& m, std::span<const Index> cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = m.col(cols[c]);
  return out;
}

void scatter_add_rows(Matrix& dst, std::span<const Index> rows, const Matrix& src) {
  for (std::size_t r = 0; r < rows.size(); ++r) dst.row(rows[r]) += src.row(static_cast<Index>(r));
}

}  // namespace smvc
