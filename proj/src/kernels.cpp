#include "grank/kernels.hpp"

#include "grank/error.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace grank::kernels {

namespace {

void check_shapes(const Eigen::MatrixXd& a, Eigen::Index x_rows) {
  if (a.rows() != a.cols() || a.cols() != x_rows) {
    throw DimensionMismatch("kernel operand shapes do not match");
  }
}

// Column-major storage: A(:,i) is contiguous and equals row i by symmetry.
inline double row_dot(const Eigen::MatrixXd& a, Eigen::Index i, const double* x) {
  const double* col = a.data() + i * a.rows();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < a.rows(); ++j) acc += col[j] * x[j];
  return acc;
}

}  // namespace

void sym_matvec_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  check_shapes(a, x.size());
  y.resize(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) y(i) = row_dot(a, i, x.data());
}

void sym_matvec_parallel(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  check_shapes(a, x.size());
  y.resize(a.rows());
  const Eigen::Index n = a.rows();
  const double* xp = x.data();
#pragma omp parallel for schedule(static) if (n >= 256)
  for (Eigen::Index i = 0; i < n; ++i) y(i) = row_dot(a, i, xp);
}

void sym_matmat_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
  check_shapes(a, x.rows());
  y.resize(a.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double* xp = x.data() + c * x.rows();
    for (Eigen::Index i = 0; i < a.rows(); ++i) y(i, c) = row_dot(a, i, xp);
  }
}

void sym_matmat_parallel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
  check_shapes(a, x.rows());
  const Eigen::Index n = a.rows();
  y.resize(n, x.cols());
  const Eigen::Index tiles = (n + kRowTile - 1) / kRowTile;
#pragma omp parallel for schedule(static) if (tiles > 1)
  for (Eigen::Index t = 0; t < tiles; ++t) {
    const Eigen::Index r0 = t * kRowTile;
    const Eigen::Index rows = std::min(kRowTile, n - r0);
    // A(r0:r0+rows, :) == A(:, r0:r0+rows)^T; the column panel is contiguous.
    y.middleRows(r0, rows).noalias() = a.middleCols(r0, rows).transpose() * x;
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace grank::kernels
