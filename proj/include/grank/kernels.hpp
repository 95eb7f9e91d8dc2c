#pragma once

// Dense products used by every protocol round.  Each kernel has a serial
// reference and an OpenMP version.  The parallel versions split work over
// fixed-size output tiles, so the floating-point result does not depend on
// the thread count.

#include <Eigen/Dense>

namespace grank::kernels {

/// y = A x for symmetric A, naive j = 0..n-1 summation per output entry.
void sym_matvec_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void sym_matvec_parallel(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);

/// Y = A X for symmetric A.  The serial reference applies sym_matvec_serial
/// column by column; the parallel version runs blocked GEMM on row tiles.
void sym_matmat_serial(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x, Eigen::MatrixXd& y);
void sym_matmat_parallel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x, Eigen::MatrixXd& y);

/// Row tile height of sym_matmat_parallel.
inline constexpr Eigen::Index kRowTile = 128;

/// Threads available to the parallel kernels (1 when built without OpenMP).
int max_threads();

}  // namespace grank::kernels
