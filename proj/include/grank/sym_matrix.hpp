#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace grank {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense real symmetric n x n matrix.  Symmetry is exact: the constructor
/// rejects inputs whose asymmetry exceeds `asym_tol` (relative to the entry
/// magnitude) and then averages the two triangles, so `(i,j)` and `(j,i)`
/// always hold the same double.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix dense, double asym_tol = 1e-12);

  static SymMatrix zero(Eigen::Index n);
  static SymMatrix identity(Eigen::Index n);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index n() const noexcept { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Matrix& dense() const noexcept { return m_; }

  SymMatrix scaled(double s) const;
  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);

 private:
  struct Trusted {};
  SymMatrix(Matrix dense, Trusted) : m_(std::move(dense)) {}
  Matrix m_;
};

/// Eigenvalues sorted non-increasing, eigenvectors as matching columns.
struct EigenDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

/// Full dense spectral decomposition (Householder tridiagonalization + implicit QR).
/// Throws SolverFailure if the QR iteration does not converge.
EigenDecomposition eigh(const SymMatrix& a);

/// Eigenvalues only, sorted non-increasing.
Vector eigenvalues_desc(const SymMatrix& a);

/// Absolute eigenvalue tolerance applied when counting the ordinary rank (c == 0).
inline constexpr double kRankZeroTolerance = 1e-10;

/// Number of eigenvalues strictly greater than `c`.
int generalized_rank(const SymMatrix& a, double c);
int generalized_rank(const Vector& eigenvalues, double c);

/// Dense product A v.  The summation order per output entry is the naive
/// j = 0..n-1 loop, so results are bitwise reproducible.
Vector matvec(const SymMatrix& a, const Vector& v);

/// Default eigenvalue cut for psd_sqrt_factor.
inline constexpr double kFactorTolerance = 1e-10;

/// Returns B (n x k, k <= rank_cap) with B B^T ~= A, columns u_i * sqrt(sigma_i)
/// for every eigenvalue sigma_i > tol.
/// Throws NotPsd if the smallest eigenvalue is below -tol and RankCapExceeded
/// if more than rank_cap eigenvalues exceed tol.
Matrix psd_sqrt_factor(const SymMatrix& a, int rank_cap, double tol = kFactorTolerance);

/// Power-iteration estimate of ||A||_2 for a PSD matrix.  Deterministic start vector.
double spectral_norm_estimate(const SymMatrix& a, int iterations = 50);

}  // namespace grank
