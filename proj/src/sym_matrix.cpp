#include "grank/sym_matrix.hpp"

#include "grank/error.hpp"
#include "grank/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace grank {

SymMatrix::SymMatrix(Matrix dense, double asym_tol) {
  if (dense.rows() < 1 || dense.rows() != dense.cols()) {
    throw DimensionMismatch("SymMatrix requires a non-empty square matrix, got " +
                            std::to_string(dense.rows()) + "x" + std::to_string(dense.cols()));
  }
  const Eigen::Index n = dense.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double a = dense(i, j);
      const double b = dense(j, i);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidArgument("SymMatrix entries must be finite");
      }
      if (std::abs(a - b) > asym_tol * std::max(1.0, std::max(std::abs(a), std::abs(b)))) {
        throw InvalidArgument("matrix is not symmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      const double avg = 0.5 * (a + b);
      dense(i, j) = avg;
      dense(j, i) = avg;
    }
    if (!std::isfinite(dense(j, j))) throw InvalidArgument("SymMatrix entries must be finite");
  }
  m_ = std::move(dense);
}

SymMatrix SymMatrix::zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

SymMatrix SymMatrix::scaled(double s) const { return SymMatrix(Matrix(m_ * s), Trusted{}); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  if (a.n() != b.n()) throw DimensionMismatch("SymMatrix sum of different dimensions");
  return SymMatrix(Matrix(a.m_ + b.m_), SymMatrix::Trusted{});
}

Matrix EigenDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

namespace {

// Eigen's tridiagonal QR gives up after this many sweeps per eigenvalue.
constexpr std::size_t kEigenMaxIterationsPerValue = 30;

}  // namespace

EigenDecomposition eigh(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.dense(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw SolverFailure("symmetric eigensolver did not converge",
                        kEigenMaxIterationsPerValue * static_cast<std::size_t>(a.n()));
  }
  // Eigen returns ascending order.
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

Vector eigenvalues_desc(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw SolverFailure("symmetric eigensolver did not converge",
                        kEigenMaxIterationsPerValue * static_cast<std::size_t>(a.n()));
  }
  return solver.eigenvalues().reverse();
}

int generalized_rank(const Vector& eigenvalues, double c) {
  if (c < 0) throw InvalidArgument("generalized rank threshold must be >= 0");
  const double cut = (c == 0.0) ? kRankZeroTolerance : c;
  return static_cast<int>(std::count_if(eigenvalues.begin(), eigenvalues.end(),
                                        [cut](double s) { return s > cut; }));
}

int generalized_rank(const SymMatrix& a, double c) {
  return generalized_rank(eigenvalues_desc(a), c);
}

Vector matvec(const SymMatrix& a, const Vector& v) {
  if (v.size() != a.n()) {
    throw DimensionMismatch("matvec: vector length " + std::to_string(v.size()) +
                            " != matrix dimension " + std::to_string(a.n()));
  }
  Vector y(a.n());
  kernels::sym_matvec_parallel(a.dense(), v, y);
  return y;
}

Matrix psd_sqrt_factor(const SymMatrix& a, int rank_cap, double tol) {
  if (rank_cap < 0) throw InvalidArgument("rank_cap must be non-negative");
  const EigenDecomposition ed = eigh(a);
  const Eigen::Index n = a.n();
  if (ed.eigenvalues(n - 1) < -tol) {
    throw NotPsd("smallest eigenvalue " + std::to_string(ed.eigenvalues(n - 1)) +
                 " is below -" + std::to_string(tol));
  }
  const int k = generalized_rank(ed.eigenvalues, tol);
  if (k > rank_cap) {
    throw RankCapExceeded(std::to_string(k) + " eigenvalues exceed " + std::to_string(tol) +
                          " but rank_cap is " + std::to_string(rank_cap));
  }
  Matrix b(n, k);
  for (int i = 0; i < k; ++i) {
    b.col(i) = ed.eigenvectors.col(i) * std::sqrt(ed.eigenvalues(i));
  }
  return b;
}

double spectral_norm_estimate(const SymMatrix& a, int iterations) {
  const Eigen::Index n = a.n();
  // Non-symmetric start so it is not orthogonal to structured eigenvectors.
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  x.normalize();
  double estimate = 0.0;
  Vector y(n);
  for (int it = 0; it < iterations; ++it) {
    kernels::sym_matvec_parallel(a.dense(), x, y);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    estimate = x.dot(y);
    x = y / norm;
  }
  // Rayleigh quotient of the last iterate; for PSD input this is a lower bound on ||A||_2.
  kernels::sym_matvec_parallel(a.dense(), x, y);
  return std::max(estimate, x.dot(y));
}

}  // namespace grank
