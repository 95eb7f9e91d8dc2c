#pragma once

// Independent reference computations for tests.  Nothing here calls the
// library routine it is used to check.

#include "grank/sym_matrix.hpp"

#include <functional>
#include <vector>

namespace grank::oracle {

struct JacobiResult {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // matching columns
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal mass is below tol.
JacobiResult jacobi_eigh(const Matrix& a, double tol = 1e-14, int max_sweeps = 100);

/// y_i = sum_j A(i,j) v_j with j ascending.
Vector naive_matvec(const Matrix& a, const Vector& v);

/// V f(Lambda) V^T x using the Jacobi decomposition.
Vector spectral_apply(const Matrix& a, const std::function<double(double)>& f, const Vector& x);

/// Chebyshev sum a_0/2 + sum a_i T_i(2x-1) with T_i from the three-term recurrence.
double cheb_recurrence(const std::vector<double>& a, double x);

/// Composite Gauss-Legendre (5 points per panel) integral of f over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi, int panels = 2000);

/// q2(x) by quadrature of t^p (1-t)^p, normalized by the same integral over [0,1].
double q2_quadrature(int p, double x);

}  // namespace grank::oracle
