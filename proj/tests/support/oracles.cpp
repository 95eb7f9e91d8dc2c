#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grank::oracle {

JacobiResult jacobi_eigh(const Matrix& input, double tol, int max_sweeps) {
  const Eigen::Index n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::Identity(n, n);
  JacobiResult res;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    res.sweeps = sweep;
    if (std::sqrt(off) < tol) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&a](auto x, auto y) { return a(x, x) > a(y, y); });
  res.eigenvalues.resize(n);
  res.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    res.eigenvalues(k) = a(order[k], order[k]);
    res.eigenvectors.col(k) = v.col(order[k]);
  }
  return res;
}

Vector naive_matvec(const Matrix& a, const Vector& v) {
  Vector y(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += a(i, j) * v(j);
    y(i) = acc;
  }
  return y;
}

Vector spectral_apply(const Matrix& a, const std::function<double(double)>& f, const Vector& x) {
  const JacobiResult ed = jacobi_eigh(a);
  Vector coeff = ed.eigenvectors.transpose() * x;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) *= f(ed.eigenvalues(i));
  return ed.eigenvectors * coeff;
}

double cheb_recurrence(const std::vector<double>& a, double x) {
  const double s = 2.0 * x - 1.0;
  double t_prev = 1.0, t_cur = s;
  double sum = 0.5 * a[0];
  if (a.size() > 1) sum += a[1] * s;
  for (std::size_t i = 2; i < a.size(); ++i) {
    const double t_next = 2.0 * s * t_cur - t_prev;
    sum += a[i] * t_next;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return sum;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, int panels) {
  static const double nodes[] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
  static const double weights[] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (int i = 0; i < 5; ++i) total += weights[i] * f(mid + 0.5 * h * nodes[i]);
  }
  return 0.5 * h * total;
}

double q2_quadrature(int p, double x) {
  auto kernel = [p](double t) { return std::pow(t, p) * std::pow(1.0 - t, p); };
  return integrate(kernel, 0.0, x, 400) / integrate(kernel, 0.0, 1.0, 400);
}

}  // namespace grank::oracle
