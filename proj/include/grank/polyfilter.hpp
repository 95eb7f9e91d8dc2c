#pragma once

#include <json.hpp>

#include <functional>
#include <vector>

namespace grank {

/// Threshold pair (c1 > c2) and tolerance delta of the rank estimation problem.
struct Thresholds {
  double c1 = 0.5;
  double c2 = 0.1;
  double delta = 0.0;

  /// Throws InvalidArgument unless 0 <= c2 < c1 <= 1 and 0 <= delta < 1.
  void validate() const;
  double midpoint() const noexcept { return 0.5 * (c1 + c2); }
};

/// Piecewise-linear step surrogate: 0 below c2, 1 above c1, linear ramp between.
double hspec(double x, const Thresholds& th) noexcept;

/// Points of the uniform grid used for every sup-error measurement on [0,1].
inline constexpr int kSupGridPoints = 10001;

/// q(x) = a_0/2 + sum_{i>=1} a_i T_i(2x - 1).  The [0,1] -> [-1,1] map is
/// internal; callers always pass x in matrix-spectrum coordinates.
class ChebyshevExpansion {
 public:
  ChebyshevExpansion() = default;
  explicit ChebyshevExpansion(std::vector<double> coeffs, double achieved_sup_error = 0.0);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double achieved_sup_error() const noexcept { return achieved_sup_error_; }

  /// Clenshaw recurrence; defined for all real x.
  double operator()(double x) const noexcept;
  /// Direct sum of a_i cos(i arccos(2x-1)); only for x in [0,1].  Test oracle.
  double eval_direct(double x) const;

 private:
  std::vector<double> coeffs_;
  double achieved_sup_error_ = 0.0;
};

/// Chebyshev-Gauss projection of f on [0,1] with `nodes` quadrature points.
ChebyshevExpansion chebyshev_project(const std::function<double(double)>& f, int degree, int nodes);

/// sup over the standard grid (plus c1, c2) of |q(x) - H(x)| on [0,1].
double ramp_sup_error(const std::function<double(double)>& q, const Thresholds& th);
/// sup over grid points of [0,c2] u [c1,1] (plus c1, c2) of |h(x) - H(x)|.
double region_sup_error(const std::function<double(double)>& h, const Thresholds& th);

/// Smallest-degree Chebyshev fit of H (d = 1, 2, ...) whose ramp_sup_error is
/// <= target_err.  Coefficients by Chebyshev-Gauss quadrature at 4(d+1) nodes.
/// Throws DegreeExhausted if no degree <= max_degree works.
ChebyshevExpansion fit_q1(const Thresholds& th, double target_err = 0.1, int max_degree = 4096);

/// Same projection at a prescribed degree; achieved_sup_error is recorded, not enforced.
ChebyshevExpansion fit_q1_at_degree(const Thresholds& th, int degree);

/// Largest booster parameter whose coefficients are computed exactly.
inline constexpr int kMaxBoosterP = 30;

/// Monomial coefficients c_0..c_{2p+1} of the normalized incomplete Beta
/// polynomial q2(x) = int_0^x t^p (1-t)^p dt / B(p+1, p+1).
std::vector<double> q2_coefficients(int p);

/// Horner evaluation of a monomial coefficient vector.
double horner(const std::vector<double>& coeffs, double x) noexcept;

/// q2 through its Bernstein form sum_{j>p} C(2p+1,j) z^j (1-z)^{2p+1-j}.  Same
/// polynomial as q2_coefficients(p), without the cancellation of the monomial
/// sum, whose coefficient mass grows like 2^{3p}.
double q2_value(int p, double z) noexcept;

/// f = q2 o q1.  Scalar evaluation uses q2_value; `q2` keeps the monomial
/// coefficients for serialization and the matrix-side schemes.
struct CompositeFilter {
  Thresholds thresholds;
  ChebyshevExpansion q1;
  int p = 0;
  std::vector<double> q2;

  double operator()(double x) const noexcept { return q2_value(p, q1(x)); }
  int total_degree() const noexcept { return q1.degree() * (2 * p + 1); }
};

CompositeFilter make_composite_filter(const Thresholds& th, int p, ChebyshevExpansion q1);
/// Convenience: fit_q1 (minimal degree) or fit_q1_at_degree when q1_degree > 0.
CompositeFilter make_composite_filter(const Thresholds& th, int p, int q1_degree = 0);

inline double eval_filter(const CompositeFilter& f, double x) noexcept { return f(x); }

/// Chebyshev series of the indicator 1(x >= (c1+c2)/2), truncated at `degree`.
/// Coefficients are the closed form (2/pi) sin(k theta)/k, theta = arccos(c1+c2-1).
/// achieved_sup_error holds the region error against H.
ChebyshevExpansion fit_highpass_baseline(const Thresholds& th, int degree);

nlohmann::json to_json(const CompositeFilter& f);
CompositeFilter composite_filter_from_json(const nlohmann::json& j);

}  // namespace grank
