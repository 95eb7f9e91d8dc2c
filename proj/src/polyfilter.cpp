#include "grank/polyfilter.hpp"

#include "grank/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace grank {

void Thresholds::validate() const {
  if (!(0.0 <= c2 && c2 < c1 && c1 <= 1.0)) {
    throw InvalidArgument("thresholds must satisfy 0 <= c2 < c1 <= 1 (got c1=" +
                          std::to_string(c1) + ", c2=" + std::to_string(c2) + ")");
  }
  if (!(0.0 <= delta && delta < 1.0)) throw InvalidArgument("delta must lie in [0,1)");
}

double hspec(double x, const Thresholds& th) noexcept {
  if (x > th.c1) return 1.0;
  if (x < th.c2) return 0.0;
  return (x - th.c2) / (th.c1 - th.c2);
}

ChebyshevExpansion::ChebyshevExpansion(std::vector<double> coeffs, double achieved_sup_error)
    : coeffs_(std::move(coeffs)), achieved_sup_error_(achieved_sup_error) {
  if (coeffs_.empty()) throw InvalidArgument("Chebyshev expansion needs at least a_0");
}

double ChebyshevExpansion::operator()(double x) const noexcept {
  const double s = 2.0 * x - 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) {
    const double b0 = 2.0 * s * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = b0;
  }
  // b_0 = 2 s b_1 - b_2 + a_0 and q = (b_0 - b_2) / 2.
  return s * b1 - b2 + 0.5 * coeffs_[0];
}

double ChebyshevExpansion::eval_direct(double x) const {
  if (x < 0.0 || x > 1.0) throw OutOfRange("eval_direct needs x in [0,1]");
  const double theta = std::acos(std::clamp(2.0 * x - 1.0, -1.0, 1.0));
  double sum = 0.5 * coeffs_[0];
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    sum += coeffs_[i] * std::cos(static_cast<double>(i) * theta);
  }
  return sum;
}

ChebyshevExpansion chebyshev_project(const std::function<double(double)>& f, int degree,
                                     int nodes) {
  if (degree < 0 || nodes < degree + 1) {
    throw InvalidArgument("chebyshev_project needs degree >= 0 and nodes > degree");
  }
  std::vector<double> fx(nodes);
  std::vector<double> theta(nodes);
  for (int k = 0; k < nodes; ++k) {
    theta[k] = std::numbers::pi * (k + 0.5) / nodes;
    fx[k] = f(0.5 * (std::cos(theta[k]) + 1.0));
  }
  std::vector<double> a(degree + 1);
  for (int i = 0; i <= degree; ++i) {
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) acc += fx[k] * std::cos(i * theta[k]);
    a[i] = 2.0 * acc / nodes;
  }
  return ChebyshevExpansion(std::move(a));
}

namespace {

double grid_point(int k) { return static_cast<double>(k) / (kSupGridPoints - 1); }

}  // namespace

double ramp_sup_error(const std::function<double(double)>& q, const Thresholds& th) {
  double err = std::max(std::abs(q(th.c1) - hspec(th.c1, th)), std::abs(q(th.c2) - hspec(th.c2, th)));
  for (int k = 0; k < kSupGridPoints; ++k) {
    const double x = grid_point(k);
    err = std::max(err, std::abs(q(x) - hspec(x, th)));
  }
  return err;
}

double region_sup_error(const std::function<double(double)>& h, const Thresholds& th) {
  double err = std::max(std::abs(h(th.c1) - 1.0), std::abs(h(th.c2)));
  for (int k = 0; k < kSupGridPoints; ++k) {
    const double x = grid_point(k);
    if (x <= th.c2 || x >= th.c1) err = std::max(err, std::abs(h(x) - hspec(x, th)));
  }
  return err;
}

ChebyshevExpansion fit_q1_at_degree(const Thresholds& th, int degree) {
  th.validate();
  if (degree < 1) throw InvalidArgument("q1 degree must be >= 1");
  auto raw = chebyshev_project([&th](double x) { return hspec(x, th); }, degree, 4 * (degree + 1));
  const double err = ramp_sup_error(raw, th);
  return ChebyshevExpansion(raw.coeffs(), err);
}

ChebyshevExpansion fit_q1(const Thresholds& th, double target_err, int max_degree) {
  th.validate();
  if (!(target_err > 0.0 && target_err < 0.5)) throw InvalidArgument("target_err must lie in (0, 0.5)");
  if (max_degree < 1) throw InvalidArgument("max_degree must be >= 1");
  double best = INFINITY;
  for (int d = 1; d <= max_degree; ++d) {
    auto q = fit_q1_at_degree(th, d);
    if (q.achieved_sup_error() <= target_err) return q;
    best = std::min(best, q.achieved_sup_error());
  }
  throw DegreeExhausted("no Chebyshev fit of degree <= " + std::to_string(max_degree) +
                        " reaches sup error " + std::to_string(target_err) + " (best " +
                        std::to_string(best) + ")");
}

std::vector<double> q2_coefficients(int p) {
  if (p < 0 || p > kMaxBoosterP) {
    throw OutOfRange("booster parameter p must lie in [0, " + std::to_string(kMaxBoosterP) + "]");
  }
  using i128 = __int128;
  auto binom = [](int n, int k) {
    i128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  // 1 / B(p+1, p+1) = (2p+1)! / (p!)^2 = (2p+1) * C(2p, p).
  const i128 inv_beta = static_cast<i128>(2 * p + 1) * binom(2 * p, p);
  std::vector<double> c(2 * p + 2, 0.0);
  for (int k = 0; k <= p; ++k) {
    const i128 num = binom(p, k) * inv_beta;
    const i128 den = p + k + 1;
    const long double value = static_cast<long double>(num / den) +
                              static_cast<long double>(num % den) / static_cast<long double>(den);
    c[p + k + 1] = static_cast<double>((k % 2 == 0) ? value : -value);
  }
  return c;
}

double horner(const std::vector<double>& coeffs, double x) noexcept {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

double q2_value(int p, double z) noexcept {
  const int n = 2 * p + 1;
  const double w = 1.0 - z;
  double binom = 1.0;  // C(n, j)
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    if (j > p) sum += binom * std::pow(z, j) * std::pow(w, n - j);
    binom = binom * (n - j) / (j + 1);
  }
  return sum;
}

CompositeFilter make_composite_filter(const Thresholds& th, int p, ChebyshevExpansion q1) {
  th.validate();
  return CompositeFilter{th, std::move(q1), p, q2_coefficients(p)};
}

CompositeFilter make_composite_filter(const Thresholds& th, int p, int q1_degree) {
  return make_composite_filter(th, p, q1_degree > 0 ? fit_q1_at_degree(th, q1_degree) : fit_q1(th));
}

ChebyshevExpansion fit_highpass_baseline(const Thresholds& th, int degree) {
  th.validate();
  if (degree < 1) throw InvalidArgument("baseline degree must be >= 1");
  const double theta = std::acos(2.0 * th.midpoint() - 1.0);
  std::vector<double> a(degree + 1);
  a[0] = 2.0 * theta / std::numbers::pi;
  for (int k = 1; k <= degree; ++k) a[k] = 2.0 * std::sin(k * theta) / (std::numbers::pi * k);
  ChebyshevExpansion raw(a);
  return ChebyshevExpansion(std::move(a), region_sup_error(raw, th));
}

nlohmann::json to_json(const CompositeFilter& f) {
  return nlohmann::json{{"c1", f.thresholds.c1},
                        {"c2", f.thresholds.c2},
                        {"p", f.p},
                        {"q1_degree", f.q1.degree()},
                        {"q1_coeffs", f.q1.coeffs()},
                        {"q2_coeffs", f.q2},
                        {"achieved_sup_error", f.q1.achieved_sup_error()}};
}

CompositeFilter composite_filter_from_json(const nlohmann::json& j) {
  Thresholds th{j.at("c1").get<double>(), j.at("c2").get<double>()};
  th.validate();
  auto q1c = j.at("q1_coeffs").get<std::vector<double>>();
  if (static_cast<int>(q1c.size()) != j.at("q1_degree").get<int>() + 1) {
    throw InvalidArgument("filter JSON: q1_degree does not match q1_coeffs length");
  }
  const int p = j.at("p").get<int>();
  auto q2 = j.at("q2_coeffs").get<std::vector<double>>();
  if (static_cast<int>(q2.size()) != 2 * p + 2) {
    throw InvalidArgument("filter JSON: q2_coeffs must have 2p+2 entries");
  }
  return CompositeFilter{th, ChebyshevExpansion(std::move(q1c), j.at("achieved_sup_error").get<double>()),
                         p, std::move(q2)};
}

}  // namespace grank
