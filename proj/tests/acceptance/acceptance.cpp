// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [--report] [criterion numbers...]   (default: all)
// --report exits 0 once every selected criterion has produced a verdict.

#include "grank/datagen.hpp"
#include "grank/experiment.hpp"
#include "grank/protocols.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace grank;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

const Thresholds kTh{0.5, 0.1};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> unit_grid(int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
  return g;
}

Outcome lemma1_certificate() {
  Outcome out{true, ""};
  double worst_ratio = 0.0;
  double lo = 1.0, hi = 0.0;
  std::string out_of_range;
  const std::vector<double> grid = unit_grid(kSupGridPoints);
  for (int p = 1; p <= 12; ++p) {
    const CompositeFilter f = make_composite_filter(kTh, p);
    double err = 0.0;
    bool in_range = true;
    for (double x : grid) {
      const double v = f(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (v < -1e-12 || v > 1.0 + 1e-12) in_range = false;
      if (x <= kTh.c2 || x >= kTh.c1) err = std::max(err, std::abs(v - hspec(x, kTh)));
    }
    err = std::max({err, std::abs(f(kTh.c1) - 1.0), std::abs(f(kTh.c2))});
    const double bound = std::ldexp(1.0, -p);
    worst_ratio = std::max(worst_ratio, err / bound);
    if (err > bound) out.pass = false;
    if (!in_range) out_of_range += (out_of_range.empty() ? "" : ",") + std::to_string(p);
  }
  if (lo < -1e-12 || hi > 1.0 + 1e-12) out.pass = false;
  out.detail = "max err/2^-p = " + fmt("%.3f", worst_ratio) + ", f range [" + fmt("%.3g", lo) + ", " +
               fmt("%.15g", hi) + "]" + (out_of_range.empty() ? "" : ", outside [0,1] for p=" + out_of_range);
  return out;
}

Outcome q2_properties() {
  Outcome out{true, ""};
  double worst_sym = 0.0, worst_mass_ratio = 0.0;
  for (int p = 0; p <= 12; ++p) {
    const std::vector<double> c = q2_coefficients(p);
    const double eps = std::ldexp(1.0, -p);
    if (std::abs(horner(c, 0.0)) > 1e-9 || std::abs(horner(c, 1.0) - 1.0) > 1e-9) out.pass = false;
    if (std::abs(q2_value(p, 0.0)) > 1e-9 || std::abs(q2_value(p, 1.0) - 1.0) > 1e-9) out.pass = false;
    for (int i = 0; i < 1000; ++i) {
      const double z = i / 999.0;
      const double sym = std::abs(q2_value(p, z) + q2_value(p, 1.0 - z) - 1.0);
      worst_sym = std::max(worst_sym, sym);
      if (sym > 1e-9) out.pass = false;
      if (q2_value(p, -0.1 + 0.2 * z) > eps) out.pass = false;
      if (q2_value(p, 0.9 + 0.2 * z) < 1.0 - eps) out.pass = false;
    }
    double mass = 0.0;
    for (double v : c) mass += std::abs(v);
    worst_mass_ratio = std::max(worst_mass_ratio, mass / std::ldexp(1.0, 3 * p));
    if (mass > std::ldexp(1.0, 3 * p)) out.pass = false;
  }
  out.detail = "max symmetry defect " + fmt("%.2e", worst_sym) + ", max mass/2^3p " + fmt("%.3f", worst_mass_ratio);
  return out;
}

Outcome oracle_equivalence() {
  Outcome out{true, ""};
  CounterStream rng(3003);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.next_u64() % 61);  // 4..64
    const int m = 1 + static_cast<int>(rng.next_u64() % 4);
    const int degree = static_cast<int>(rng.next_u64() % 11);                   // 0..10
    Vector ev(n);
    for (Eigen::Index i = 0; i < n; ++i) ev(i) = rng.uniform();
    auto shards = datagen::planted_spectrum_shards(n, m, ev, 7000 + inst,
                                                   inst % 2 ? datagen::SplitMode::random : datagen::SplitMode::even);
    const Matrix a = datagen::sum_shards(shards).dense();
    Cluster cluster(std::move(shards));
    std::vector<double> coeffs(degree + 1);
    for (double& c : coeffs) c = rng.gaussian();
    const ChebyshevExpansion q(coeffs);
    const Vector v = rng.gaussian_vector(n);
    Blackboard board(m, QuantizationSpec::exact_channel());
    const Vector got = distributed_cheb_matvec(cluster, board, q, v);
    const Vector want = oracle::spectral_apply(a, [&coeffs](double x) { return oracle::cheb_recurrence(coeffs, x); }, v);
    const double rel = (got - want).norm() / std::max(want.norm(), 1e-300);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-8)) out.pass = false;
  }
  out.detail = "worst relative error " + fmt("%.2e", worst) + " over 50 instances";
  return out;
}

Outcome sandwich_and_expectation() {
  Outcome out{true, ""};
  CounterStream rng(4004);
  int sandwich_ok = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.next_u64() % 40);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(rng.next_u64() % n);
    const Matrix g = rng.gaussian_matrix(n, k);
    Matrix a = g * g.transpose();
    a /= oracle::jacobi_eigh(a).eigenvalues(0) * (0.5 + rng.uniform());
    const SymMatrix sa(Matrix(0.5 * (a + a.transpose())));
    const Vector ev = oracle::jacobi_eigh(sa.dense()).eigenvalues;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += hspec(ev(i), kTh) * hspec(ev(i), kTh);
    sandwich_ok += generalized_rank(sa, kTh.c1) <= s && s <= generalized_rank(sa, kTh.c2);
  }
  if (sandwich_ok != 100) out.pass = false;

  Vector ev(12);
  ev << 0.97, 0.9, 0.75, 0.62, 0.51, 0.4, 0.3, 0.22, 0.15, 0.08, 0.03, 0.0;
  auto shards = datagen::planted_spectrum_shards(12, 2, ev, 12, datagen::SplitMode::random);
  const Vector spec = oracle::jacobi_eigh(datagen::sum_shards(shards).dense()).eigenvalues;
  Cluster cluster(std::move(shards));
  RandomizedOptions opts;
  opts.p = 2;
  opts.T = 100000;
  opts.seed = 9;
  Blackboard board(2, QuantizationSpec::exact_channel());
  const EstimateReport rep = randomized_rank_estimate(cluster, board, opts);
  const CompositeFilter f = make_composite_filter(kTh, opts.p);
  double target = 0.0;
  for (Eigen::Index i = 0; i < spec.size(); ++i) target += f(spec(i)) * f(spec(i));
  const double rel = std::abs(rep.rhat - target) / target;
  if (!(rel <= 0.01)) out.pass = false;
  out.detail = "sandwich " + std::to_string(sandwich_ok) + "/100, MC mean " + fmt("%.5f", rep.rhat) + " vs " +
               fmt("%.5f", target) + " (rel " + fmt("%.2e", rel) + ")";
  return out;
}

Vector theorem2_spectrum(Eigen::Index n, Eigen::Index k, CounterStream& rng) {
  Vector ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev(i) = i < k ? 0.6 : 0.05 * rng.uniform();
  return ev;
}

Outcome theorem2_containment() {
  Outcome out{true, ""};
  const Eigen::Index n = 200;
  const int p = static_cast<int>(std::ceil(std::log2(2.0 * n)));
  const double delta = 1.0 / std::sqrt(20.0);
  const double lo = (1.0 - delta) * 20.0 - 1.0, hi = (1.0 + delta) * 21.0;
  int hits = 0;
  double min_r = 1e300, max_r = -1e300;
  for (int seed = 0; seed < 100; ++seed) {
    CounterStream rng(derive_seed(5005, seed));
    Cluster cluster(datagen::planted_spectrum_shards(n, 2, theorem2_spectrum(n, 20, rng), derive_seed(5006, seed)));
    RandomizedOptions opts;
    opts.p = p;
    opts.T = 64;
    opts.seed = derive_seed(5007, seed);
    opts.delta = delta;
    Blackboard board(2, QuantizationSpec::exact_channel());
    const double r = randomized_rank_estimate(cluster, board, opts).rhat;
    min_r = std::min(min_r, r);
    max_r = std::max(max_r, r);
    hits += lo <= r && r <= hi;
  }
  out.pass = hits >= 95;
  out.detail = "p=" + std::to_string(p) + ", " + std::to_string(hits) + "/100 within [" + fmt("%.3f", lo) + ", " +
               fmt("%.3f", hi) + "], rhat range [" + fmt("%.3f", min_r) + ", " + fmt("%.3f", max_r) + "]";
  return out;
}

Outcome deterministic_guarantee() {
  Outcome out{true, ""};
  CounterStream rng(6006);
  int ok = 0, ledger_ok = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::Index n = 40 + static_cast<Eigen::Index>(rng.next_u64() % 81);
    const int m = 2 + static_cast<int>(rng.next_u64() % 3);
    const Eigen::Index big = 1 + static_cast<Eigen::Index>(rng.next_u64() % 15);
    const Eigen::Index small = static_cast<Eigen::Index>(rng.next_u64() % 10);
    Vector ev = Vector::Zero(n);
    for (Eigen::Index i = 0; i < big; ++i) ev(i) = 0.55 + 0.45 * rng.uniform();
    for (Eigen::Index i = big; i < big + small; ++i) ev(i) = 0.09 * rng.uniform();
    const int r = static_cast<int>(big + small);
    auto shards = datagen::planted_spectrum_shards(n, m, ev, 6100 + inst,
                                                   inst % 2 ? datagen::SplitMode::random : datagen::SplitMode::even);
    const SymMatrix a = datagen::sum_shards(shards);
    Cluster cluster(std::move(shards));
    Blackboard board(m, QuantizationSpec::exact_channel());
    const DetProtocolReport rep = deterministic_rank_protocol(cluster, board, kTh, r);
    ok += generalized_rank(a, kTh.c1) <= rep.rhat && rep.rhat <= generalized_rank(a, kTh.c2);
    ledger_ok += rep.bits_used == predicted_deterministic_bits(n, rep.bits_per_entry, rep.factor_columns) &&
                 rep.bits_per_entry == det_bits_per_entry(m, r, n, kTh);
  }
  out.pass = ok == 50 && ledger_ok == 50;
  out.detail = "guarantee " + std::to_string(ok) + "/50, ledger closed form " + std::to_string(ledger_ok) + "/50";
  return out;
}

Outcome experiment_reproduction() {
  Outcome out{true, ""};
  datagen::SpikedCovConfig cfg;  // n=1000, m=2, N_i=1000, r=100, lambda=0.4, sigma2=0.1
  cfg.seed = 7007;
  const datagen::ShardSet set = datagen::spiked_covariance_shards(cfg);
  Cluster cluster(set.shards);
  experiment::ExperimentConfig ecfg;
  ecfg.T_values = {30};
  ecfg.points = {{FilterKind::composite, 0}, {FilterKind::composite, 1}, {FilterKind::baseline, 0, 12}};
  ecfg.trials = 100;
  ecfg.master_seed = 7008;
  const experiment::ExperimentResult res = experiment::run_experiment(ecfg, cluster, set.planted_rank);
  const double p0 = res.mse("composite", 0, 30);
  const double p1 = res.mse("composite", 1, 30);
  const double base = res.mse("baseline", 0, 30);
  out.pass = p1 <= 25.0 && p1 < p0 && p1 < base;
  out.detail = "MSE p=1 " + fmt("%.2f", p1) + ", p=0 " + fmt("%.2f", p0) + ", baseline(12) " + fmt("%.2f", base);
  return out;
}

Outcome lemma3() {
  const experiment::Lemma3Result res = experiment::lemma3_check(100, 25, 100, 8008);
  double lo = 1e300;
  for (double s : res.sigmas) lo = std::min(lo, s);
  return {res.passes == 100, "sigma_" + std::to_string(res.index) + " > 0.1 in " + std::to_string(res.passes) +
                                 "/100, min " + fmt("%.4f", lo)};
}

Outcome communication_scaling() {
  Outcome out{true, ""};
  const int d = fit_q1(kTh).degree();
  const double tau = default_tau(2, d, 256, static_cast<int>(std::ceil(std::log2(512.0))));
  std::vector<double> bits;
  std::ostringstream detail;
  for (Eigen::Index n : {64, 128, 256}) {
    CounterStream rng(9009);
    Cluster cluster(datagen::planted_spectrum_shards(n, 2, theorem2_spectrum(n, n / 10, rng), 9010));
    RandomizedOptions opts;
    opts.p = static_cast<int>(std::ceil(std::log2(2.0 * n)));
    opts.T = 8;
    opts.seed = 9011;
    Blackboard board(2, QuantizationSpec::fixed_point(tau));
    const EstimateReport rep = randomized_rank_estimate(cluster, board, opts);
    bits.push_back(static_cast<double>(rep.bits_used));
    detail << "bits(" << n << ")=" << rep.bits_used << " ";
  }
  const double ratio = bits[2] / bits[0];
  const double bound = 4.0 * (std::log2(512.0) / std::log2(128.0)) * 1.1;
  out.pass = ratio <= bound;
  detail << "ratio " << fmt("%.3f", ratio) << " <= " << fmt("%.3f", bound) << " (tau 2^" << std::ilogb(tau) << ")";
  out.detail = detail.str();
  return out;
}

Outcome quantization_robustness() {
  Outcome out{true, ""};
  const Eigen::Index n = 200;
  const int p = static_cast<int>(std::ceil(std::log2(2.0 * n)));
  const int d = fit_q1(kTh).degree();
  const double tau = default_tau(2, d, n, p);
  CounterStream rng(10010);
  Cluster cluster(datagen::planted_spectrum_shards(n, 2, theorem2_spectrum(n, 20, rng), 10011));
  double worst = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    RandomizedOptions opts;
    opts.p = p;
    opts.T = 32;
    opts.seed = derive_seed(10012, seed);
    Blackboard exact(2, QuantizationSpec::exact_channel());
    Blackboard fixed(2, QuantizationSpec::fixed_point(tau));
    const double re = randomized_rank_estimate(cluster, exact, opts).rhat;
    const double rq = randomized_rank_estimate(cluster, fixed, opts).rhat;
    worst = std::max(worst, std::abs(re - rq));
  }
  out.pass = worst <= 0.1;
  out.detail = "max |rhat_q - rhat_exact| = " + fmt("%.3e", worst) + " over 20 seeds (tau 2^" +
               std::to_string(std::ilogb(tau)) + ")";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "Lemma 1 certificate", 5, lemma1_certificate},
      {2, "q2 booster properties", 5, q2_properties},
      {3, "distributed Chebyshev vs spectral oracle", 30, oracle_equivalence},
      {4, "sandwich and expectation identities", 120, sandwich_and_expectation},
      {5, "randomized containment bound", 300, theorem2_containment},
      {6, "deterministic protocol guarantee", 120, deterministic_guarantee},
      {7, "spiked-covariance experiment", 1800, experiment_reproduction},
      {8, "orthogonal-ensemble eigenvalue check", 60, lemma3},
      {9, "communication scaling", 120, communication_scaling},
      {10, "quantization robustness", 180, quantization_robustness},
  };
  std::set<int> selected;
  bool report = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--report")
      report = true;
    else
      selected.insert(std::stoi(argv[i]));
  }

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %d: %s | %s | %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.limit_seconds);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return report || failures == 0 ? 0 : 1;
}
