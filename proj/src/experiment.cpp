#include "grank/experiment.hpp"

#include "grank/datagen.hpp"
#include "grank/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace grank::experiment {

std::string SweepPoint::filter_name() const {
  return filter == FilterKind::baseline ? "baseline" : "composite";
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidArgument("experiment needs trials >= 1");
  if (points.empty() || T_values.empty()) throw InvalidArgument("experiment needs at least one sweep point");
  for (int t : T_values) {
    if (t < 1) throw InvalidArgument("every T must be >= 1");
  }
  thresholds.validate();
  quantization.validate();
}

double ExperimentResult::mse(const std::string& filter, int p, int T) const {
  for (const auto& s : summary) {
    if (s.filter == filter && s.p == p && s.T == T) return s.mse;
  }
  throw InvalidArgument("no summary row for " + filter + " p=" + std::to_string(p) + " T=" + std::to_string(T));
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, int trial) {
  return derive_seed(master, sweep_index, static_cast<std::uint64_t>(trial));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Cluster& cluster, double true_rank) {
  cfg.validate();
  cluster.validate_spectrum();
  const int t_max = *std::max_element(cfg.T_values.begin(), cfg.T_values.end());
  const std::size_t npoints = cfg.points.size();
  const std::size_t ntrials = static_cast<std::size_t>(cfg.trials);
  std::vector<EstimateReport> reports(npoints * ntrials);

  // One slot per (point, trial); the schedule cannot affect the output.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t job = 0; job < reports.size(); ++job) {
    const std::size_t pi = job / ntrials;
    const int trial = static_cast<int>(job % ntrials);
    const SweepPoint& pt = cfg.points[pi];
    RandomizedOptions opts;
    opts.thresholds = cfg.thresholds;
    opts.p = pt.p;
    opts.T = t_max;
    opts.seed = trial_seed(cfg.master_seed, pi, trial);
    opts.filter = pt.filter;
    opts.baseline_degree = pt.baseline_degree;
    opts.q1_degree = cfg.q1_degree;
    opts.scheme = cfg.scheme;
    opts.validate_spectrum = false;
    Blackboard board(cluster.size(), cfg.quantization);
    reports[job] = randomized_rank_estimate(cluster, board, opts);
  }

  ExperimentResult res;
  for (std::size_t pi = 0; pi < npoints; ++pi) {
    const SweepPoint& pt = cfg.points[pi];
    std::vector<double> sq_err(cfg.T_values.size(), 0.0);
    std::vector<double> sum_rhat(cfg.T_values.size(), 0.0);
    std::vector<double> sum_bits(cfg.T_values.size(), 0.0);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const EstimateReport& rep = reports[pi * ntrials + trial];
      for (std::size_t ti = 0; ti < cfg.T_values.size(); ++ti) {
        const int T = cfg.T_values[ti];
        double sum = 0.0;
        std::uint64_t bits = rep.answer_bits;
        for (int t = 0; t < T; ++t) {
          sum += rep.y_sq_norms[t];
          bits += rep.bits_per_repetition[t];
        }
        const double rhat = sum / T;
        sq_err[ti] += (rhat - true_rank) * (rhat - true_rank);
        sum_rhat[ti] += rhat;
        sum_bits[ti] += static_cast<double>(bits);
        res.rows.push_back({pt.filter_name(), pt.p, T, trial, rhat, sq_err[ti] / (trial + 1), bits});
      }
    }
    for (std::size_t ti = 0; ti < cfg.T_values.size(); ++ti) {
      res.summary.push_back({pt.filter_name(), pt.p, cfg.T_values[ti], sq_err[ti] / cfg.trials,
                             sum_rhat[ti] / cfg.trials, sum_bits[ti] / cfg.trials});
    }
  }
  return res;
}

void write_rows_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << "filter,p,T,trial,rhat,mse_running,bits\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.filter << ',' << r.p << ',' << r.T << ',' << r.trial << ',' << r.rhat << ','
        << r.mse_running << ',' << r.bits << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "filter,p,T,mse,mean_rhat,mean_bits\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.filter << ',' << r.p << ',' << r.T << ',' << r.mse << ',' << r.mean_rhat << ','
        << r.mean_bits << '\n';
  }
}

std::vector<PolyErrorRow> verify_poly(const Thresholds& th, int p_max, int q1_degree) {
  th.validate();
  if (p_max < 0) throw InvalidArgument("p_max must be >= 0");
  const ChebyshevExpansion q1 = q1_degree > 0 ? fit_q1_at_degree(th, q1_degree) : fit_q1(th);
  auto ramp = [&th](double x) { return hspec(x, th); };
  std::vector<PolyErrorRow> rows;
  for (int p = 0; p <= p_max; ++p) {
    const CompositeFilter f = make_composite_filter(th, p, q1);
    const int total = f.total_degree();
    const ChebyshevExpansion plain = chebyshev_project(ramp, total, 4 * (total + 1));
    rows.push_back({p, total, region_sup_error(f, th), region_sup_error(plain, th)});
  }
  return rows;
}

void write_poly_csv(std::ostream& out, const std::vector<PolyErrorRow>& rows) {
  out << "p,total_degree,composite_error,chebyshev_error\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.p << ',' << r.total_degree << ',' << r.composite_error << ',' << r.chebyshev_error << '\n';
  }
}

Lemma3Result lemma3_check(Eigen::Index n, Eigen::Index r, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("lemma3 check needs trials >= 1");
  Lemma3Result res;
  res.n = n;
  res.r = r;
  res.index = (6 * r + 4) / 5;
  res.sigmas.resize(trials);
#pragma omp parallel for schedule(dynamic, 1)
  for (int t = 0; t < trials; ++t) {
    const auto [q1, q2] = datagen::orthogonal_ensemble_pair(n, r, derive_seed(seed, static_cast<std::uint64_t>(t)));
    const Matrix s = q1.transpose() * q1 + q2.transpose() * q2;
    const Vector ev = eigenvalues_desc(SymMatrix(Matrix(0.5 * (s + s.transpose()))));
    res.sigmas[t] = ev(res.index - 1);
  }
  res.passes = static_cast<int>(std::count_if(res.sigmas.begin(), res.sigmas.end(),
                                              [](double s) { return s > 0.1; }));
  return res;
}

void write_lemma3_csv(std::ostream& out, const Lemma3Result& res) {
  out << "trial,n,r,index,sigma,pass\n" << std::setprecision(17);
  for (std::size_t t = 0; t < res.sigmas.size(); ++t) {
    out << t << ',' << res.n << ',' << res.r << ',' << res.index << ',' << res.sigmas[t] << ','
        << (res.sigmas[t] > 0.1 ? 1 : 0) << '\n';
  }
}

}  // namespace grank::experiment
