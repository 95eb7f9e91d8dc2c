#pragma once

#include "grank/protocols.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace grank::experiment {

struct SweepPoint {
  FilterKind filter = FilterKind::composite;
  int p = 0;
  int baseline_degree = 12;

  /// "composite" or "baseline".
  std::string filter_name() const;
};

/// Repeated randomized runs on a fixed instance.  Each trial runs once with
/// T = max(T_values); the estimate for a smaller T is the mean over the first
/// T sketches, which is exactly what a run with that T would return because
/// sketches are drawn from the public coin in order.
struct ExperimentConfig {
  std::vector<int> T_values;
  std::vector<SweepPoint> points;
  int trials = 100;
  Thresholds thresholds;
  int q1_degree = 0;
  BoosterScheme scheme = BoosterScheme::horner;
  QuantizationSpec quantization;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct TrialRow {
  std::string filter;
  int p = 0;
  int T = 0;
  int trial = 0;
  double rhat = 0.0;
  /// Mean of (rhat - r)^2 over trials 0..trial at this (point, T).
  double mse_running = 0.0;
  std::uint64_t bits = 0;
};

struct SummaryRow {
  std::string filter;
  int p = 0;
  int T = 0;
  double mse = 0.0;
  double mean_rhat = 0.0;
  double mean_bits = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRow> rows;
  std::vector<SummaryRow> summary;

  /// MSE for a (point, T) pair; throws InvalidArgument if absent.
  double mse(const std::string& filter, int p, int T) const;
};

/// Seed of trial `trial` at sweep point `sweep_index`.
std::uint64_t trial_seed(std::uint64_t master, std::size_t sweep_index, int trial);

/// Trials run in parallel; output ordering is (sweep point, trial, T) regardless of schedule.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Cluster& cluster, double true_rank);

void write_rows_csv(std::ostream& out, const std::vector<TrialRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct PolyErrorRow {
  int p = 0;
  int total_degree = 0;
  double composite_error = 0.0;
  double chebyshev_error = 0.0;
};

/// Error of q2 o q1 against a plain Chebyshev fit of H with the same total
/// degree, both measured on [0,c2] u [c1,1].
std::vector<PolyErrorRow> verify_poly(const Thresholds& th, int p_max, int q1_degree = 0);
void write_poly_csv(std::ostream& out, const std::vector<PolyErrorRow>& rows);

struct Lemma3Result {
  Eigen::Index n = 0;
  Eigen::Index r = 0;
  /// 1-based eigenvalue index ceil(6r/5).
  Eigen::Index index = 0;
  int passes = 0;
  std::vector<double> sigmas;
};

/// sigma_{ceil(6r/5)}(Q1^T Q1 + Q2^T Q2) for `trials` seeded orthogonal-ensemble pairs.
Lemma3Result lemma3_check(Eigen::Index n, Eigen::Index r, int trials, std::uint64_t seed);
void write_lemma3_csv(std::ostream& out, const Lemma3Result& res);

}  // namespace grank::experiment
