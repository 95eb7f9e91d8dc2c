#include "grank/protocols.hpp"

#include "grank/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace grank {

std::uint64_t answer_bits(Eigen::Index n) {
  std::uint64_t b = 0;
  while ((std::uint64_t{1} << b) < static_cast<std::uint64_t>(n) + 1) ++b;
  return b;
}

namespace {

void add_column_bits(const Blackboard& board, MessageId id, std::vector<std::uint64_t>* acc) {
  if (!acc) return;
  const auto& bits = board.column_bits(id);
  for (std::size_t c = 0; c < bits.size(); ++c) (*acc)[c] += bits[c];
}

}  // namespace

Matrix distributed_cheb_apply(const Cluster& cluster, Blackboard& board, const ChebyshevExpansion& q,
                              const Matrix& v, std::vector<std::uint64_t>* column_bits) {
  const Eigen::Index n = cluster.n();
  if (v.rows() != n) {
    throw DimensionMismatch("distributed_cheb_apply: input has " + std::to_string(v.rows()) +
                            " rows, matrices are " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (board.machines() != cluster.size()) {
    throw InvalidArgument("blackboard and cluster disagree on the number of machines");
  }
  if (column_bits && column_bits->size() != static_cast<std::size_t>(v.cols())) {
    column_bits->assign(v.cols(), 0);
  }

  const auto& a = q.coeffs();
  const int m = cluster.size();
  Matrix b1 = Matrix::Zero(n, v.cols());  // b_{j+1}
  Matrix b2 = Matrix::Zero(n, v.cols());  // b_{j+2}
  Matrix result;
  std::vector<MessageId> replies(m);

  for (int j = q.degree(); j >= 0; --j) {
    const MessageId bcast = board.post_block(kCoordinator, b1);
    add_column_bits(board, bcast, column_bits);
    board.next_round();

    for (int i = 1; i <= m; ++i) {
      const Matrix& x = board.read(i, bcast);
      const Matrix prod = x.isZero(0.0) ? Matrix::Zero(n, x.cols()) : cluster.machine(i).apply(x);
      replies[i - 1] = board.post_block(i, prod);
      add_column_bits(board, replies[i - 1], column_bits);
    }
    board.next_round();

    // Fixed machine-index order keeps the sum reproducible.
    Matrix sum = board.read(kCoordinator, replies[0]);
    for (int i = 2; i <= m; ++i) sum += board.read(kCoordinator, replies[i - 1]);
    board.retire_before(board.round());

    Matrix bj = 4.0 * sum - 2.0 * b1 - b2 + a[j] * v;
    if (j == 0) {
      result = 0.5 * (bj - b2);
    } else {
      b2 = std::move(b1);
      b1 = std::move(bj);
    }
  }
  return result;
}

Vector distributed_cheb_matvec(const Cluster& cluster, Blackboard& board, const ChebyshevExpansion& q,
                               const Vector& v) {
  return distributed_cheb_apply(cluster, board, q, Matrix(v)).col(0);
}

std::uint64_t rounds_per_repetition(FilterKind filter, int q1_degree, int p, int baseline_degree) {
  if (filter == FilterKind::baseline) return static_cast<std::uint64_t>(baseline_degree) + 1;
  return static_cast<std::uint64_t>(2 * p + 1) * static_cast<std::uint64_t>(q1_degree + 1);
}

std::uint64_t predicted_randomized_bits(Eigen::Index n, int machines, std::uint64_t rounds_per_rep, int T,
                                        std::uint64_t bits_per_entry, QuantMode mode) {
  const auto nn = static_cast<std::uint64_t>(n);
  const std::uint64_t per_vector =
      mode == QuantMode::exact ? kExactBitsPerScalar * nn : nn * bits_per_entry + kRangeHeaderBits;
  return static_cast<std::uint64_t>(T) * rounds_per_rep * static_cast<std::uint64_t>(machines + 1) *
             per_vector +
         answer_bits(n);
}

EstimateReport randomized_rank_estimate(const Cluster& cluster, Blackboard& board,
                                        const RandomizedOptions& opts) {
  opts.thresholds.validate();
  if (opts.T < 1) throw InvalidArgument("T must be >= 1");
  if (opts.validate_spectrum) cluster.validate_spectrum();

  const Eigen::Index n = cluster.n();
  const std::uint64_t bits_before = board.ledger().total_bits();

  EstimateReport report;
  report.T = opts.T;
  report.seed = opts.seed;
  report.bits_per_repetition.assign(opts.T, 0);

  CounterStream& coin = board.public_coin(opts.seed);
  const Matrix g = coin.gaussian_matrix(n, opts.T);

  Matrix y;
  if (opts.filter == FilterKind::baseline) {
    const ChebyshevExpansion qb = fit_highpass_baseline(opts.thresholds, opts.baseline_degree);
    y = distributed_cheb_apply(cluster, board, qb, g, &report.bits_per_repetition);
    report.rounds = static_cast<std::uint64_t>(opts.T) *
                    rounds_per_repetition(opts.filter, 0, 0, opts.baseline_degree);
    report.filter_summary = {{"kind", "baseline"},
                             {"c1", opts.thresholds.c1},
                             {"c2", opts.thresholds.c2},
                             {"degree", qb.degree()},
                             {"coeffs", qb.coeffs()},
                             {"achieved_sup_error", qb.achieved_sup_error()}};
  } else {
    const CompositeFilter f = make_composite_filter(opts.thresholds, opts.p, opts.q1_degree);
    const auto& c = f.q2;
    const int top = static_cast<int>(c.size()) - 1;
    if (opts.scheme == BoosterScheme::horner) {
      y = c[top] * g;
      for (int i = top - 1; i >= 0; --i) {
        y = distributed_cheb_apply(cluster, board, f.q1, y, &report.bits_per_repetition);
        if (c[i] != 0.0) y += c[i] * g;
      }
    } else {
      Matrix power = g;
      y = c[0] * g;
      for (int k = 1; k <= top; ++k) {
        power = distributed_cheb_apply(cluster, board, f.q1, power, &report.bits_per_repetition);
        y += c[k] * power;
      }
    }
    report.rounds = static_cast<std::uint64_t>(opts.T) *
                    rounds_per_repetition(opts.filter, f.q1.degree(), opts.p, 0);
    report.filter_summary = to_json(f);
    report.filter_summary["kind"] = "composite";
  }

  report.y_sq_norms.resize(opts.T);
  double sum = 0.0;
  for (int t = 0; t < opts.T; ++t) {
    report.y_sq_norms[t] = y.col(t).squaredNorm();
    sum += report.y_sq_norms[t];
  }
  report.rhat = sum / opts.T;
  report.rhat_rounded =
      std::clamp<long long>(std::llround(report.rhat), 0, static_cast<long long>(n));

  report.answer_bits = answer_bits(n);
  board.post_answer(kCoordinator, report.answer_bits);
  report.bits_used = board.ledger().total_bits() - bits_before;
  report.delta = opts.delta > 0.0
                     ? opts.delta
                     : 1.0 / std::sqrt(static_cast<double>(std::max<long long>(1, report.rhat_rounded)));
  return report;
}

std::uint64_t det_bits_per_entry(int machines, int r, Eigen::Index n, const Thresholds& th) {
  th.validate();
  if (machines < 1 || r < 1) throw InvalidArgument("deterministic protocol needs m >= 1 and r >= 1");
  const double levels = 12.0 * machines * r * static_cast<double>(n) / (th.c1 - th.c2);
  std::uint64_t b = static_cast<std::uint64_t>(std::ceil(std::log2(levels)));
  while (std::ldexp(1.0, static_cast<int>(b)) < levels) ++b;
  while (b > 0 && std::ldexp(1.0, static_cast<int>(b) - 1) >= levels) --b;
  return b;
}

std::uint64_t predicted_deterministic_bits(Eigen::Index n, std::uint64_t bits_per_entry,
                                           const std::vector<Eigen::Index>& factor_columns) {
  std::uint64_t total = answer_bits(n);
  for (Eigen::Index k : factor_columns) {
    total += kFactorHeaderBits +
             static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k) * bits_per_entry;
  }
  return total;
}

Matrix quantize_unit_interval(const Matrix& b, std::uint64_t bits) {
  if (bits < 1 || bits > 52) throw InvalidArgument("unit-interval quantizer supports 1..52 bits");
  const double cells = std::ldexp(1.0, static_cast<int>(bits));
  const double step = 2.0 / cells;
  Matrix out(b.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      const double x = b(i, j);
      if (!(std::abs(x) <= 1.0 + step)) {
        throw OutOfRange("factor entry " + std::to_string(x) + " is outside [-1, 1]");
      }
      const double code = std::clamp(std::floor((x + 1.0) / step), 0.0, cells - 1.0);
      out(i, j) = -1.0 + (code + 0.5) * step;
    }
  }
  return out;
}

DetProtocolReport deterministic_rank_protocol(const Cluster& cluster, Blackboard& board,
                                              const Thresholds& th, int r) {
  th.validate();
  if (board.machines() != cluster.size()) {
    throw InvalidArgument("blackboard and cluster disagree on the number of machines");
  }
  const int m = cluster.size();
  const Eigen::Index n = cluster.n();
  const std::uint64_t bits_before = board.ledger().total_bits();

  DetProtocolReport report;
  report.bits_per_entry = det_bits_per_entry(m, r, n, th);
  report.threshold_used = th.midpoint();

  std::vector<MessageId> posted;
  for (int i = 2; i <= m; ++i) {
    const Matrix factor = psd_sqrt_factor(cluster.shard(i, i), 2 * r);
    const Matrix encoded = quantize_unit_interval(factor, report.bits_per_entry);
    report.factor_columns.push_back(encoded.cols());
    const std::uint64_t bits =
        kFactorHeaderBits + static_cast<std::uint64_t>(encoded.size()) * report.bits_per_entry;
    posted.push_back(board.post_encoded(i, encoded, bits));
  }
  board.next_round();

  Matrix approx = cluster.shard(kCoordinator, kCoordinator).dense();
  for (MessageId id : posted) {
    const Matrix& bt = board.read(kCoordinator, id);
    approx.noalias() += bt * bt.transpose();
  }
  report.rhat = generalized_rank(eigenvalues_desc(SymMatrix(std::move(approx), 1e-9)), report.threshold_used);

  board.post_answer(kCoordinator, answer_bits(n));
  report.bits_used = board.ledger().total_bits() - bits_before;
  return report;
}

nlohmann::json to_json(const EstimateReport& r) {
  return nlohmann::json{{"rhat", r.rhat},
                        {"rhat_rounded", r.rhat_rounded},
                        {"T", r.T},
                        {"y_sq_norms", r.y_sq_norms},
                        {"bits_used", r.bits_used},
                        {"bits_per_repetition", r.bits_per_repetition},
                        {"answer_bits", r.answer_bits},
                        {"seed", r.seed},
                        {"rounds", r.rounds},
                        {"delta", r.delta},
                        {"filter_summary", r.filter_summary}};
}

nlohmann::json to_json(const DetProtocolReport& r) {
  return nlohmann::json{{"rhat", r.rhat},
                        {"bits_used", r.bits_used},
                        {"bits_per_entry", r.bits_per_entry},
                        {"threshold_used", r.threshold_used},
                        {"factor_columns", r.factor_columns}};
}

}  // namespace grank
