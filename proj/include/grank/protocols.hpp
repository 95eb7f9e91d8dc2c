#pragma once

#include "grank/blackboard.hpp"
#include "grank/polyfilter.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace grank {

/// The coordinator of every protocol.
inline constexpr int kCoordinator = 1;

/// ceil(log2(n + 1)): bits for an integer answer in [0, n].
std::uint64_t answer_bits(Eigen::Index n);

/// q(A) V for A = sum_i A_i, evaluated with the Clenshaw recurrence over
/// j = d..0.  Each step is one broadcast round: the coordinator posts b_{j+1},
/// every machine posts A_i b_{j+1}, and the coordinator forms
///   b_j = 4 sum_i A_i b_{j+1} - 2 b_{j+1} - b_{j+2} + a_j V.
/// The result is (b_0 - b_2) / 2.  Columns of V are independent vectors.
/// If `column_bits` is non-null, the bits charged for each column are added to it.
Matrix distributed_cheb_apply(const Cluster& cluster, Blackboard& board, const ChebyshevExpansion& q,
                              const Matrix& v, std::vector<std::uint64_t>* column_bits = nullptr);
Vector distributed_cheb_matvec(const Cluster& cluster, Blackboard& board, const ChebyshevExpansion& q,
                               const Vector& v);

enum class FilterKind { composite, baseline };

/// How y = q2(M) g is assembled from applications of M = q1(A).
enum class BoosterScheme {
  horner,  ///< w <- M w + a_i g, highest coefficient first
  powers   ///< accumulate a_k M^k g
};

struct RandomizedOptions {
  Thresholds thresholds;
  int p = 0;
  int T = 32;
  std::uint64_t seed = 0;
  FilterKind filter = FilterKind::composite;
  int baseline_degree = 12;
  /// 0 selects the minimal-degree fit with sup error <= 0.1.
  int q1_degree = 0;
  BoosterScheme scheme = BoosterScheme::horner;
  /// Used for the report's delta; <= 0 falls back to 1/sqrt(rhat_rounded).
  double delta = 0.0;
  bool validate_spectrum = true;
};

struct EstimateReport {
  double rhat = 0.0;
  long long rhat_rounded = 0;
  int T = 0;
  std::vector<double> y_sq_norms;
  std::uint64_t bits_used = 0;
  /// Bits attributable to each repetition (the answer bits are not included).
  std::vector<std::uint64_t> bits_per_repetition;
  std::uint64_t answer_bits = 0;
  std::uint64_t seed = 0;
  /// Broadcast rounds across all repetitions: T (2p+1)(d+1), or T (d+1) for the baseline.
  std::uint64_t rounds = 0;
  double delta = 0.0;
  nlohmann::json filter_summary;
};

/// Mean of ||f(A) g_t||^2 over T Gaussian sketches drawn from the public coin.
/// The T repetitions share broadcast rounds; each is encoded and charged as
/// its own vector.
EstimateReport randomized_rank_estimate(const Cluster& cluster, Blackboard& board,
                                        const RandomizedOptions& opts);

/// Broadcast rounds for one repetition.
std::uint64_t rounds_per_repetition(FilterKind filter, int q1_degree, int p, int baseline_degree);

/// Closed-form ledger total of randomized_rank_estimate when every vector is
/// encoded with `bits_per_entry` (declared range in fixed-point mode, or 64 in
/// exact mode, where no range header is sent).
std::uint64_t predicted_randomized_bits(Eigen::Index n, int machines, std::uint64_t rounds_per_rep, int T,
                                        std::uint64_t bits_per_entry, QuantMode mode);

struct DetProtocolReport {
  long long rhat = 0;
  std::uint64_t bits_used = 0;
  std::uint64_t bits_per_entry = 0;
  double threshold_used = 0.0;
  /// Factor width sent by machines 2..m.
  std::vector<Eigen::Index> factor_columns;
};

/// ceil(log2(12 m r n / (c1 - c2))).
std::uint64_t det_bits_per_entry(int machines, int r, Eigen::Index n, const Thresholds& th);

/// Header bits preceding each posted factor (its column count).
inline constexpr std::uint64_t kFactorHeaderBits = 16;

/// sum_i (16 + n k_i b) + answer bits.
std::uint64_t predicted_deterministic_bits(Eigen::Index n, std::uint64_t bits_per_entry,
                                           const std::vector<Eigen::Index>& factor_columns);

/// Machines 2..m post a quantized square-root factor of their shard; machine 1
/// thresholds the spectrum of A_1 + sum B~_i B~_i^T at (c1 + c2)/2.
DetProtocolReport deterministic_rank_protocol(const Cluster& cluster, Blackboard& board,
                                              const Thresholds& th, int r);

/// Uniform midrise quantizer over [-1,1] with 2^bits cells.  Throws OutOfRange
/// for entries beyond 1 + cell width.
Matrix quantize_unit_interval(const Matrix& b, std::uint64_t bits);

nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const DetProtocolReport& r);

}  // namespace grank
