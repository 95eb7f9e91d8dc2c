#pragma once

#include "grank/rng.hpp"
#include "grank/sym_matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace grank {

enum class QuantMode { exact, fixed_point };

/// How scalars are encoded on the board.  Exact mode ships raw doubles and is
/// charged 64 bits per scalar.  Fixed-point mode rounds every entry to the grid
/// tau * Z (ties to even) and charges ceil(log2(2R/tau + 1)) bits per entry plus
/// a 16-bit range header, where R is either the declared `range` or, when
/// range == 0, max|v_i| rounded up to a power of two.
struct QuantizationSpec {
  QuantMode mode = QuantMode::exact;
  double tau = 0.0;
  double range = 0.0;

  static QuantizationSpec exact_channel() { return {}; }
  static QuantizationSpec fixed_point(double tau, double range = 0.0) {
    return {QuantMode::fixed_point, tau, range};
  }
  void validate() const;
};

inline constexpr std::uint64_t kExactBitsPerScalar = 64;
inline constexpr std::uint64_t kRangeHeaderBits = 16;

/// Smallest power of two >= x (x > 0); 0 for x == 0.
double round_up_pow2(double x);

/// ceil(log2(2 range / tau + 1)).
std::uint64_t fixed_point_bits_per_entry(double range, double tau);

/// 1 / (m d n 2^{4p}) rounded down to a power of two.
double default_tau(int machines, int q1_degree, Eigen::Index n, int p);

/// Encoded form of one vector together with what it cost.
struct QuantizedVector {
  Vector values;
  double range = 0.0;
  std::uint64_t bits = 0;
};

/// Pure encoding step used by the board.  Throws ProtocolAbort on non-finite
/// entries or entries beyond a declared range.
QuantizedVector quantize(const Vector& v, const QuantizationSpec& q);

struct LedgerRecord {
  std::uint64_t round = 0;
  int writer = 0;
  std::uint64_t bits = 0;
};

class BitLedger {
 public:
  void charge(std::uint64_t round, int writer, std::uint64_t bits);
  std::uint64_t total_bits() const noexcept { return total_; }
  const std::vector<LedgerRecord>& records() const noexcept { return records_; }
  /// CSV columns: round,writer,bits,cumulative_bits
  void write_csv(std::ostream& out) const;

 private:
  std::vector<LedgerRecord> records_;
  std::uint64_t total_ = 0;
};

struct TraceRecord {
  std::uint64_t round = 0;
  int writer = 0;
  Eigen::Index length = 0;
  double range = 0.0;
  double tau = 0.0;
};

using MessageId = std::size_t;

/// Public blackboard shared by machines 1..m.
///
/// A message posted in round t is readable by its writer during round t and by
/// every machine in rounds > t.  Rounds advance only through next_round().
class Blackboard {
 public:
  Blackboard(int machines, QuantizationSpec q, bool trace = false);

  int machines() const noexcept { return machines_; }
  const QuantizationSpec& quantization() const noexcept { return quant_; }
  std::uint64_t round() const noexcept { return round_; }
  void next_round() noexcept { ++round_; }

  /// Posts one vector; returns the handle other machines read it through.
  MessageId post_vector(int writer, const Vector& v);
  /// Posts the columns of `block` as independent vectors in a single message.
  /// Each column is encoded and charged exactly as post_vector would.
  MessageId post_block(int writer, const Matrix& block);
  /// Posts a payload the writer has already encoded with its own scheme,
  /// charging exactly `bits`.  The board's quantization is not applied.
  MessageId post_encoded(int writer, Matrix payload, std::uint64_t bits);
  /// Charges `bits` for a scalar answer written by `writer`.
  void post_answer(int writer, std::uint64_t bits);

  const Matrix& read(int reader, MessageId id) const;
  Vector read_vector(int reader, MessageId id) const;
  /// Bits charged for each column of a message.
  const std::vector<std::uint64_t>& column_bits(MessageId id) const;

  /// Drops payloads posted before `round`; reading them afterwards is misuse.
  void retire_before(std::uint64_t round);

  /// Seeds the shared random string.  Calling it twice is misuse.
  CounterStream& public_coin(std::uint64_t seed);
  CounterStream& coin();

  const BitLedger& ledger() const noexcept { return ledger_; }
  const std::vector<TraceRecord>& trace() const noexcept { return trace_; }
  /// One line per posted column: round,writer,length,R,tau
  void write_trace(std::ostream& out) const;

 private:
  struct Message {
    std::uint64_t round = 0;
    int writer = 0;
    bool retired = false;
    Matrix payload;
    std::vector<std::uint64_t> column_bits;
  };

  void check_machine(int index, const char* role) const;

  int machines_;
  QuantizationSpec quant_;
  bool tracing_;
  std::uint64_t round_ = 0;
  std::vector<Message> messages_;
  BitLedger ledger_;
  std::vector<TraceRecord> trace_;
  std::optional<CounterStream> coin_;
};

/// One machine's local PSD matrix.
struct PsdShard {
  int machine_index = 1;
  SymMatrix matrix;
};

/// A machine only exposes products with its own shard.
class Machine {
 public:
  explicit Machine(PsdShard shard) : shard_(std::move(shard)) {}
  int index() const noexcept { return shard_.machine_index; }
  Eigen::Index n() const noexcept { return shard_.matrix.n(); }
  Vector apply(const Vector& v) const;
  Matrix apply(const Matrix& block) const;

 private:
  friend class Cluster;
  PsdShard shard_;
};

/// The m machines of a protocol run, indexed 1..m.
class Cluster {
 public:
  explicit Cluster(std::vector<PsdShard> shards);

  int size() const noexcept { return static_cast<int>(machines_.size()); }
  Eigen::Index n() const noexcept { return machines_.front().n(); }
  const Machine& machine(int index) const;

  /// A machine's own shard.  Throws AccessViolation when requester != owner.
  const SymMatrix& shard(int requester, int owner) const;

  /// Every shard has smallest eigenvalue >= -tol (throws NotPsd otherwise).
  void validate_psd(double tol = 1e-9) const;
  /// Power-iteration estimate of ||sum_i A_i||_2 built from local products only.
  double sum_norm_estimate(int iterations = 50) const;
  /// Throws SpectrumViolation if sum_norm_estimate() > 1 + tol.
  void validate_spectrum(double tol = 1e-6) const;

 private:
  std::vector<Machine> machines_;
};

}  // namespace grank
