#include "grank/blackboard.hpp"

#include "grank/error.hpp"
#include "grank/kernels.hpp"

#include <cfenv>
#include <cmath>
#include <ostream>
#include <string>

namespace grank {

void QuantizationSpec::validate() const {
  if (mode == QuantMode::exact) return;
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("fixed-point tau must be > 0");
  if (!(range >= 0.0) || !std::isfinite(range)) throw InvalidArgument("declared range must be >= 0");
}

double round_up_pow2(double x) {
  if (x == 0.0) return 0.0;
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("round_up_pow2 needs a finite x >= 0");
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, mant in [0.5, 1)
  return mant == 0.5 ? x : std::ldexp(1.0, exp);
}

std::uint64_t fixed_point_bits_per_entry(double range, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  const double levels = 2.0 * range / tau;  // encode the integers -R/tau..R/tau
  if (levels <= 0.0) return 0;
  if (levels >= 0x1.0p52) return static_cast<std::uint64_t>(std::ilogb(levels)) + 1;
  int b = static_cast<int>(std::ceil(std::log2(levels + 1.0)));
  while (std::ldexp(1.0, b) < levels + 1.0) ++b;
  while (b > 0 && std::ldexp(1.0, b - 1) >= levels + 1.0) --b;
  return static_cast<std::uint64_t>(b);
}

double default_tau(int machines, int q1_degree, Eigen::Index n, int p) {
  if (machines < 1 || q1_degree < 1 || n < 1 || p < 0) {
    throw InvalidArgument("default_tau needs m, d, n >= 1 and p >= 0");
  }
  const double base = 1.0 / (static_cast<double>(machines) * q1_degree * static_cast<double>(n));
  const double tau = std::ldexp(base, -4 * p);
  int exp = 0;
  const double mant = std::frexp(tau, &exp);
  return mant == 0.5 ? tau : std::ldexp(1.0, exp - 1);
}

QuantizedVector quantize(const Vector& v, const QuantizationSpec& q) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) {
      throw ProtocolAbort("non-finite entry at index " + std::to_string(i) + " of a posted vector");
    }
  }
  QuantizedVector out;
  const auto n = static_cast<std::uint64_t>(v.size());
  if (q.mode == QuantMode::exact) {
    out.values = v;
    out.bits = kExactBitsPerScalar * n;
    return out;
  }
  const double peak = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (q.range > 0.0) {
    if (peak > q.range) {
      throw ProtocolAbort("entry magnitude " + std::to_string(peak) + " exceeds declared range " +
                          std::to_string(q.range));
    }
    out.range = q.range;
  } else {
    out.range = round_up_pow2(peak);
  }
  out.values.resize(v.size());
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  for (Eigen::Index i = 0; i < v.size(); ++i) out.values(i) = std::nearbyint(v(i) / q.tau) * q.tau;
  std::fesetround(saved);
  out.bits = n * fixed_point_bits_per_entry(out.range, q.tau) + kRangeHeaderBits;
  return out;
}

void BitLedger::charge(std::uint64_t round, int writer, std::uint64_t bits) {
  records_.push_back({round, writer, bits});
  total_ += bits;
}

void BitLedger::write_csv(std::ostream& out) const {
  out << "round,writer,bits,cumulative_bits\n";
  std::uint64_t cumulative = 0;
  for (const auto& r : records_) {
    cumulative += r.bits;
    out << r.round << ',' << r.writer << ',' << r.bits << ',' << cumulative << '\n';
  }
}

Blackboard::Blackboard(int machines, QuantizationSpec q, bool trace)
    : machines_(machines), quant_(q), tracing_(trace) {
  if (machines < 1) throw InvalidArgument("a blackboard needs at least one machine");
  quant_.validate();
}

void Blackboard::check_machine(int index, const char* role) const {
  if (index < 1 || index > machines_) {
    throw AccessViolation(std::string(role) + " index " + std::to_string(index) +
                          " is not a machine of this board (1.." + std::to_string(machines_) + ")");
  }
}

MessageId Blackboard::post_vector(int writer, const Vector& v) {
  return post_block(writer, Matrix(v));
}

MessageId Blackboard::post_block(int writer, const Matrix& block) {
  check_machine(writer, "writer");
  Message msg;
  msg.round = round_;
  msg.writer = writer;
  msg.payload.resize(block.rows(), block.cols());
  msg.column_bits.reserve(block.cols());
  std::uint64_t bits = 0;
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    QuantizedVector qv = quantize(block.col(c), quant_);
    msg.payload.col(c) = qv.values;
    msg.column_bits.push_back(qv.bits);
    bits += qv.bits;
    if (tracing_) trace_.push_back({round_, writer, block.rows(), qv.range, quant_.tau});
  }
  ledger_.charge(round_, writer, bits);
  messages_.push_back(std::move(msg));
  return messages_.size() - 1;
}

MessageId Blackboard::post_encoded(int writer, Matrix payload, std::uint64_t bits) {
  check_machine(writer, "writer");
  Message msg;
  msg.round = round_;
  msg.writer = writer;
  msg.column_bits.assign(1, bits);
  if (tracing_) trace_.push_back({round_, writer, payload.size(), 0.0, 0.0});
  msg.payload = std::move(payload);
  ledger_.charge(round_, writer, bits);
  messages_.push_back(std::move(msg));
  return messages_.size() - 1;
}

void Blackboard::post_answer(int writer, std::uint64_t bits) {
  check_machine(writer, "writer");
  ledger_.charge(round_, writer, bits);
  if (tracing_) trace_.push_back({round_, writer, 1, 0.0, 0.0});
}

const Matrix& Blackboard::read(int reader, MessageId id) const {
  check_machine(reader, "reader");
  if (id >= messages_.size()) throw MisuseError("unknown message id " + std::to_string(id));
  const Message& msg = messages_[id];
  if (msg.retired) throw MisuseError("message " + std::to_string(id) + " has been retired");
  const bool visible = msg.round < round_ || (msg.round == round_ && msg.writer == reader);
  if (!visible) {
    throw AccessViolation("machine " + std::to_string(reader) + " cannot read round-" +
                          std::to_string(msg.round) + " message of machine " +
                          std::to_string(msg.writer) + " during round " + std::to_string(round_));
  }
  return msg.payload;
}

Vector Blackboard::read_vector(int reader, MessageId id) const {
  const Matrix& m = read(reader, id);
  if (m.cols() != 1) throw MisuseError("message " + std::to_string(id) + " is a block, not a vector");
  return m.col(0);
}

const std::vector<std::uint64_t>& Blackboard::column_bits(MessageId id) const {
  if (id >= messages_.size()) throw MisuseError("unknown message id " + std::to_string(id));
  return messages_[id].column_bits;
}

void Blackboard::retire_before(std::uint64_t round) {
  for (auto& msg : messages_) {
    if (msg.round < round && !msg.retired) {
      msg.retired = true;
      msg.payload = Matrix();
    }
  }
}

CounterStream& Blackboard::public_coin(std::uint64_t seed) {
  if (coin_) throw MisuseError("public coin already seeded for this protocol run");
  coin_.emplace(seed);
  return *coin_;
}

CounterStream& Blackboard::coin() {
  if (!coin_) throw MisuseError("public coin has not been seeded");
  return *coin_;
}

void Blackboard::write_trace(std::ostream& out) const {
  out << "round,writer,length,R,tau\n";
  for (const auto& t : trace_) {
    out << t.round << ',' << t.writer << ',' << t.length << ',' << t.range << ',' << t.tau << '\n';
  }
}

Vector Machine::apply(const Vector& v) const {
  if (v.size() != n()) throw DimensionMismatch("machine apply: vector length mismatch");
  Vector y;
  kernels::sym_matvec_parallel(shard_.matrix.dense(), v, y);
  return y;
}

Matrix Machine::apply(const Matrix& block) const {
  if (block.rows() != n()) throw DimensionMismatch("machine apply: block height mismatch");
  Matrix y;
  kernels::sym_matmat_parallel(shard_.matrix.dense(), block, y);
  return y;
}

Cluster::Cluster(std::vector<PsdShard> shards) {
  if (shards.empty()) throw InvalidArgument("a cluster needs at least one shard");
  const Eigen::Index n = shards.front().matrix.n();
  for (std::size_t i = 0; i < shards.size(); ++i) {
    if (shards[i].machine_index != static_cast<int>(i) + 1) {
      throw InvalidArgument("machine indices must be 1..m in order");
    }
    if (shards[i].matrix.n() != n) throw DimensionMismatch("all shards must share one dimension");
    machines_.emplace_back(std::move(shards[i]));
  }
}

const Machine& Cluster::machine(int index) const {
  if (index < 1 || index > size()) {
    throw AccessViolation("no machine with index " + std::to_string(index));
  }
  return machines_[index - 1];
}

const SymMatrix& Cluster::shard(int requester, int owner) const {
  const Machine& m = machine(owner);
  if (requester != owner) {
    throw AccessViolation("machine " + std::to_string(requester) + " may not read the shard of machine " +
                          std::to_string(owner));
  }
  return m.shard_.matrix;
}

void Cluster::validate_psd(double tol) const {
  for (const auto& m : machines_) {
    const Vector ev = eigenvalues_desc(m.shard_.matrix);
    if (ev(ev.size() - 1) < -tol) {
      throw NotPsd("shard of machine " + std::to_string(m.index()) + " has eigenvalue " +
                   std::to_string(ev(ev.size() - 1)));
    }
  }
}

double Cluster::sum_norm_estimate(int iterations) const {
  const Eigen::Index dim = n();
  Vector x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x(i) = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  x.normalize();
  auto apply_sum = [this](const Vector& v) {
    Vector acc = Vector::Zero(v.size());
    for (const auto& m : machines_) acc += m.apply(v);
    return acc;
  };
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector y = apply_sum(x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    estimate = std::max(estimate, x.dot(y));
    x = y / norm;
  }
  return std::max(estimate, x.dot(apply_sum(x)));
}

void Cluster::validate_spectrum(double tol) const {
  const double est = sum_norm_estimate();
  if (est > 1.0 + tol) {
    throw SpectrumViolation("||sum A_i||_2 estimate " + std::to_string(est) + " exceeds 1");
  }
}

}  // namespace grank
