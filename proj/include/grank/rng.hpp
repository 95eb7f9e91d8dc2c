#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace grank {

/// 64-bit mix of (key, counter); the stateless core of every random stream.
/// SplitMix64 finalizer applied to the key, then to key ^ counter.
std::uint64_t mix64(std::uint64_t key, std::uint64_t counter) noexcept;

/// Sub-seed derivation: hash64(master, a, b).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Inverse of the standard normal CDF.  Acklam's rational approximation
/// followed by one Halley step against std::erfc, giving ~1e-15 relative accuracy.
double normal_quantile(double u);

/// Counter-based stream keyed by a 64-bit seed.  Draw k is a pure function of
/// (seed, k), so two holders of the same seed observe identical streams.
/// Uniforms are the top 53 bits of mix64 mapped to the open interval (0,1);
/// Gaussians are normal_quantile(uniform), one uniform per variate.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept { return mix64(seed_, counter_++); }
  double uniform() noexcept;
  double gaussian() { return normal_quantile(uniform()); }

  Eigen::VectorXd gaussian_vector(Eigen::Index n);
  /// Column-major fill, column by column.
  Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace grank
