#pragma once

#include "grank/blackboard.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace grank::datagen {

enum class Normalize { none, clip };

/// x = a + eps with a ~ N(0, lambda U U^T), eps ~ N(0, sigma2 I), U an n x r
/// orthonormal frame drawn uniformly.  Machine i holds
/// A_i = (1 / sum_j N_j) sum_{samples of i} x x^T.
struct SpikedCovConfig {
  Eigen::Index n = 1000;
  int m = 2;
  Eigen::Index samples_per_machine = 1000;
  int r = 100;
  double lambda = 0.4;
  double sigma2 = 0.1;
  std::uint64_t seed = 0;
  Normalize normalize = Normalize::clip;

  void validate() const;
};

struct ShardSet {
  std::vector<PsdShard> shards;
  int planted_rank = 0;
  /// Factor applied to every shard by the clip normalization (1 when untouched).
  double scale = 1.0;
};

ShardSet spiked_covariance_shards(const SpikedCovConfig& cfg);

enum class SplitMode {
  even,   ///< A_i = A / m
  random  ///< A_i = B diag(w_i) B^T with B B^T = A and random weights summing to one
};

/// A = V diag(eigenvalues) V^T with Haar-random V, split across m machines.
std::vector<PsdShard> planted_spectrum_shards(Eigen::Index n, int m, const Vector& eigenvalues,
                                              std::uint64_t seed, SplitMode mode = SplitMode::even);

/// Haar-distributed n x n orthogonal matrix: QR of a Gaussian matrix with the
/// signs of R's diagonal folded into Q.
Matrix haar_orthogonal(Eigen::Index n, CounterStream& rng);

/// Two independent r x n matrices with orthonormal rows, each the first r rows
/// of a Haar orthogonal matrix.  Requires r <= n / 4.
std::pair<Matrix, Matrix> orthogonal_ensemble_pair(Eigen::Index n, Eigen::Index r, std::uint64_t seed);

/// Sum of all shards (test and oracle use only).
SymMatrix sum_shards(const std::vector<PsdShard>& shards);

/// One GRNK file per machine (machine_<i>.grnk) plus manifest.json.
void write_shard_set(const std::filesystem::path& dir, const std::vector<PsdShard>& shards,
                     const nlohmann::json& manifest);
std::vector<PsdShard> read_shard_files(const std::vector<std::filesystem::path>& files);

nlohmann::json to_json(const SpikedCovConfig& cfg);

}  // namespace grank::datagen
