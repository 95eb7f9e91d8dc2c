#include "grank/datagen.hpp"

#include "grank/error.hpp"
#include "grank/matrix_io.hpp"

#include <fstream>
#include <string>

namespace grank::datagen {

void SpikedCovConfig::validate() const {
  if (n < 1 || m < 1 || samples_per_machine < 1) {
    throw InvalidArgument("spiked covariance needs n, m, samples_per_machine >= 1");
  }
  if (r < 0 || r > n) throw InvalidArgument("planted rank must satisfy 0 <= r <= n");
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
  if (!(sigma2 >= 0.0)) throw InvalidArgument("sigma2 must be >= 0");
}

Matrix haar_orthogonal(Eigen::Index n, CounterStream& rng) {
  const Matrix g = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

// Orthonormal n x r frame, uniform on the Stiefel manifold.
Matrix haar_frame(Eigen::Index n, Eigen::Index r, CounterStream& rng) {
  const Matrix g = rng.gaussian_matrix(n, r);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  const Matrix& rr = qr.matrixQR();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (rr(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace

ShardSet spiked_covariance_shards(const SpikedCovConfig& cfg) {
  cfg.validate();
  CounterStream rng(cfg.seed);
  const Matrix u = haar_frame(cfg.n, cfg.r, rng);
  const double total = static_cast<double>(cfg.samples_per_machine) * cfg.m;
  const double signal = std::sqrt(cfg.lambda);
  const double noise = std::sqrt(cfg.sigma2);

  ShardSet out;
  out.planted_rank = cfg.r;
  std::vector<Matrix> local;
  for (int i = 1; i <= cfg.m; ++i) {
    const Matrix za = rng.gaussian_matrix(cfg.r, cfg.samples_per_machine);
    const Matrix ze = rng.gaussian_matrix(cfg.n, cfg.samples_per_machine);
    const Matrix x = signal * (u * za) + noise * ze;
    Matrix a = Matrix::Zero(cfg.n, cfg.n);
    a.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / total);
    local.push_back(a.selfadjointView<Eigen::Lower>());
  }
  for (int i = 0; i < cfg.m; ++i) out.shards.push_back({i + 1, SymMatrix(std::move(local[i]))});

  if (cfg.normalize == Normalize::clip) {
    const double norm = Cluster(out.shards).sum_norm_estimate(100);
    if (norm > 1.0) {
      out.scale = 1.0 / norm;
      for (auto& s : out.shards) s.matrix = s.matrix.scaled(out.scale);
    }
  }
  return out;
}

std::vector<PsdShard> planted_spectrum_shards(Eigen::Index n, int m, const Vector& eigenvalues,
                                              std::uint64_t seed, SplitMode mode) {
  if (n < 1 || m < 1) throw InvalidArgument("planted spectrum needs n, m >= 1");
  if (eigenvalues.size() != n) {
    throw InvalidArgument("planted spectrum needs exactly n eigenvalues");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(eigenvalues(i) >= 0.0 && eigenvalues(i) <= 1.0)) {
      throw InvalidArgument("planted eigenvalues must lie in [0, 1]");
    }
  }
  CounterStream rng(seed);
  const Matrix v = haar_orthogonal(n, rng);
  std::vector<PsdShard> shards;
  if (mode == SplitMode::even) {
    const Matrix a = v * (eigenvalues / m).asDiagonal() * v.transpose();
    for (int i = 1; i <= m; ++i) shards.push_back({i, SymMatrix(Matrix(0.5 * (a + a.transpose())))});
    return shards;
  }
  // Column k of B = V sqrt(Lambda) is shared out with weights w_{ik} >= 0, sum_i w_{ik} = 1.
  const Matrix b = v * eigenvalues.cwiseSqrt().asDiagonal();
  Matrix w(m, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += (w(i, k) = rng.uniform());
    w.col(k) /= s;
  }
  for (int i = 0; i < m; ++i) {
    const Matrix a = b * w.row(i).transpose().asDiagonal() * b.transpose();
    shards.push_back({i + 1, SymMatrix(Matrix(0.5 * (a + a.transpose())))});
  }
  return shards;
}

std::pair<Matrix, Matrix> orthogonal_ensemble_pair(Eigen::Index n, Eigen::Index r, std::uint64_t seed) {
  if (r < 1 || 4 * r > n) throw InvalidArgument("orthogonal ensemble pair needs 1 <= r <= n/4");
  CounterStream rng(seed);
  Matrix q1 = haar_orthogonal(n, rng).topRows(r);
  Matrix q2 = haar_orthogonal(n, rng).topRows(r);
  return {std::move(q1), std::move(q2)};
}

SymMatrix sum_shards(const std::vector<PsdShard>& shards) {
  if (shards.empty()) throw InvalidArgument("no shards to sum");
  SymMatrix acc = shards.front().matrix;
  for (std::size_t i = 1; i < shards.size(); ++i) acc = acc + shards[i].matrix;
  return acc;
}

void write_shard_set(const std::filesystem::path& dir, const std::vector<PsdShard>& shards,
                     const nlohmann::json& manifest) {
  std::filesystem::create_directories(dir);
  nlohmann::json doc = manifest;
  doc["shards"] = nlohmann::json::array();
  for (const auto& s : shards) {
    const std::string name = "machine_" + std::to_string(s.machine_index) + ".grnk";
    io::write_matrix(dir / name, s.matrix);
    doc["shards"].push_back(name);
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << doc.dump(2) << '\n';
}

std::vector<PsdShard> read_shard_files(const std::vector<std::filesystem::path>& files) {
  std::vector<PsdShard> shards;
  for (std::size_t i = 0; i < files.size(); ++i) {
    shards.push_back({static_cast<int>(i) + 1, io::read_matrix(files[i])});
  }
  return shards;
}

nlohmann::json to_json(const SpikedCovConfig& cfg) {
  return nlohmann::json{{"n", cfg.n},
                        {"m", cfg.m},
                        {"samples_per_machine", cfg.samples_per_machine},
                        {"r", cfg.r},
                        {"lambda", cfg.lambda},
                        {"sigma2", cfg.sigma2},
                        {"seed", cfg.seed},
                        {"normalize", cfg.normalize == Normalize::clip ? "clip" : "none"}};
}

}  // namespace grank::datagen
