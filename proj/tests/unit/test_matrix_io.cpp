#include <doctest.h>

#include "grank/error.hpp"
#include "grank/matrix_io.hpp"
#include "grank/rng.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace grank;

namespace {

SymMatrix sample(Eigen::Index n) {
  CounterStream rng(21);
  Matrix g = rng.gaussian_matrix(n, n);
  return SymMatrix(g + g.transpose());
}

}  // namespace

TEST_CASE("binary format round trip is exact") {
  SymMatrix a = sample(9);
  std::stringstream buf;
  io::write_binary(buf, a);
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 4 + 2 + 8 + 81 * 8);
  CHECK(bytes.substr(0, 4) == "GRNK");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[5]) == 0);
  CHECK(static_cast<unsigned char>(bytes[6]) == 9);
  SymMatrix b = io::read_binary(buf);
  CHECK(b.dense() == a.dense());
}

TEST_CASE("binary reader rejects damaged input") {
  std::stringstream bad_magic("XXXX");
  CHECK_THROWS_AS(io::read_binary(bad_magic), IoError);

  std::stringstream buf;
  io::write_binary(buf, sample(4));
  std::string truncated = buf.str().substr(0, 40);
  std::stringstream t(truncated);
  CHECK_THROWS_AS(io::read_binary(t), IoError);
}

TEST_CASE("text format round trip") {
  SymMatrix a = sample(5);
  std::stringstream buf;
  io::write_text(buf, a);
  SymMatrix b = io::read_text(buf);
  CHECK((a.dense() - b.dense()).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream small("2\n1 0.5\n0.5 2\n");
  SymMatrix c = io::read_text(small);
  CHECK(c(0, 1) == 0.5);
  CHECK(c(1, 1) == 2.0);

  std::stringstream short_rows("2\n1 0.5\n0.5\n");
  CHECK_THROWS_AS(io::read_text(short_rows), IoError);
}

TEST_CASE("read_matrix sniffs the format") {
  const auto dir = std::filesystem::temp_directory_path() / "grank_io_test";
  std::filesystem::create_directories(dir);
  SymMatrix a = sample(6);
  io::write_matrix(dir / "a.grnk", a);
  io::write_matrix(dir / "a.txt", a, true);
  CHECK(io::read_matrix(dir / "a.grnk").dense() == a.dense());
  CHECK((io::read_matrix(dir / "a.txt").dense() - a.dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(io::read_matrix(dir / "missing.grnk"), IoError);
  std::filesystem::remove_all(dir);
}
