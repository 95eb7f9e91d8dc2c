#include "grank/matrix_io.hpp"

#include "grank/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

namespace grank::io {

namespace {

static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint16_t>;
  U bits;
  std::memcpy(&bits, &value, sizeof(T));
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint16_t>;
  std::array<unsigned char, sizeof(T)> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw IoError("truncated GRNK stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

}  // namespace

void write_binary(std::ostream& out, const SymMatrix& a) {
  out.write(kMagic, 4);
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(a.n()));
  for (Eigen::Index i = 0; i < a.n(); ++i) {
    for (Eigen::Index j = 0; j < a.n(); ++j) put_le<double>(out, a(i, j));
  }
  if (!out) throw IoError("failed writing GRNK stream");
}

SymMatrix read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError("missing GRNK magic");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kFormatVersion) {
    throw IoError("unsupported GRNK version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(in);
  if (n == 0 || n > (1u << 20)) throw IoError("implausible GRNK dimension " + std::to_string(n));
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get_le<double>(in);
  }
  return SymMatrix(std::move(m));
}

void write_text(std::ostream& out, const SymMatrix& a) {
  out << a.n() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < a.n(); ++i) {
    for (Eigen::Index j = 0; j < a.n(); ++j) {
      if (j) out << ' ';
      out << a(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing text matrix");
}

SymMatrix read_text(std::istream& in) {
  long long n = 0;
  if (!(in >> n) || n < 1) throw IoError("text matrix: bad dimension line");
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(in >> m(i, j))) throw IoError("text matrix: expected " + std::to_string(n * n) + " entries");
    }
  }
  return SymMatrix(std::move(m), 1e-9);
}

SymMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_binary(in) : read_text(in);
}

void write_matrix(const std::filesystem::path& path, const SymMatrix& a, bool text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  if (text) {
    write_text(out, a);
  } else {
    write_binary(out, a);
  }
}

}  // namespace grank::io
