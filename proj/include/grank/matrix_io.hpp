#pragma once

#include "grank/sym_matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>

namespace grank::io {

// Binary layout: "GRNK" | u16 version | u64 n | n*n f64, all little-endian, row-major.
inline constexpr char kMagic[4] = {'G', 'R', 'N', 'K'};
inline constexpr std::uint16_t kFormatVersion = 1;

void write_binary(std::ostream& out, const SymMatrix& a);
SymMatrix read_binary(std::istream& in);

/// Plain text: first line n, then n lines of n whitespace-separated decimals.
void write_text(std::ostream& out, const SymMatrix& a);
SymMatrix read_text(std::istream& in);

/// Sniffs the magic and dispatches to the binary or text reader.
SymMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const SymMatrix& a, bool text = false);

}  // namespace grank::io
