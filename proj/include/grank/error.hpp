#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace grank {

/// Base class for every error raised by the library.  `kind()` is a stable
/// machine-readable tag used in the CLI's JSON error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error("dimension-mismatch", what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::size_t iterations)
      : Error("solver-failure", what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class NotPsd : public Error {
 public:
  explicit NotPsd(const std::string& what) : Error("not-psd", what) {}
};

class RankCapExceeded : public Error {
 public:
  explicit RankCapExceeded(const std::string& what) : Error("rank-cap-exceeded", what) {}
};

class DegreeExhausted : public Error {
 public:
  explicit DegreeExhausted(const std::string& what) : Error("degree-exhausted", what) {}
};

class ProtocolAbort : public Error {
 public:
  explicit ProtocolAbort(const std::string& what) : Error("protocol-abort", what) {}
};

class SpectrumViolation : public Error {
 public:
  explicit SpectrumViolation(const std::string& what) : Error("spectrum-violation", what) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& what) : Error("out-of-range", what) {}
};

/// Misuse of the blackboard API (re-seeding the public coin, reading a retired message, ...).
class MisuseError : public Error {
 public:
  explicit MisuseError(const std::string& what) : Error("misuse", what) {}
};

/// A machine tried to observe something it is not entitled to see.
class AccessViolation : public Error {
 public:
  explicit AccessViolation(const std::string& what) : Error("access-violation", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace grank
