#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fluidnav {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query point within tolerance of a singularity center.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

// Point lies strictly inside a singularity disk where a caller required the exterior.
class InsideCylinder : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class RootInsideCylinder : public Error {
 public:
  using Error::Error;
};

// Flow speed vanishes, so the streamline direction is undefined.
class StagnationPoint : public Error {
 public:
  using Error::Error;
};

class UnknownAgent : public Error {
 public:
  using Error::Error;
};

class AlreadyFaulty : public Error {
 public:
  using Error::Error;
};

// Goal offsets of a cluster sum to (numerically) zero.
class AllAtGoal : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, int line, int column)
      : Error(std::move(message)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

// A scenario that fails validation. `diagnostics` holds one entry per
// offending field, each prefixed with the field path.
class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(std::vector<std::string> diagnostics)
      : Error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out.empty() ? std::string("invalid scenario") : out;
  }

  std::vector<std::string> diagnostics_;
};

class SchemaError : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

// Violates one of the per-regime structural rules (fixed heading, cluster count, ...).
class RegimeError : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

}  // namespace fluidnav
