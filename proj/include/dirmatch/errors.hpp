#pragma once

#include <stdexcept>
#include <string>

namespace dirmatch {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct DegenerateGeometry : Error {
  explicit DegenerateGeometry(const std::string& msg) : Error(msg) {}
};

struct DegenerateNeighborhood : Error {
  explicit DegenerateNeighborhood(const std::string& msg) : Error(msg) {}
};

struct IndexOutOfRange : Error {
  explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

struct ConvergenceFailure : Error {
  ConvergenceFailure(const std::string& msg, int converged_count)
      : Error(msg), converged(converged_count) {}
  int converged;
};

struct EmptyAnchorSet : Error {
  explicit EmptyAnchorSet(const std::string& msg) : Error(msg) {}
};

struct EmptyNeighborhood : Error {
  explicit EmptyNeighborhood(const std::string& msg) : Error(msg) {}
};

struct DisconnectedMesh : Error {
  explicit DisconnectedMesh(const std::string& msg) : Error(msg) {}
};

struct BudgetExceeded : Error {
  explicit BudgetExceeded(const std::string& msg) : Error(msg) {}
};

}  // namespace dirmatch
