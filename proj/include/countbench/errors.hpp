#pragma once

#include <stdexcept>
#include <string>

namespace countbench {

/// Thrown when a caller violates an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a construction hits a numerically degenerate case it refuses to
/// resolve by guessing (e.g. a vanishing morphism whose sign would be arbitrary).
class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace countbench
