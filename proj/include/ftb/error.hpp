#pragma once

#include <stdexcept>
#include <string>

namespace ftb {

/// Malformed input: invalid measures, constraints, files or arguments.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Dimension mismatch or a feature requested in an unsupported dimension.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace ftb
