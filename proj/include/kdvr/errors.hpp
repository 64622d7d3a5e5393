#pragma once

#include <stdexcept>
#include <string>

namespace kdvr {

/// Requested coefficients lie below the guaranteed truncation depth of an operand.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

/// An operand does not have the required normal form.
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// An internal identity that the construction guarantees failed to hold.
struct ConsistencyError : std::logic_error {
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace kdvr
