#pragma once

#include <stdexcept>
#include <string>

namespace subdiff {

/// Malformed input: bad config, unparsable expression, inconsistent sizes.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: solver non-convergence, data floor violation,
/// non-finite field values.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subdiff
