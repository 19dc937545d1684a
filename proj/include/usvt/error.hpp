#pragma once

#include <stdexcept>
#include <string>

namespace usvt {

/// Bad arguments or violated preconditions. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A kernel produced a value outside [0,1], or a matrix broke the
/// edge-probability invariants.
class ModelValidityError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

/// File system failures. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not deliver a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string &message) {
  if (!condition)
    throw ValidationError(message);
}

} // namespace detail
} // namespace usvt
