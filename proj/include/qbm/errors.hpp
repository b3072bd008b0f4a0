#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Requested dimension exceeds the dense backend cap, or shapes disagree.
class DimensionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented invariant (non-Hermitian, non-finite, ...).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad geometry, schedule parameters or experiment config.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Caller did not supply information the operation requires.
class ContractError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Training diverged (non-finite parameters).
class NumericalAbort : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace qbm
