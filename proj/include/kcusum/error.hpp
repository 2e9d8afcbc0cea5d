#pragma once

#include <stdexcept>
#include <string>

namespace kcusum {

// Error categories surfaced by the library. The CLI maps every one of them
// to exit code 2.

/// Malformed or inconsistent input data (dimension mismatch, NaN, empty sets).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration parameter (delta <= 0, nonpositive drift, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// API misuse, e.g. stepping a detector that has already alarmed.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Runtime data problem, e.g. an exhausted reference database.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested bound needs d_k(p0,p1)^2 > delta and it does not hold.
class UndetectableChangeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace kcusum
