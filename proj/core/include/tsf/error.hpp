#pragma once

#include <stdexcept>
#include <string>

namespace tsf {

/// Malformed or inconsistent input data (missing file, bad date, gap in months).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation produced a non-finite value or failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid experiment or CLI configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace tsf
