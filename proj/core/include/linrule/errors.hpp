#pragma once

#include <stdexcept>
#include <string>

namespace linrule {

// Precondition violated by the caller (bad dimension, negative variance, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A spectral transform left the representable range of double.
class NumericOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Nadaraya-Watson kernel mass underflowed to zero at a test point.
class DegenerateKernel : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed experiment configuration or mismatched result tables.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An output file or directory could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace linrule
