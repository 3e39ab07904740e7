#pragma once

#include <stdexcept>
#include <string>

namespace qfboot {

/// Malformed or non-finite input data.
class InvalidInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Out-of-range scalar argument (probability outside (0,1), zero count, ...).
class InvalidArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Array or matrix shapes that do not line up.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Matrix expected to be positive semidefinite has a genuinely negative eigenvalue.
class NotPsdError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Too many bootstrap replicates failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qfboot
