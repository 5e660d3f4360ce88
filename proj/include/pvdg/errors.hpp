#pragma once

#include <stdexcept>
#include <string>

namespace pvdg {

/// Arguments outside an operation's documented domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (CSV rows, configuration documents).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pvdg
