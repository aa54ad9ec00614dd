#pragma once

#include <stdexcept>
#include <string>

namespace flr {

// Base type for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (CSV tables, case files, sim configs).
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input that violates a domain constraint.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace flr
