#pragma once

#include <stdexcept>
#include <string>

namespace chowla {

// All library failures derive from Error so the CLI can map them to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

// A requested precision or cost cap cannot be met.
class BudgetError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Rounding of a class number landed too close to a half-integer.
class AmbiguousRoundingError : public Error {
public:
    using Error::Error;
};

} // namespace chowla
