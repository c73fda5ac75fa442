#pragma once

#include <stdexcept>
#include <string>

namespace msfa {

// Base of every error raised by the library. The CLI maps ValidationError
// and InfeasibleRateError to usage-style failures and everything else to
// data/format failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// Zero-variance band or too few positions to form a statistic.
class DegenerateStatisticsError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// Fractional power of a non-positive base and similar numeric domain faults.
class DomainError : public Error {
public:
    using Error::Error;
};

class InfeasibleRateError : public Error {
public:
    using Error::Error;
};

// A file could not be opened, written or moved into place.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace msfa
