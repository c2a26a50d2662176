#pragma once

#include <stdexcept>
#include <string>

namespace ulln {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition on an argument violated (empty sample, q outside (0,1), ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// h (or h') evaluated at a point of its singular set.
class SingularityError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Adaptive refinement did not settle: the integral is treated as infinite.
class NonIntegrableError : public Error {
public:
    using Error::Error;
};

class InvalidPsiError : public Error {
public:
    using Error::Error;
};

class RegimeError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ulln
