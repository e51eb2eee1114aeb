#pragma once

#include <stdexcept>
#include <string>

namespace qfi {

// Base class for every error this library can raise.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SolverFailure : public Error {
public:
    using Error::Error;
};

class HorizonNotConverged : public Error {
public:
    using Error::Error;
};

class QuadratureNotConverged : public Error {
public:
    using Error::Error;
};

class StepTooSmall : public Error {
public:
    using Error::Error;
};

class UnsupportedFamily : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class BracketNotFound : public Error {
public:
    using Error::Error;
};

class NoImprovement : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace qfi
