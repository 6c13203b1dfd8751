#pragma once

#include <stdexcept>
#include <string>

namespace modelspace {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Boundary evaluation requested within the refusal radius of a spectrum point.
class BoundarySpectrumPoint : public Error {
public:
    using Error::Error;
};

class PoleInside : public Error {
public:
    using Error::Error;
};

// A certified subdivision ran out of its cell budget before reaching tolerance.
class ResolutionExhausted : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class UndefinedDiagonal : public Error {
public:
    using Error::Error;
};

class PoleOnEvaluation : public Error {
public:
    using Error::Error;
};

class EigenFailure : public Error {
public:
    using Error::Error;
};

class RootRefinementFailure : public Error {
public:
    using Error::Error;
};

class EmptyComplement : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace modelspace
