#pragma once

#include <stdexcept>
#include <string>

namespace debm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension out of the supported range, or two objects of different dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A coordinate or component index outside its valid range.
class IndexError : public Error {
public:
    using Error::Error;
};

/// Parameter vector of the wrong length or with non-finite entries.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A value outside the domain where a quantity is defined (e.g. x not in A,
/// generalized score matching at R = 0 or R = 1, non-normalized tables).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A matrix that had to be inverted (or have a log-determinant) is singular.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double eigenvalue)
        : Error(what), eigenvalue_(eigenvalue) {}

    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Malformed input file or document.
class InputError : public Error {
public:
    using Error::Error;
};

/// The optimizer could not make progress.
class FitError : public Error {
public:
    using Error::Error;
};

} // namespace debm
