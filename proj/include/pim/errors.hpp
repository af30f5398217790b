#pragma once

#include <stdexcept>
#include <string>

namespace pim {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

class InvalidRiskAversionError : public Error {
public:
    using Error::Error;
};

/// A solver that should converge under the standing assumptions did not.
class NumericFailure : public Error {
public:
    using Error::Error;
};

/// Overflow or underflow while evaluating a field by quadrature.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The conjugate system F_v = u, F_x = y has no solution reachable by Newton.
class ConjugateInfeasibleError : public Error {
public:
    using Error::Error;
};

class UnsupportedPayoffError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace pim
