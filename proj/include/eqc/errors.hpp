#pragma once

#include <stdexcept>
#include <string>

namespace eqc {

// Raised when an argument lies outside the domain of an operation
// (e.g. rho outside [0, 1), n < 1, a probability outside (0, 1)).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when an operation is asked for a value it cannot deliver even though
// every argument is individually valid (e.g. an unattainable FPP target).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when an iterative method fails: a root is not bracketed, a
// quadrature does not converge, a dense factorization is not positive definite.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace eqc
