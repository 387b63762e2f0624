#pragma once

#include <stdexcept>
#include <string>

namespace mpsm {

// Bad sizes, shapes or configuration values supplied by the caller.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Numerical precondition broken (non-Hermitian input, indefinite matrix, ...).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class DegeneratePolar : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Exponential-map coordinates outside the principal branch (x-hat eigenvalue >= pi/2).
class OutOfBranch : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Dense d^N objects larger than the desk-scale guard.
class ResourceLimit : public std::length_error {
public:
  using std::length_error::length_error;
};

class NonInvertibleSeries : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

class InsufficientData : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpsm
