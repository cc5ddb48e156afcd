#pragma once

#include <stdexcept>
#include <string>

namespace npfaber {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the region where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The map is not conformal at the requested point (vanishing derivative).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A linear system is numerically singular. For the resolvent this signals
/// that lambda sits on the spectrum (plasmonic resonance).
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Sizes or preconditions of arguments do not match.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Equal permittivities inside and outside the inclusion.
class ContrastError : public Error {
 public:
  using Error::Error;
};

class EigensolverError : public Error {
 public:
  using Error::Error;
};

/// The sampled curve has a cusp, a corner, or is not resolved by its samples.
class CuspError : public Error {
 public:
  using Error::Error;
};

/// A sampled curve encloses no area, so no orientation can be assigned.
class OrientationError : public Error {
 public:
  using Error::Error;
};

/// The capacity estimate came out with a significant imaginary part.
class NonRealError : public Error {
 public:
  using Error::Error;
};

}  // namespace npfaber
