#pragma once

#include <stdexcept>
#include <string>

namespace mtw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, bad tolerances, broken preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The potential (or a derivative of it) came back non-finite.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Energy drift or symplectic-identity violation beyond tolerance, or a
/// non-finite state during integration.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// No shooting start converged.
class NoSolutionError : public Error {
 public:
  using Error::Error;
};

/// Shooting starts converged to distinct initial velocities.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// The endpoint map is singular (conjugate point); the Jacobi map is undefined.
class ConjugatePointError : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil left the admissible set (conjugate-free and
/// shooting-regular pairs).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or extrapolation failed its self-consistency check.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Every sample of a scan was excluded.
class EmptyScanError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtw
