#pragma once

#include <stdexcept>
#include <string>

namespace wavetrace {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symbol evaluation left its smooth domain (sqrt of a negative real,
/// division by zero, a derivative order the profile does not store).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The eigenvalue separation hypothesis fails: <xi>_b is below the gap tolerance.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size underflowed.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// A ray reached the <xi>_b floor; raised only where a caller asks for a hard failure.
class DegenerateEvent : public Error {
 public:
  using Error::Error;
};

/// No admissible (eta, beta) pair exists for the Coriolis profile.
class ProfileAssumptionError : public Error {
 public:
  using Error::Error;
};

/// A sample of the Mourre set has xi1 <= 0.
class Cond2Violation : public Error {
 public:
  using Error::Error;
};

/// The profile cannot live on the requested periodic box.
class ProfileBoxMismatch : public Error {
 public:
  using Error::Error;
};

/// A wave packet center is too close to the box edge.
class MarginError : public Error {
 public:
  using Error::Error;
};

/// Scenario or argument validation failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wavetrace
