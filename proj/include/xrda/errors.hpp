#pragma once

#include <stdexcept>
#include <string>

namespace xrda {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a mirror map (or overflowed it).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Unsupported or inconsistent configuration, detected before any iteration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A schedule left the feasible set of the convergence theorem mid-run.
class ScheduleViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace xrda
