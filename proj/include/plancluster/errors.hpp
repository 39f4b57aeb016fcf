#pragma once

#include <stdexcept>
#include <string>

namespace plancluster {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad schema, unparsable numbers, non-monotone times.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose content violates a semantic invariant
/// (e.g. a spline that is discontinuous at a breakpoint).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. evaluating past t_f).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration: unknown labels, bad cut criteria, mismatched
/// dimensions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace plancluster
