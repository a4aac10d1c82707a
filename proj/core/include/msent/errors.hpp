#pragma once

#include <stdexcept>
#include <string>

namespace msent {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or arguments outside an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. |x| >= R).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mismatched supports, ladders or level specs.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Geometric mixture p^l q^(1-l) vanishes everywhere.
class DegenerateTilt : public Error {
 public:
  using Error::Error;
};

/// A finite set or product set is too large to enumerate.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

/// A risk bound whose denominator is non-positive.
class BoundInapplicable : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace msent
