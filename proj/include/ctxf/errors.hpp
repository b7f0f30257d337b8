#pragma once

#include <stdexcept>
#include <string>

namespace ctxf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions, residues out of range, malformed structures.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Text that cannot be parsed as a group, element, turn or equation.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A K-valued system with an integer relation that does not annihilate its rhs.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Ring action of Z_q on a module with exponent not dividing q.
class ModulusError : public Error {
 public:
  using Error::Error;
};

// Circle-valued input where only K-valued systems make sense (or vice versa).
class UnsupportedValueGroupError : public Error {
 public:
  using Error::Error;
};

// A result that should exist by construction could not be produced or verified.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ctxf
