#pragma once

#include <stdexcept>
#include <string>

namespace nlsl {

// Base for every error raised by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Objects defined on incompatible intervals.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Magnitudes outside what scaled arithmetic can represent.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Two computation routes for the same quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Evaluation too close to a pole of a meromorphic quantity.
class PoleError : public Error {
 public:
  using Error::Error;
};

// The argument-principle contour passes too close to a zero.
class ContourError : public Error {
 public:
  using Error::Error;
};

// phi and theta are not collinear at a supposed simple zero of omega.
class CollinearityError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlsl
