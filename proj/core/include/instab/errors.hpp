#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace instab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the operation's domain (zero vector, n < 2, singular
/// matrix, point not in a parabolic, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed representation DSL or input file. `position` is a 0-based
/// character offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// The input vector is (or looks) stable, so no instability data exists.
class StableInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace instab
