#pragma once

#include <stdexcept>
#include <string>

namespace gradcomp {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine exhausted its iteration budget.
class NotConverged : public Error {
 public:
  using Error::Error;
};

/// A closed-loop matrix was (or became) unstable where stability is required.
class SpectralRadiusError : public Error {
 public:
  using Error::Error;
};

class NotStabilizable : public Error {
 public:
  using Error::Error;
};

/// A rollout or an oracle produced a non-finite / exploding value.
class Diverged : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

/// Bounded-update-direction constants are outside the admissible range.
class InvalidRegime : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gradcomp
