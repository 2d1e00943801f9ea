#pragma once

#include <stdexcept>
#include <string>

namespace despeckle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dims, even window, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed image file. `field()` names the offending header field or
/// "payload".
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A pipeline stage produced non-finite values or otherwise failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace despeckle
