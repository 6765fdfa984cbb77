#pragma once

#include <stdexcept>
#include <string>

namespace beware {

enum class ErrorCode {
  InvalidArgument,
  IndexOutOfRange,
  DuplicateObservation,
  DimensionMismatch,
  SingularSystem,
  EmptyAllowedSet,
  Unavailable,
  ParseError,
  IoError,
  InsufficientData,
  LengthMismatch,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can translate it into a status value without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the CSV reader; line is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace beware
