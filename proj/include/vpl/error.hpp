#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vpl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidLetter : public Error {
 public:
  explicit InvalidLetter(char letter)
      : Error(std::string("letter '") + letter + "' is not in the alphabet"), letter_(letter) {}
  explicit InvalidLetter(const std::string& message) : Error(message) {}
  char letter() const noexcept { return letter_; }

 private:
  char letter_ = '\0';
};

class NotWellMatched : public Error {
 public:
  using Error::Error;
};

class MalformedTables : public Error {
 public:
  using Error::Error;
};

/// A composed context operation that should exist by closure is missing.
class ClosureViolation : public Error {
 public:
  using Error::Error;
};

class NotACongruence : public Error {
 public:
  NotACongruence(const std::string& message, std::size_t op, std::size_t x, std::size_t y)
      : Error(message), op_(op), x_(x), y_(y) {}
  std::size_t op() const noexcept { return op_; }
  std::size_t x() const noexcept { return x_; }
  std::size_t y() const noexcept { return y_; }

 private:
  std::size_t op_;
  std::size_t x_;
  std::size_t y_;
};

class SizeCapExceeded : public Error {
 public:
  using Error::Error;
};

class UndefinedRun : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  using Error::Error;
};

class MalformedAutomaton : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace vpl
