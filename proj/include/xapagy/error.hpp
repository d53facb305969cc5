#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xapagy {

/// Base of every recoverable error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent domain-knowledge file.
class DomainError : public Error {
 public:
  DomainError(std::size_t line, const std::string& what)
      : Error("domain line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Xapi syntax error. `column` is the 1-based character offset in the statement.
class ParseError : public Error {
 public:
  ParseError(std::size_t column, const std::string& what)
      : Error("column " + std::to_string(column) + ": " + what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class UnknownWordError : public ParseError {
 public:
  UnknownWordError(std::string word, std::size_t column)
      : ParseError(column, "unknown word '" + word + "'"), word_(std::move(word)) {}
  const std::string& word() const { return word_; }

 private:
  std::string word_;
};

/// A reference could not be bound to a focus instance.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// `is-a` would wipe out an existing attribute; `changes` is the remedy.
class IncompatibleAttributeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The HLS template references an instance that already left the focus.
class StaleHlsError : public Error {
 public:
  using Error::Error;
};

/// Engine bug: an invariant of the focus or memory was broken.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace xapagy
