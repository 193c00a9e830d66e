#ifndef HAPTISYNC_ERROR_H_
#define HAPTISYNC_ERROR_H_

#include <stdexcept>
#include <string>

namespace haptisync {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value (kernel size, thresholds, rates, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data violates a documented precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public InputError {
 public:
  using InputError::InputError;
};

// Malformed CSV/JSON input; carries the 1-based line number when known.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what
                            : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// PlayoutController stepped before any frame was buffered.
class StartupError : public Error {
 public:
  using Error::Error;
};

// Correlation requested on a constant series.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

// Outlier screening rejected every testee.
class DegeneratePanelError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  enum class Kind { kBadMagic, kBadVersion, kTruncated, kUnknownStream, kBadPayload };

  DecodeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace haptisync

#endif  // HAPTISYNC_ERROR_H_
