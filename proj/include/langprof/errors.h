#ifndef LANGPROF_ERRORS_H_
#define LANGPROF_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace langprof {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed grammar text. line() is 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A structural invariant does not hold (grammar, config, record schema, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Ingested records violate the loss-record schema.
class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Ingested records do not cover the manifest exactly once per condition.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// The operation is not defined for this input (e.g. exact enumeration of a
// recursive grammar).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

class NotAMemberError : public Error {
 public:
  using Error::Error;
};

class DepthExceededError : public Error {
 public:
  using Error::Error;
};

class ShortfallError : public Error {
 public:
  using Error::Error;
};

// Rejection sampling gave up. Carries the observed acceptance rate so the
// caller can raise the cap or change the edit distance.
class AttemptCapExceeded : public Error {
 public:
  AttemptCapExceeded(const std::string& message, std::size_t attempts,
                     std::size_t accepted)
      : Error(message), attempts_(attempts), accepted_(accepted) {}
  std::size_t attempts() const { return attempts_; }
  std::size_t accepted() const { return accepted_; }
  double acceptance_rate() const {
    return attempts_ == 0 ? 0.0
                          : static_cast<double>(accepted_) / attempts_;
  }

 private:
  std::size_t attempts_;
  std::size_t accepted_;
};

}  // namespace langprof

#endif  // LANGPROF_ERRORS_H_
