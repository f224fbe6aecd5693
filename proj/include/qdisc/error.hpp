#pragma once

#include <stdexcept>
#include <string>

namespace qdisc {

enum class ErrorKind { io, schema, invariant, precondition };

// Base for every error the library raises. The kind maps onto the CLI exit
// codes (io=1, schema=2, invariant=3, precondition=4).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what)
      : Error(ErrorKind::schema, what) {}
};

// A value violates a documented invariant (non-Hermitian input, priors not
// summing to one, indefinite POVM element, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::invariant, what) {}
};

// Inputs are individually valid but do not meet an operation's precondition
// (Helstrom with m != 2, mismatched dimensions, mixed state passed to the
// pure bound, ...).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::precondition, what) {}
};

inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return 1;
    case ErrorKind::schema: return 2;
    case ErrorKind::invariant: return 3;
    case ErrorKind::precondition: return 4;
  }
  return 1;
}

}  // namespace qdisc
