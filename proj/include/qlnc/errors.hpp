#pragma once

#include <stdexcept>
#include <string>

namespace qlnc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or schema-violating input file.
class LoadError : public Error {
 public:
  enum class Kind { io, parse, schema };
  LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// A value left the representable range of a fixed-point format.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Requested message bound is incompatible with the approximation factor.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A closed-form bound was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Exhaustive sweep larger than the configured case budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlnc
