#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpsens {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression or measure text. `offset` is a byte offset into the
/// source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A target expression could not be evaluated at a point.
class EvalError : public Error {
 public:
  enum class Kind { Domain, NonFinite };
  EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Parameters violate a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An integral did not settle within the refinement/window budget.
class NonIntegrable : public Error {
 public:
  using Error::Error;
};

/// The target fails the L^p hypothesis (flagged, never proven).
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// A numerical budget ran out before the requested bound was met.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace lpsens
