#pragma once

#include <stdexcept>
#include <string>

namespace twirl {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivisionByZero : Error {
  DivisionByZero() : Error("division by zero rational function") {}
};

struct ZeroFunction : Error {
  ZeroFunction() : Error("series of the zero function is undefined") {}
};

struct SingularSystem : Error {
  using Error::Error;
};

struct RankDeficient : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct OddMultiplicity : Error {
  using Error::Error;
};

// Parse failure in the cycle / partition grammars; `position` is a byte
// offset into the offending input.
struct ParseError : Error {
  std::size_t position;
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct OutOfRange : Error {
  using Error::Error;
};

struct KeyMissing : Error {
  using Error::Error;
};

struct PoleAtN : Error {
  using Error::Error;
};

struct LemmaViolation : Error {
  using Error::Error;
};

struct BudgetExceeded : Error {
  using Error::Error;
};

struct Infeasible : Error {
  using Error::Error;
};

}  // namespace twirl
