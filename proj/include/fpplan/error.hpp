#pragma once

#include <stdexcept>
#include <string>

namespace fpplan {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  dimension_mismatch,
  consistency,      // lattice key drift, broken tree invariants
  resource_limit,   // vertex or replanning cap exceeded
  model_violation,  // robot found inside a freshly revealed obstacle
  cfl_violation,    // explicit step produced negative or >1 mass
  structural,       // region construction failed to terminate
  parse,
  validation,
  invalid_argument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Message stays unconverted unless the check fails, so literal messages
/// cost nothing on hot paths.
template <class Msg>
inline void require(bool cond, ErrorKind kind, const Msg& what) {
  if (!cond) fail(kind, std::string(what));
}

}  // namespace fpplan
