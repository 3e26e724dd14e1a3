#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

enum class ErrorKind {
  stalled,
  newton_singular,
  no_plateau,
  bad_exponential_fit,
  quadrature_failure,
  extrapolation_unstable,
  continuity_break,
  branch_stall,
  degenerate_lplus,
  bracket_failure,
  eigensolver_failure,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::stalled: return "stalled";
    case ErrorKind::newton_singular: return "newton-singular";
    case ErrorKind::no_plateau: return "no plateau";
    case ErrorKind::bad_exponential_fit: return "bad exponential fit";
    case ErrorKind::quadrature_failure: return "quadrature failure";
    case ErrorKind::extrapolation_unstable: return "extrapolation unstable";
    case ErrorKind::continuity_break: return "continuity break";
    case ErrorKind::branch_stall: return "branch stall";
    case ErrorKind::degenerate_lplus: return "degenerate L_+";
    case ErrorKind::bracket_failure: return "bracket failure";
    case ErrorKind::eigensolver_failure: return "eigensolver failure";
  }
  return "unknown";
}

class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fraclap
