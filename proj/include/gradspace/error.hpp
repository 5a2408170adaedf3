#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gradspace {

enum class ErrorKind {
  dimension,
  precondition,
  infeasible,
  nonconvergence,
  regularity,
  schema,
  unsupported,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::regularity: return "regularity";
    case ErrorKind::schema: return "schema";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an iterative kernel exhausts its iteration budget. Carries the
/// best iterate seen so callers can inspect or report it.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> best, double residual, int iterations)
      : Error(ErrorKind::nonconvergence, what),
        best_(std::move(best)),
        residual_(residual),
        iterations_(iterations) {}

  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> best_;
  double residual_;
  int iterations_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace gradspace
