#pragma once

#include <cstdint>

#include "gradspace/error.hpp"

namespace gradspace {

struct SolverConfig {
  double tol_objective = 1e-10;
  double tol_feasibility = 1e-9;
  int max_iterations = 200000;
  std::uint64_t seed = 0;
  /// Iterates whose V-norm exceeds this abort the solve (unbounded minimizing sequence).
  double iterate_cap = 1e12;

  void validate() const {
    require(tol_objective > 0 && tol_feasibility > 0, ErrorKind::precondition,
            "solver tolerances must be positive");
    require(max_iterations >= 1, ErrorKind::precondition, "max_iterations must be >= 1");
    require(iterate_cap > 0, ErrorKind::precondition, "iterate_cap must be positive");
  }
};

}  // namespace gradspace
