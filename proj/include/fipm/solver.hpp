#pragma once

#include "fipm/ipm.hpp"
#include "fipm/lp_model.hpp"

namespace fipm {

struct LpSolveResult {
  InternalLp internal;
  IpmResult ipm;
  UserSolution solution;
};

// Scale (Curtis-Reid unless disabled), convert, run, and map the final
// iterate back to user space. Throws ModelError for invalid models.
LpSolveResult solveLp(const UserLp& user, const SolverOptions& options,
                      const IterationObserver& observer = {},
                      bool scale = true);

}  // namespace fipm
