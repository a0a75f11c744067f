#include "fipm/solver.hpp"

#include "fipm/scaling.hpp"

namespace fipm {

LpSolveResult solveLp(const UserLp& user, const SolverOptions& options,
                      const IterationObserver& observer, bool scale) {
  user.validate();
  LpSolveResult r;
  const ScalingFactors factors =
      scale ? curtisReid(user.matrix)
            : ScalingFactors::identity(user.num_rows, user.num_cols);
  r.internal = toInternal(user, factors);
  r.ipm = runIpm(r.internal, options, observer);
  r.solution = recoverUserSolution(r.ipm.point, r.internal, user);
  r.solution.status = r.ipm.status;
  r.solution.iterations = static_cast<Index>(r.ipm.report.iterations.size());
  return r;
}

}  // namespace fipm
