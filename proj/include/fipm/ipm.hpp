#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fipm/kkt.hpp"
#include "fipm/lp_model.hpp"

namespace fipm {

struct SolverOptions {
  double tau_feas = 1e-8;
  double tau_opt = 1e-8;
  Index max_iter = 100;
  Index refinement_cap = 2;
  Index corrector_cap = 10;
  double eta = 0.9995;
  double sigma_min = 1e-4;
  double sigma_max = 0.9;
  SystemChoice system = SystemChoice::kAuto;
  RegularizationParams reg;
  double time_limit = kInf;  // seconds
  Index block_size = 64;
  // Relative cost of one factorisation flop against one solve flop.
  double alpha_f = 1.0;
  double pivot_alpha = (std::sqrt(17.0) + 1.0) / 8.0;
  double pivot_delta = 64.0 * std::numeric_limits<double>::epsilon();
  SymbolicOptions symbolic;

  // Throws std::invalid_argument.
  void validate() const;
};

struct IterationRecord {
  Index iteration = 0;
  double mu = 0.0;
  double primal_infeasibility = 0.0;  // unscaled, absolute
  double dual_infeasibility = 0.0;    // unscaled, absolute
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double sigma = 0.0;
  double alpha_primal = 0.0;
  double alpha_dual = 0.0;
  Index correctors = 0;
  Index refinements = 0;
  double max_perturbation = 0.0;
};

struct SolveReport {
  Status status = Status::kNumericalFailure;
  SystemKind system = SystemKind::kAugmented;
  Index nnz_l = 0;
  Index flops = 0;
  Index corrector_budget = 0;
  Index regularization_retries = 0;
  IterationRecord initial;
  std::vector<IterationRecord> iterations;
  double form_seconds = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
  std::string message;
};

struct IpmResult {
  Status status = Status::kNumericalFailure;
  IterationPoint point;
  SolveReport report;
};

// Called with each record and the point it describes.
using IterationObserver =
    std::function<void(const IterationRecord&, const IterationPoint&)>;

double computeMu(const IterationPoint& point, const InternalLp& lp);

Residuals computeResiduals(const IterationPoint& point, const InternalLp& lp,
                           double sigma, double mu);

// Corrector right-hand side: r1..r4 = 0, r5/r6 from the given targets.
Residuals correctorResiduals(const InternalLp& lp,
                             std::span<const double> target_lower,
                             std::span<const double> target_upper);

struct StepSizes {
  double primal;
  double dual;
};

// Largest steps keeping the bounded gaps and multipliers nonnegative.
StepSizes maxStepSizes(const IterationPoint& point, const Direction& dir,
                       const InternalLp& lp);
// min(1, eta * max step) for each side.
StepSizes stepSizes(const IterationPoint& point, const Direction& dir,
                    const InternalLp& lp, double eta);

Index correctorCount(double solve_effort, double factor_effort,
                     double alpha_f, Index refinement_cap, Index cap);

struct TerminationInfo {
  bool optimal = false;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double primal_bound_norm = 0.0;
  double dual_bound_norm = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
};

TerminationInfo terminationCheck(const IterationPoint& point,
                                 const InternalLp& lp, const Residuals& res,
                                 double tau_feas, double tau_opt);

IterationPoint startingPoint(const InternalLp& lp, NewtonSolver& solver);

struct CorrectorOutcome {
  bool accepted = false;
  Direction direction;
  StepSizes steps{0.0, 0.0};
  Index refinements = 0;
};

// One multiple-centrality corrector on top of `dir`; target mu_target.
CorrectorOutcome centralityCorrector(const IterationPoint& point,
                                     const Direction& dir,
                                     const InternalLp& lp,
                                     const NewtonSolver& solver,
                                     double mu_target, double eta);

IpmResult runIpm(const InternalLp& lp, const SolverOptions& options,
                 const IterationObserver& observer = {});

}  // namespace fipm
