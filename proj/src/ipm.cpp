#include "fipm/ipm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace fipm {

void SolverOptions::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(tau_feas > 0.0 && tau_opt > 0.0, "tolerances must be positive");
  require(max_iter >= 0, "iteration limit must be nonnegative");
  require(refinement_cap >= 0, "refinement cap must be nonnegative");
  require(corrector_cap >= 0, "corrector cap must be nonnegative");
  require(eta > 0.0 && eta < 1.0, "step factor must lie in (0, 1)");
  require(sigma_min > 0.0 && sigma_min <= sigma_max && sigma_max < 1.0,
          "centring bounds must satisfy 0 < min <= max < 1");
  require(reg.primal >= 0.0 && reg.dual >= 0.0,
          "regularisation must be nonnegative");
  require(block_size == 32 || block_size == 64 || block_size == 128,
          "block size must be 32, 64 or 128");
  require(alpha_f > 0.0, "factor cost coefficient must be positive");
  require(pivot_alpha > 0.0 && pivot_alpha < 1.0,
          "pivot threshold must lie in (0, 1)");
  require(pivot_delta > 0.0, "pivot lift must be positive");
  require(time_limit > 0.0, "time limit must be positive");
}

double computeMu(const IterationPoint& pt, const InternalLp& lp) {
  double sum = 0.0;
  Index count = 0;
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) {
      sum += pt.xl[j] * pt.zl[j];
      ++count;
    }
    if (lp.hasUpper(j)) {
      sum += pt.xu[j] * pt.zu[j];
      ++count;
    }
  }
  if (count == 0) throw ModelError("complementarity undefined: no bounded columns");
  return sum / static_cast<double>(count);
}

Residuals computeResiduals(const IterationPoint& pt, const InternalLp& lp,
                           double sigma, double mu) {
  const Index m = lp.num_rows;
  const Index n = lp.num_cols;
  Residuals r = Residuals::zeros(m, n);
  r.r1 = lp.b;
  lp.a.multiplyAdd(-1.0, pt.x, r.r1);
  r.r4 = lp.c;
  lp.a.multiplyTransposeAdd(-1.0, pt.y, r.r4);
  const double target = sigma * mu;
  for (Index j = 0; j < n; ++j) {
    if (lp.hasLower(j)) {
      r.r2[j] = lp.lower[j] - pt.x[j] + pt.xl[j];
      r.r4[j] -= pt.zl[j];
      r.r5[j] = target - pt.xl[j] * pt.zl[j];
    }
    if (lp.hasUpper(j)) {
      r.r3[j] = lp.upper[j] - pt.x[j] - pt.xu[j];
      r.r4[j] += pt.zu[j];
      r.r6[j] = target - pt.xu[j] * pt.zu[j];
    }
  }
  return r;
}

Residuals correctorResiduals(const InternalLp& lp,
                             std::span<const double> target_lower,
                             std::span<const double> target_upper) {
  Residuals r = Residuals::zeros(lp.num_rows, lp.num_cols);
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) r.r5[j] = target_lower[j];
    if (lp.hasUpper(j)) r.r6[j] = target_upper[j];
  }
  return r;
}

namespace {

void limitStep(double v, double dv, double& alpha) {
  if (dv < 0.0) alpha = std::min(alpha, -v / dv);
}

}  // namespace

StepSizes maxStepSizes(const IterationPoint& pt, const Direction& d,
                       const InternalLp& lp) {
  StepSizes s{kInf, kInf};
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) {
      limitStep(pt.xl[j], d.dxl[j], s.primal);
      limitStep(pt.zl[j], d.dzl[j], s.dual);
    }
    if (lp.hasUpper(j)) {
      limitStep(pt.xu[j], d.dxu[j], s.primal);
      limitStep(pt.zu[j], d.dzu[j], s.dual);
    }
  }
  return s;
}

StepSizes stepSizes(const IterationPoint& pt, const Direction& d,
                    const InternalLp& lp, double eta) {
  const StepSizes s = maxStepSizes(pt, d, lp);
  return {std::min(1.0, eta * s.primal), std::min(1.0, eta * s.dual)};
}

Index correctorCount(double solve_effort, double factor_effort, double alpha_f,
                     Index refinement_cap, Index cap) {
  const double f = static_cast<double>(refinement_cap);
  const double ratio =
      factor_effort * alpha_f / ((1.0 + 0.5 * f) * std::max(solve_effort, 1.0));
  const double k = std::floor(ratio) - 1.0;
  if (!(k >= 1.0)) return std::min<Index>(1, cap);
  if (k >= static_cast<double>(cap)) return cap;
  return static_cast<Index>(k);
}

TerminationInfo terminationCheck(const IterationPoint& pt, const InternalLp& lp,
                                 const Residuals& res, double tau_feas,
                                 double tau_opt) {
  TerminationInfo t;
  const std::vector<double>& rs = lp.scaling.row;
  const std::vector<double>& cs = lp.col_scale;

  double pinf = 0.0, bnorm = 0.0;
  for (Index i = 0; i < lp.num_rows; ++i) {
    pinf = std::max(pinf, std::abs(res.r1[i] / rs[i]));
    bnorm = std::max(bnorm, std::abs(lp.b[i] / rs[i]));
  }
  double dinf = 0.0, cnorm = 0.0;
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) {
      pinf = std::max(pinf, std::abs(cs[j] * res.r2[j]));
      bnorm = std::max(bnorm, std::abs(cs[j] * lp.lower[j]));
    }
    if (lp.hasUpper(j)) {
      pinf = std::max(pinf, std::abs(cs[j] * res.r3[j]));
      bnorm = std::max(bnorm, std::abs(cs[j] * lp.upper[j]));
    }
    dinf = std::max(dinf, std::abs(res.r4[j] / cs[j]));
    cnorm = std::max(cnorm, std::abs(lp.c[j] / cs[j]));
  }

  const ObjectiveValues obj = objectiveValues(pt, lp);
  t.primal_infeasibility = pinf;
  t.dual_infeasibility = dinf;
  t.primal_bound_norm = bnorm;
  t.dual_bound_norm = cnorm;
  t.primal_objective = obj.primal;
  t.dual_objective = obj.dual;
  t.relative_gap = std::abs(obj.primal - obj.dual) /
                   (1.0 + 0.5 * std::abs(obj.primal + obj.dual));
  t.optimal = pinf <= tau_feas * (1.0 + bnorm) &&
              dinf <= tau_feas * (1.0 + cnorm) && t.relative_gap <= tau_opt;
  return t;
}

// ---------------------------------------------------------------------------

namespace {

IterationPoint fallbackStart(const InternalLp& lp) {
  IterationPoint pt = IterationPoint::zeros(lp);
  for (Index j = 0; j < lp.num_cols; ++j) {
    pt.x[j] = std::clamp(0.0, lp.lower[j], lp.upper[j]);
    if (lp.hasLower(j)) {
      pt.xl[j] = 1.0;
      pt.zl[j] = 1.0;
    }
    if (lp.hasUpper(j)) {
      pt.xu[j] = 1.0;
      pt.zu[j] = 1.0;
    }
  }
  return pt;
}

}  // namespace

IterationPoint startingPoint(const InternalLp& lp, NewtonSolver& solver) {
  const Index m = lp.num_rows;
  const Index n = lp.num_cols;
  try {
    solver.factorize(std::vector<double>(n, 1.0));
  } catch (const NumericalFailure&) {
    return fallbackStart(lp);
  }

  IterationPoint pt = IterationPoint::zeros(lp);
  std::vector<double> dx, dy;
  const std::vector<double> zero_n(n, 0.0), zero_m(m, 0.0);
  solver.solveReduced(zero_n, lp.b, dx, dy);
  pt.x = dx;
  solver.solveReduced(lp.c, zero_m, dx, dy);
  pt.y = dy;
  std::vector<double> z = lp.c;
  lp.a.multiplyTransposeAdd(-1.0, pt.y, z);

  for (double v : pt.x)
    if (!std::isfinite(v)) return fallbackStart(lp);
  for (double v : pt.y)
    if (!std::isfinite(v)) return fallbackStart(lp);

  double min_gap = kInf, min_mult = kInf;
  for (Index j = 0; j < n; ++j) {
    const bool lo = lp.hasLower(j), up = lp.hasUpper(j);
    if (lo) {
      pt.xl[j] = pt.x[j] - lp.lower[j];
      pt.zl[j] = up ? 0.5 * z[j] : z[j];
      min_gap = std::min(min_gap, pt.xl[j]);
      min_mult = std::min(min_mult, pt.zl[j]);
    }
    if (up) {
      pt.xu[j] = lp.upper[j] - pt.x[j];
      pt.zu[j] = lo ? -0.5 * z[j] : -z[j];
      min_gap = std::min(min_gap, pt.xu[j]);
      min_mult = std::min(min_mult, pt.zu[j]);
    }
  }
  if (lp.numBounded() == 0) return pt;

  const double shift_x = std::max(0.0, -1.5 * min_gap);
  const double shift_z = std::max(0.0, -1.5 * min_mult);
  double xz = 0.0, sum_x = 0.0, sum_z = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (lp.hasLower(j)) {
      pt.xl[j] += shift_x;
      pt.zl[j] += shift_z;
      xz += pt.xl[j] * pt.zl[j];
      sum_x += pt.xl[j];
      sum_z += pt.zl[j];
    }
    if (lp.hasUpper(j)) {
      pt.xu[j] += shift_x;
      pt.zu[j] += shift_z;
      xz += pt.xu[j] * pt.zu[j];
      sum_x += pt.xu[j];
      sum_z += pt.zu[j];
    }
  }
  const double cx = sum_z > 0.0 ? 0.5 * xz / sum_z : 0.0;
  const double cz = sum_x > 0.0 ? 0.5 * xz / sum_x : 0.0;
  const double floor_x = std::max(1.0, shift_x);
  const double floor_z = std::max(1.0, shift_z);
  for (Index j = 0; j < n; ++j) {
    if (lp.hasLower(j)) {
      pt.xl[j] = std::max(pt.xl[j] + cx, floor_x);
      pt.zl[j] = std::max(pt.zl[j] + cz, floor_z);
    }
    if (lp.hasUpper(j)) {
      pt.xu[j] = std::max(pt.xu[j] + cx, floor_x);
      pt.zu[j] = std::max(pt.zu[j] + cz, floor_z);
    }
  }
  return pt;
}

CorrectorOutcome centralityCorrector(const IterationPoint& pt,
                                     const Direction& dir,
                                     const InternalLp& lp,
                                     const NewtonSolver& solver,
                                     double mu_target, double eta) {
  constexpr double kStepEnlargement = 0.1;
  constexpr double kBox = 0.1;
  constexpr double kMinImprovement = 0.05;

  CorrectorOutcome out;
  const Index n = lp.num_cols;
  const StepSizes base = stepSizes(pt, dir, lp, eta);
  const double ap = std::min(1.0, base.primal + kStepEnlargement);
  const double ad = std::min(1.0, base.dual + kStepEnlargement);
  const double lo = kBox * mu_target;
  const double hi = mu_target / kBox;

  auto target = [&](double x, double dx, double z, double dz) {
    const double v = (x + ap * dx) * (z + ad * dz);
    if (v < lo) return lo - v;
    if (v > hi) return std::max(hi - v, -hi);
    return 0.0;
  };

  std::vector<double> tl(n, 0.0), tu(n, 0.0);
  bool any = false;
  for (Index j = 0; j < n; ++j) {
    if (lp.hasLower(j)) {
      tl[j] = target(pt.xl[j], dir.dxl[j], pt.zl[j], dir.dzl[j]);
      any = any || tl[j] != 0.0;
    }
    if (lp.hasUpper(j)) {
      tu[j] = target(pt.xu[j], dir.dxu[j], pt.zu[j], dir.dzu[j]);
      any = any || tu[j] != 0.0;
    }
  }
  out.direction = dir;
  out.steps = base;
  if (!any) return out;

  SolveStats stats;
  Direction corrected = dir;
  corrected.add(solver.solve(correctorResiduals(lp, tl, tu), pt, &stats));
  out.refinements = stats.refinement_passes;
  const StepSizes s = stepSizes(pt, corrected, lp, eta);
  if (std::isfinite(s.primal) && std::isfinite(s.dual) &&
      std::min(s.primal, s.dual) >=
          std::min(base.primal, base.dual) + kMinImprovement) {
    out.accepted = true;
    out.direction = std::move(corrected);
    out.steps = s;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

bool allFinite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool allFinite(const Direction& d) {
  return allFinite(d.dx) && allFinite(d.dy) && allFinite(d.dxl) &&
         allFinite(d.dxu) && allFinite(d.dzl) && allFinite(d.dzu);
}

void takeStep(IterationPoint& pt, const Direction& d, const InternalLp& lp,
              StepSizes s) {
  for (Index j = 0; j < lp.num_cols; ++j) {
    pt.x[j] += s.primal * d.dx[j];
    if (lp.hasLower(j)) {
      pt.xl[j] += s.primal * d.dxl[j];
      pt.zl[j] += s.dual * d.dzl[j];
    }
    if (lp.hasUpper(j)) {
      pt.xu[j] += s.primal * d.dxu[j];
      pt.zu[j] += s.dual * d.dzu[j];
    }
  }
  for (Index i = 0; i < lp.num_rows; ++i) pt.y[i] += s.dual * d.dy[i];
}

IterationRecord measure(const IterationPoint& pt, const InternalLp& lp,
                        const SolverOptions& options, bool* optimal) {
  IterationRecord rec;
  rec.mu = computeMu(pt, lp);
  const Residuals res = computeResiduals(pt, lp, 0.0, 0.0);
  const TerminationInfo t =
      terminationCheck(pt, lp, res, options.tau_feas, options.tau_opt);
  rec.primal_infeasibility = t.primal_infeasibility;
  rec.dual_infeasibility = t.dual_infeasibility;
  rec.primal_objective = t.primal_objective;
  rec.dual_objective = t.dual_objective;
  rec.relative_gap = t.relative_gap;
  if (optimal) *optimal = t.optimal;
  return rec;
}

bool meetsRelaxed(const IterationPoint& pt, const InternalLp& lp,
                  const SolverOptions& options) {
  constexpr double kRelax = 1e2;
  const Residuals res = computeResiduals(pt, lp, 0.0, 0.0);
  return terminationCheck(pt, lp, res, options.tau_feas * kRelax,
                          options.tau_opt * kRelax)
      .optimal;
}

}  // namespace

IpmResult runIpm(const InternalLp& lp, const SolverOptions& options,
                 const IterationObserver& observer) {
  constexpr Index kMaxRetries = 3;
  constexpr double kRetryFactor = 100.0;
  constexpr Index kStallLimit = 5;
  constexpr double kTinyStep = 1e-8;

  options.validate();
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  IpmResult result;
  SolveReport& report = result.report;
  if (lp.numBounded() == 0)
    throw ModelError("complementarity undefined: no bounded columns");

  KktOptions ko;
  ko.choice = options.system;
  ko.reg = options.reg;
  ko.factor.block_size = options.block_size;
  ko.factor.pivot.alpha = options.pivot_alpha;
  ko.factor.pivot.delta = options.pivot_delta;
  ko.symbolic = options.symbolic;
  ko.refinement_cap = options.refinement_cap;

  auto finish = [&](Status status, std::string message,
                    const NewtonSolver* solver) {
    result.status = status;
    report.status = status;
    report.message = std::move(message);
    if (solver) {
      report.form_seconds = solver->formSeconds();
      report.factor_seconds = solver->factorSeconds();
      report.solve_seconds = solver->solveSeconds();
    }
    report.total_seconds = elapsed();
    return result;
  };

  std::optional<NewtonSolver> holder;
  try {
    holder.emplace(lp, ko);
  } catch (const OutOfMemoryError& e) {
    result.point = IterationPoint::zeros(lp);
    return finish(Status::kOutOfMemory, e.what(), nullptr);
  }
  NewtonSolver& solver = *holder;
  report.system = solver.kind();
  report.nnz_l = solver.symbolic().nnz_l;
  report.flops = solver.symbolic().flops;
  report.corrector_budget = correctorCount(
      2.0 * static_cast<double>(report.nnz_l),
      static_cast<double>(report.flops), options.alpha_f,
      options.refinement_cap, options.corrector_cap);

  IterationPoint& pt = result.point;
  pt = startingPoint(lp, solver);

  bool optimal = false;
  report.initial = measure(pt, lp, options, &optimal);
  if (observer) observer(report.initial, pt);
  if (optimal) return finish(Status::kOptimal, "optimal", &solver);

  Index stalled = 0;
  for (Index iter = 1; iter <= options.max_iter; ++iter) {
    if (elapsed() > options.time_limit)
      return finish(Status::kTimeLimit, "time limit reached", &solver);

    const double mu = computeMu(pt, lp);
    const std::vector<double> inv_theta = computeInvTheta(pt, lp);
    bool factored = false;
    RegularizationParams reg = options.reg;
    for (Index attempt = 0; attempt <= kMaxRetries && !factored; ++attempt) {
      solver.setRegularization(reg);
      try {
        solver.factorize(inv_theta);
        factored = true;
      } catch (const NumericalFailure&) {
        if (attempt == kMaxRetries) break;
        ++report.regularization_retries;
        reg.primal = std::max(reg.primal, 1e-12) * kRetryFactor;
        reg.dual = std::max(reg.dual, 1e-12) * kRetryFactor;
      }
    }
    if (!factored)
      return finish(Status::kNumericalFailure,
                    "factorisation broke down after regularisation retries",
                    &solver);

    IterationRecord rec;
    SolveStats stats;
    Index refinements = 0;

    const Residuals res_aff = computeResiduals(pt, lp, 0.0, mu);
    const Direction aff = solver.solve(res_aff, pt, &stats);
    refinements += stats.refinement_passes;
    if (!allFinite(aff))
      return finish(Status::kNumericalFailure, "non-finite direction", &solver);

    StepSizes amax = maxStepSizes(pt, aff, lp);
    const double ap = std::min(1.0, amax.primal);
    const double ad = std::min(1.0, amax.dual);
    double mu_aff = 0.0;
    Index count = 0;
    for (Index j = 0; j < lp.num_cols; ++j) {
      if (lp.hasLower(j)) {
        mu_aff += (pt.xl[j] + ap * aff.dxl[j]) * (pt.zl[j] + ad * aff.dzl[j]);
        ++count;
      }
      if (lp.hasUpper(j)) {
        mu_aff += (pt.xu[j] + ap * aff.dxu[j]) * (pt.zu[j] + ad * aff.dzu[j]);
        ++count;
      }
    }
    mu_aff /= static_cast<double>(count);
    const double ratio = mu > 0.0 ? std::max(mu_aff, 0.0) / mu : 0.0;
    const double sigma =
        std::clamp(ratio * ratio * ratio, options.sigma_min, options.sigma_max);

    Residuals res = computeResiduals(pt, lp, sigma, mu);
    for (Index j = 0; j < lp.num_cols; ++j) {
      if (lp.hasLower(j)) res.r5[j] -= aff.dxl[j] * aff.dzl[j];
      if (lp.hasUpper(j)) res.r6[j] -= aff.dxu[j] * aff.dzu[j];
    }
    Direction dir = solver.solve(res, pt, &stats);
    refinements += stats.refinement_passes;
    if (!allFinite(dir))
      return finish(Status::kNumericalFailure, "non-finite direction", &solver);

    Index accepted = 0;
    for (Index k = 0; k < report.corrector_budget; ++k) {
      CorrectorOutcome c =
          centralityCorrector(pt, dir, lp, solver, sigma * mu, options.eta);
      refinements += c.refinements;
      if (!c.accepted || !allFinite(c.direction)) break;
      dir = std::move(c.direction);
      ++accepted;
    }

    const StepSizes step = stepSizes(pt, dir, lp, options.eta);
    takeStep(pt, dir, lp, step);

    rec = measure(pt, lp, options, &optimal);
    rec.iteration = iter;
    rec.sigma = sigma;
    rec.alpha_primal = step.primal;
    rec.alpha_dual = step.dual;
    rec.correctors = accepted;
    rec.refinements = refinements;
    rec.max_perturbation = solver.factorization().maxDynamicPerturbation();
    report.iterations.push_back(rec);
    if (observer) observer(rec, pt);

    if (!std::isfinite(rec.mu) || !std::isfinite(rec.primal_infeasibility) ||
        !std::isfinite(rec.dual_infeasibility))
      return finish(Status::kNumericalFailure, "non-finite iterate", &solver);
    if (optimal) return finish(Status::kOptimal, "optimal", &solver);

    stalled = std::min(step.primal, step.dual) < kTinyStep ? stalled + 1 : 0;
    if (stalled >= kStallLimit) {
      if (meetsRelaxed(pt, lp, options))
        return finish(Status::kImprecise, "no progress; relaxed tolerances met",
                      &solver);
      return finish(Status::kNumericalFailure, "no progress", &solver);
    }
  }
  return finish(Status::kIterationLimit, "iteration limit reached", &solver);
}

}  // namespace fipm
