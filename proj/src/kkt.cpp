#include "fipm/kkt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fipm {

const char* systemKindString(SystemKind kind) {
  return kind == SystemKind::kAugmented ? "augmented" : "normal-equations";
}

Residuals Residuals::zeros(Index m, Index n) {
  Residuals r;
  r.r1.assign(m, 0.0);
  r.r2.assign(n, 0.0);
  r.r3.assign(n, 0.0);
  r.r4.assign(n, 0.0);
  r.r5.assign(n, 0.0);
  r.r6.assign(n, 0.0);
  return r;
}

Direction Direction::zeros(Index m, Index n) {
  Direction d;
  d.dx.assign(n, 0.0);
  d.dy.assign(m, 0.0);
  d.dxl.assign(n, 0.0);
  d.dxu.assign(n, 0.0);
  d.dzl.assign(n, 0.0);
  d.dzu.assign(n, 0.0);
  return d;
}

void Direction::add(const Direction& o, double alpha) {
  auto axpy = [alpha](std::vector<double>& v, const std::vector<double>& w) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += alpha * w[i];
  };
  axpy(dx, o.dx);
  axpy(dy, o.dy);
  axpy(dxl, o.dxl);
  axpy(dxu, o.dxu);
  axpy(dzl, o.dzl);
  axpy(dzu, o.dzu);
}

std::vector<double> computeInvTheta(const IterationPoint& pt,
                                    const InternalLp& lp) {
  std::vector<double> inv(lp.num_cols, 0.0);
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) inv[j] += pt.zl[j] / pt.xl[j];
    if (lp.hasUpper(j)) inv[j] += pt.zu[j] / pt.xu[j];
  }
  return inv;
}

std::vector<double> reduceRhs(const Residuals& res, const IterationPoint& pt,
                              const InternalLp& lp) {
  std::vector<double> r7 = res.r4;
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) r7[j] -= (res.r5[j] + pt.zl[j] * res.r2[j]) / pt.xl[j];
    if (lp.hasUpper(j)) r7[j] += (res.r6[j] - pt.zu[j] * res.r3[j]) / pt.xu[j];
  }
  return r7;
}

std::vector<double> normalEquationsRhs(const CscMatrix& a,
                                       std::span<const double> theta,
                                       std::span<const double> r1,
                                       std::span<const double> r7) {
  std::vector<double> tr(r7.size());
  for (std::size_t j = 0; j < r7.size(); ++j) tr[j] = theta[j] * r7[j];
  std::vector<double> r8(r1.begin(), r1.end());
  a.multiplyAdd(1.0, tr, r8);
  return r8;
}

KktSystem formAugmented(const CscMatrix& a, std::span<const double> inv_theta,
                        const RegularizationParams& reg) {
  const Index m = a.rows;
  const Index n = a.cols;
  KktSystem sys;
  sys.kind = SystemKind::kAugmented;
  sys.tags.assign(n + m, 1);
  std::fill(sys.tags.begin(), sys.tags.begin() + n, -1);
  CscMatrix& k = sys.matrix;
  k = CscMatrix(n + m, n + m);
  k.row_index.reserve(n + m + a.nnz());
  k.value.reserve(n + m + a.nnz());
  for (Index j = 0; j < n; ++j) {
    k.row_index.push_back(j);
    k.value.push_back(-(inv_theta[j] + reg.primal));
    for (Index p = a.colBegin(j); p < a.colEnd(j); ++p) {
      k.row_index.push_back(n + a.row_index[p]);
      k.value.push_back(a.value[p]);
    }
    k.col_start[j + 1] = k.nnz();
  }
  for (Index i = 0; i < m; ++i) {
    k.row_index.push_back(n + i);
    k.value.push_back(reg.dual);
    k.col_start[n + i + 1] = k.nnz();
  }
  return sys;
}

std::optional<KktSystem> formNormalEquations(const CscMatrix& a,
                                             std::span<const double> inv_theta,
                                             const RegularizationParams& reg,
                                             Index abort_threshold) {
  const Index m = a.rows;
  const Index n = a.cols;
  const CscMatrix at = a.transpose();
  std::vector<double> theta(n);
  for (Index j = 0; j < n; ++j) theta[j] = 1.0 / (inv_theta[j] + reg.primal);

  KktSystem sys;
  sys.kind = SystemKind::kNormalEquations;
  sys.tags.assign(m, 1);
  CscMatrix& ne = sys.matrix;
  ne = CscMatrix(m, m);

  std::vector<double> acc(m, 0.0);
  std::vector<Index> mark(m, -1);
  std::vector<Index> rows;
  for (Index i = 0; i < m; ++i) {
    rows.clear();
    mark[i] = i;
    rows.push_back(i);
    acc[i] = 0.0;
    for (Index p = at.colBegin(i); p < at.colEnd(i); ++p) {
      const Index j = at.row_index[p];
      const double aij = at.value[p] * theta[j];
      for (Index q = a.colBegin(j); q < a.colEnd(j); ++q) {
        const Index k = a.row_index[q];
        if (k < i) continue;
        if (mark[k] != i) {
          mark[k] = i;
          rows.push_back(k);
          acc[k] = 0.0;
        }
        acc[k] += aij * a.value[q];
      }
    }
    if (ne.nnz() + static_cast<Index>(rows.size()) > abort_threshold)
      return std::nullopt;
    std::sort(rows.begin(), rows.end());
    for (Index k : rows) {
      ne.row_index.push_back(k);
      ne.value.push_back(k == i ? acc[k] + reg.dual : acc[k]);
    }
    ne.col_start[i + 1] = ne.nnz();
  }
  return sys;
}

SystemSelection chooseSystem(const CscMatrix& a, bool has_free_columns,
                             SystemChoice choice,
                             const SymbolicOptions& options) {
  SystemSelection sel;
  const std::vector<double> ones(a.cols, 1.0);
  const RegularizationParams none{0.0, 0.0};

  if (choice == SystemChoice::kNormalEquations) {
    auto ne = formNormalEquations(a, ones, none, kIndexMax);
    sel.normal = analyse(ne->matrix, options);
    sel.kind = SystemKind::kNormalEquations;
    return sel;
  }

  sel.augmented = analyse(formAugmented(a, ones, none).matrix, options);
  sel.kind = SystemKind::kAugmented;
  if (choice == SystemChoice::kAugmented || has_free_columns) return sel;

  auto ne = formNormalEquations(a, ones, none, sel.augmented.nnz_l);
  if (!ne) {
    sel.normal_aborted = true;
    return sel;
  }
  sel.normal = analyse(ne->matrix, options);
  if (sel.normal->flops <= sel.augmented.flops)
    sel.kind = SystemKind::kNormalEquations;
  return sel;
}

Direction recoverDirection(std::vector<double> dx, std::vector<double> dy,
                           const Residuals& res, const IterationPoint& pt,
                           const InternalLp& lp) {
  const Index n = lp.num_cols;
  Direction d;
  d.dx = std::move(dx);
  d.dy = std::move(dy);
  d.dxl.assign(n, 0.0);
  d.dxu.assign(n, 0.0);
  d.dzl.assign(n, 0.0);
  d.dzu.assign(n, 0.0);
  for (Index j = 0; j < n; ++j) {
    if (lp.hasLower(j)) {
      d.dxl[j] = d.dx[j] - res.r2[j];
      d.dzl[j] = (res.r5[j] - pt.zl[j] * d.dxl[j]) / pt.xl[j];
    }
    if (lp.hasUpper(j)) {
      d.dxu[j] = res.r3[j] - d.dx[j];
      d.dzu[j] = (res.r6[j] - pt.zu[j] * d.dxu[j]) / pt.xu[j];
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

namespace {

double secondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

NewtonSolver::NewtonSolver(const InternalLp& lp, const KktOptions& options)
    : lp_(lp), options_(options), reg_(options.reg) {
  SystemSelection sel = chooseSystem(lp.a, lp.numFree() > 0, options.choice,
                                     options.symbolic);
  kind_ = sel.kind;
  symbolic_ = kind_ == SystemKind::kAugmented ? std::move(sel.augmented)
                                              : std::move(*sel.normal);
}

void NewtonSolver::factorize(std::span<const double> inv_theta) {
  const Index m = lp_.num_rows;
  const Index n = lp_.num_cols;
  fact_.reset();

  auto start = std::chrono::steady_clock::now();
  theta_.resize(n);
  for (Index j = 0; j < n; ++j) theta_[j] = 1.0 / (inv_theta[j] + reg_.primal);
  if (kind_ == SystemKind::kAugmented) {
    system_ = formAugmented(lp_.a, inv_theta, {0.0, 0.0});
    shift_.assign(n + m, reg_.dual);
    std::fill(shift_.begin(), shift_.begin() + n, -reg_.primal);
  } else {
    for (Index j = 0; j < n; ++j)
      if (!std::isfinite(theta_[j]))
        throw NumericalFailure("normal equations need primal regularisation",
                               -1);
    system_ = *formNormalEquations(lp_.a, inv_theta, {reg_.primal, 0.0},
                                   kIndexMax);
    shift_.assign(m, reg_.dual);
  }
  form_seconds_ += secondsSince(start);

  start = std::chrono::steady_clock::now();
  FactorOptions fo = options_.factor;
  fo.pivot.static_primal = reg_.primal;
  fo.pivot.static_dual = reg_.dual;
  fact_.emplace(fipm::factorize(system_.matrix, system_.tags, symbolic_, fo));
  factor_seconds_ += secondsSince(start);
}

void NewtonSolver::solveReduced(std::span<const double> fx,
                                std::span<const double> fy,
                                std::vector<double>& dx,
                                std::vector<double>& dy,
                                SolveStats* stats) const {
  const Index m = lp_.num_rows;
  const Index n = lp_.num_cols;
  auto start = std::chrono::steady_clock::now();
  RefineResult rr;
  if (kind_ == SystemKind::kAugmented) {
    std::vector<double> rhs(n + m);
    std::copy(fx.begin(), fx.end(), rhs.begin());
    std::copy(fy.begin(), fy.end(), rhs.begin() + n);
    rr = refine(system_.matrix, shift_, *fact_, rhs, options_.refinement_cap);
    dx.assign(rr.x.begin(), rr.x.begin() + n);
    dy.assign(rr.x.begin() + n, rr.x.end());
  } else {
    const std::vector<double> r8 = normalEquationsRhs(lp_.a, theta_, fy, fx);
    rr = refine(system_.matrix, shift_, *fact_, r8, options_.refinement_cap);
    dy = std::move(rr.x);
    dx.assign(n, 0.0);
    lp_.a.multiplyTransposeAdd(1.0, dy, dx);
    for (Index j = 0; j < n; ++j) dx[j] = theta_[j] * (dx[j] - fx[j]);
  }
  if (stats) {
    stats->refinement_passes = rr.corrections;
    stats->backward_error = rr.final_omega;
  }
  solve_seconds_ += secondsSince(start);
}

Direction NewtonSolver::solve(const Residuals& res, const IterationPoint& pt,
                              SolveStats* stats) const {
  const std::vector<double> r7 = reduceRhs(res, pt, lp_);
  std::vector<double> dx, dy;
  solveReduced(r7, res.r1, dx, dy, stats);
  return recoverDirection(std::move(dx), std::move(dy), res, pt, lp_);
}

}  // namespace fipm
