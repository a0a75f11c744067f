#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fipm/factorization.hpp"
#include "fipm/lp_model.hpp"
#include "fipm/symbolic.hpp"

namespace fipm {

enum class SystemKind { kAugmented, kNormalEquations };
enum class SystemChoice { kAuto, kAugmented, kNormalEquations };

const char* systemKindString(SystemKind kind);

struct RegularizationParams {
  double primal = 1e-10;
  double dual = 1e-10;
};

// Right-hand side blocks of the Newton system.
struct Residuals {
  std::vector<double> r1;  // b - A x
  std::vector<double> r2;  // l - x + x^l on the lower set
  std::vector<double> r3;  // u - x - x^u on the upper set
  std::vector<double> r4;  // c - A^T y - z^l + z^u
  std::vector<double> r5;  // sigma mu e - X^l Z^l e
  std::vector<double> r6;  // sigma mu e - X^u Z^u e

  static Residuals zeros(Index m, Index n);
};

struct Direction {
  std::vector<double> dx, dy, dxl, dxu, dzl, dzu;

  static Direction zeros(Index m, Index n);
  // this += alpha * other
  void add(const Direction& other, double alpha = 1.0);
};

// Theta^{-1} = z^l/x^l + z^u/x^u with absent terms omitted.
std::vector<double> computeInvTheta(const IterationPoint& point,
                                    const InternalLp& lp);

// r7 = r4 - (X^l)^{-1}(r5 + Z^l r2) + (X^u)^{-1}(r6 - Z^u r3)
std::vector<double> reduceRhs(const Residuals& res, const IterationPoint& point,
                              const InternalLp& lp);
// r8 = r1 + A Theta r7 for a given (regularised) Theta.
std::vector<double> normalEquationsRhs(const CscMatrix& a,
                                       std::span<const double> theta,
                                       std::span<const double> r1,
                                       std::span<const double> r7);

struct KktSystem {
  SystemKind kind = SystemKind::kAugmented;
  CscMatrix matrix;  // lower triangle
  std::vector<int> tags;
};

// Lower triangle of [-(Theta^{-1} + R_p), A^T; A, R_d]; x rows first.
KktSystem formAugmented(const CscMatrix& a, std::span<const double> inv_theta,
                        const RegularizationParams& reg);

// Lower triangle of A (Theta^{-1} + R_p)^{-1} A^T + R_d, or nothing once the
// number of stored entries exceeds abort_threshold.
std::optional<KktSystem> formNormalEquations(const CscMatrix& a,
                                             std::span<const double> inv_theta,
                                             const RegularizationParams& reg,
                                             Index abort_threshold);

struct SystemSelection {
  SystemKind kind = SystemKind::kAugmented;
  SymbolicFactorization augmented;
  std::optional<SymbolicFactorization> normal;
  bool normal_aborted = false;
};

// Runs the augmented symbolic analysis, then tries the normal equations
// with nnz(L) of the augmented factor as abort threshold and keeps the
// cheaper one (ties go to the normal equations). Free columns force the
// augmented system unless the normal equations are requested.
SystemSelection chooseSystem(const CscMatrix& a, bool has_free_columns,
                             SystemChoice choice,
                             const SymbolicOptions& options = {});

// Completes a direction from (dx, dy) of the reduced system.
Direction recoverDirection(std::vector<double> dx, std::vector<double> dy,
                           const Residuals& res, const IterationPoint& point,
                           const InternalLp& lp);

struct KktOptions {
  SystemChoice choice = SystemChoice::kAuto;
  RegularizationParams reg;
  FactorOptions factor;
  SymbolicOptions symbolic;
  Index refinement_cap = 2;
};

struct SolveStats {
  Index refinement_passes = 0;
  double backward_error = 0.0;
};

// Owns the symbolic analysis for one LP and refactorises per iterate.
class NewtonSolver {
 public:
  NewtonSolver(const InternalLp& lp, const KktOptions& options);

  SystemKind kind() const { return kind_; }
  const SymbolicFactorization& symbolic() const { return symbolic_; }
  const RegularizationParams& regularization() const { return reg_; }
  void setRegularization(const RegularizationParams& reg) { reg_ = reg; }

  // Forms and factorises the system for the given Theta^{-1}.
  // Throws NumericalFailure.
  void factorize(std::span<const double> inv_theta);
  bool factorized() const { return fact_.has_value(); }
  const NumericFactorization& factorization() const { return *fact_; }
  const KktSystem& system() const { return system_; }

  // Solves -(Theta^{-1}+R_p) dx + A^T dy = fx, A dx + R_d dy = fy.
  void solveReduced(std::span<const double> fx, std::span<const double> fy,
                    std::vector<double>& dx, std::vector<double>& dy,
                    SolveStats* stats = nullptr) const;

  // Full Newton direction for the given residuals at the factorised point.
  Direction solve(const Residuals& res, const IterationPoint& point,
                  SolveStats* stats = nullptr) const;

  double formSeconds() const { return form_seconds_; }
  double factorSeconds() const { return factor_seconds_; }
  double solveSeconds() const { return solve_seconds_; }

 private:
  const InternalLp& lp_;
  KktOptions options_;
  RegularizationParams reg_;
  SystemKind kind_;
  SymbolicFactorization symbolic_;
  KktSystem system_;
  std::vector<double> theta_;  // regularised Theta
  std::vector<double> shift_;  // static diagonal used by refinement
  std::optional<NumericFactorization> fact_;
  double form_seconds_ = 0.0;
  double factor_seconds_ = 0.0;
  mutable double solve_seconds_ = 0.0;
};

}  // namespace fipm
