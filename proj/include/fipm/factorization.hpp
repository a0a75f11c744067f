#pragma once

#include <span>
#include <vector>

#include "fipm/dense_kernels.hpp"
#include "fipm/sparse_matrix.hpp"
#include "fipm/symbolic.hpp"

namespace fipm {

struct FactorOptions {
  PivotParams pivot;
  Index block_size = 64;
};

// Dense columns of one supernode of L, in packed trapezoidal storage: column
// t holds rows t..rows.size()-1. Row labels are original variable indices,
// the first num_pivots of them in pivot order.
struct FactorBlock {
  Index num_pivots = 0;
  std::vector<Index> rows;
  std::vector<double> l;
  // D restricted to this block; d_off[t] = D(t+1, t) for a 2x2 pivot.
  std::vector<int> pivot_size;
  std::vector<double> d_diag;
  std::vector<double> d_off;

  Index order() const { return static_cast<Index>(rows.size()); }
  double lAt(Index i, Index t) const { return l[packedIndex(order(), i, t)]; }
};

struct PerturbationEntry {
  Index var;
  double static_amount;
  double dynamic_amount;
};

// P (M + E) P^T = L D L^T with E the diagonal perturbation.
class NumericFactorization {
 public:
  Index size() const { return n_; }
  // perm[k] = original variable at position k.
  const std::vector<Index>& perm() const { return perm_; }
  const std::vector<FactorBlock>& blocks() const { return blocks_; }
  // Per original variable: static and dynamic perturbations added.
  const std::vector<double>& staticPerturbation() const { return static_; }
  const std::vector<double>& dynamicPerturbation() const { return dynamic_; }
  std::vector<PerturbationEntry> perturbationLedger() const;
  double maxDynamicPerturbation() const;
  Index numTwoByTwo() const { return num_2x2_; }
  Index entriesWritten() const;

  std::vector<double> solve(std::span<const double> rhs) const;
  void solveInPlace(std::span<double> x) const;

 private:
  friend NumericFactorization factorize(const CscMatrix&, std::span<const int>,
                                        const SymbolicFactorization&,
                                        const FactorOptions&);
  Index n_ = 0;
  std::vector<Index> perm_;
  std::vector<FactorBlock> blocks_;
  std::vector<double> static_;
  std::vector<double> dynamic_;
  Index num_2x2_ = 0;
};

// Multifrontal LDL^T of the lower triangle `lower` with row sign tags
// (-1 or +1). Throws NumericalFailure carrying the failing supernode.
NumericFactorization factorize(const CscMatrix& lower, std::span<const int> tags,
                               const SymbolicFactorization& symbolic,
                               const FactorOptions& options = {});

// max_i |M d - f|_i / (|M||d| + |f|)_i with guarded denominators. M is the
// lower triangle plus an optional diagonal shift.
double backwardError(const CscMatrix& lower, std::span<const double> shift,
                     std::span<const double> d, std::span<const double> f);

struct RefineResult {
  std::vector<double> x;
  // Backward error of the plain solve followed by one value per correction.
  std::vector<double> omega;
  double final_omega = 0.0;
  Index corrections = 0;
};

RefineResult refine(const CscMatrix& lower, std::span<const double> shift,
                    const NumericFactorization& fact,
                    std::span<const double> rhs, Index max_passes);

}  // namespace fipm
