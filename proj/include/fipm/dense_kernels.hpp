#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fipm/types.hpp"

namespace fipm {

struct PivotParams {
  double alpha = (std::sqrt(17.0) + 1.0) / 8.0;
  double delta = 64.0 * std::numeric_limits<double>::epsilon();
  // Added to every pivot with the sign of its row tag.
  double static_primal = 1e-10;
  double static_dual = 1e-10;
  // A dynamic perturbation larger than this multiple of ||B_D||_1 is a
  // breakdown.
  double catastrophe = 1e-2;

  double staticFor(int tag) const {
    return tag < 0 ? static_primal : static_dual;
  }
};

// Thrown by the dense kernels; the sparse layer converts it into
// NumericalFailure with the supernode index attached.
class PivotBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PivotRule {
  kLift,        // tiny column, pivot lifted to delta ||M||_1
  kAccept,      // |M_pp| >= alpha gamma_p
  kAcceptRatio, // |M_pp| gamma_r >= alpha gamma_p^2
  kSwap,        // |M_rr| >= alpha gamma_r, r moved into position p
  kTwoByTwo,    // 2x2 pivot (p, r)
  kFallback,    // 2x2 refused, p lifted instead
  kSecondOfPair // second position of a 2x2 pivot
};

const char* pivotRuleString(PivotRule rule);

// Result of factorising one diagonal block. Positions are local to the
// block; swaps are listed in the order they were performed.
struct PivotKernelResult {
  std::vector<std::pair<Index, Index>> swaps;
  std::vector<PivotRule> rule;
  // 1 for a 1x1 pivot, 2 at the first position of a 2x2 pivot, 0 at its
  // second position.
  std::vector<int> pivot_size;
  std::vector<double> d_diag;
  // D(c+1, c) for a 2x2 pivot starting at c, zero otherwise.
  std::vector<double> d_off;
  std::vector<double> static_added;
  std::vector<double> dynamic_added;
  double norm1 = 0.0;
};

// Factorises the size x size symmetric block whose lower triangle is stored
// row-major with leading dimension ld. On exit the strict lower triangle
// holds the unit lower factor (with L(c+1,c) = 0 for 2x2 pivots); the
// diagonal and the 2x2 off-diagonals hold D. tags are permuted with the
// rows. Throws PivotBreakdown.
PivotKernelResult pivotKernel(double* block, Index ld, Index size,
                              std::span<int> tags, const PivotParams& params);

// Packed lower-triangular column storage: column j holds rows j..n-1.
inline Index packedSize(Index n) { return n * (n + 1) / 2; }
inline Index packedIndex(Index n, Index i, Index j) {
  return j * n - j * (j - 1) / 2 + (i - j);
}

enum class FrontLayout { kPacked, kHybrid };

// Dense symmetric frontal matrix. Packed layout stores the lower triangle
// column by column. Hybrid layout groups nb columns into blocks; each block
// keeps rows from its first column down, stored row by row, with the upper
// part of its diagonal square padded with zeros.
class FrontalMatrix {
 public:
  FrontalMatrix() = default;
  FrontalMatrix(Index order, Index num_pivots, Index nb);

  Index order() const { return order_; }
  Index numPivots() const { return num_pivots_; }
  Index blockWidth() const { return nb_; }
  FrontLayout layout() const { return layout_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<int>& tags() { return tags_; }
  const std::vector<int>& tags() const { return tags_; }

  // Lower-triangle entry (i >= j) in the current layout.
  double& at(Index i, Index j);
  double at(Index i, Index j) const;

  void toHybrid();
  void toPacked();

  Index numBlocks() const { return order_ == 0 ? 0 : (order_ - 1) / nb_ + 1; }
  Index blockOffset(Index b) const { return block_offset_[b]; }
  Index blockStart(Index b) const { return b * nb_; }
  Index blockWidthOf(Index b) const;

 private:
  Index order_ = 0;
  Index num_pivots_ = 0;
  Index nb_ = 1;
  FrontLayout layout_ = FrontLayout::kPacked;
  std::vector<double> data_;
  std::vector<int> tags_;
  std::vector<Index> block_offset_;
};

// Bit-exact layout conversions on raw arrays.
void packedToHybrid(Index n, Index nb, const double* packed, double* hybrid);
void hybridToPacked(Index n, Index nb, const double* hybrid, double* packed);
Index hybridSize(Index n, Index nb);

// Child contribution (packed, order = rel.size()) added into the parent
// front, which must be in packed layout. rel is strictly increasing.
void assembleExtendAdd(FrontalMatrix& parent, std::span<const double> child,
                       std::span<const Index> rel);

struct PartialFactorResult {
  // local_perm[k] = original local row now at position k (k < num pivots)
  std::vector<Index> local_perm;
  std::vector<int> pivot_size;
  std::vector<double> d_diag;
  std::vector<double> d_off;
  std::vector<double> static_added;
  std::vector<double> dynamic_added;
  std::vector<PivotRule> rule;
  std::vector<double> block_norm1;
};

// Eliminates the first numPivots() rows of a packed front. On exit the
// front is packed again: the pivot columns hold the unit lower factor and
// the trailing triangle holds the Schur complement. Throws PivotBreakdown.
PartialFactorResult partialFactor(FrontalMatrix& front,
                                  const PivotParams& params);

namespace dense {

// C(i, j) -= sum_c A(i, c) B(j, c) for row-major A (rows x k) and
// B (cols x k); C is row-major with leading dimension ldc.
void gemmNT(Index rows, Index cols, Index k, const double* a, Index lda,
            const double* b, Index ldb, double* c, Index ldc);
// Lower triangle of C (n x n) -= A A^T-style product sum_c A(i,c) B(j,c).
void syrkLowerNT(Index n, Index k, const double* a, Index lda,
                 const double* b, Index ldb, double* c, Index ldc);
// X <- X L^{-T} for unit lower L (n x n, row-major) and X rows x n.
void trsmRightUnitLowerT(Index rows, Index n, const double* l, Index ldl,
                         double* x, Index ldx);

}  // namespace dense

}  // namespace fipm
