#pragma once

#include <span>
#include <vector>

#include "fipm/types.hpp"

namespace fipm {

// Compressed sparse column matrix. Row indices within a column are sorted
// and unique. Symmetric matrices are stored as their lower triangle,
// diagonal included.
struct CscMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> col_start{0};
  std::vector<Index> row_index;
  std::vector<double> value;

  CscMatrix() = default;
  CscMatrix(Index num_rows, Index num_cols)
      : rows(num_rows), cols(num_cols), col_start(num_cols + 1, 0) {}

  Index nnz() const { return static_cast<Index>(row_index.size()); }
  Index colBegin(Index j) const { return col_start[j]; }
  Index colEnd(Index j) const { return col_start[j + 1]; }

  // Build from (row, col, value) triplets; duplicates are summed.
  static CscMatrix fromTriplets(Index num_rows, Index num_cols,
                                std::span<const Index> ti,
                                std::span<const Index> tj,
                                std::span<const double> tv);

  CscMatrix transpose() const;

  // y += alpha * A * x
  void multiplyAdd(double alpha, std::span<const double> x,
                   std::span<double> y) const;
  // y += alpha * A^T * x
  void multiplyTransposeAdd(double alpha, std::span<const double> x,
                            std::span<double> y) const;

  // Dense row-major copy; test and debugging aid.
  std::vector<double> toDense() const;
};

// Operations on a symmetric matrix held as its lower triangle.
namespace symmetric {

// y = M x
std::vector<double> multiply(const CscMatrix& lower, std::span<const double> x);
// y = |M| |x|
std::vector<double> absMultiply(const CscMatrix& lower,
                                std::span<const double> x);
// Full symmetric pattern (both triangles, with diagonal), values dropped.
CscMatrix fullPattern(const CscMatrix& lower);
// Dense row-major n x n copy of the full symmetric matrix.
std::vector<double> toDense(const CscMatrix& lower);

}  // namespace symmetric

double infNorm(std::span<const double> v);

}  // namespace fipm
