#pragma once

#include <span>
#include <vector>

#include "fipm/sparse_matrix.hpp"

namespace fipm {

// Row multipliers R and column multipliers C; the scaled matrix is R A C.
struct ScalingFactors {
  std::vector<double> row;
  std::vector<double> col;
  // False when Curtis-Reid hit its iteration cap and fell back to identity.
  bool converged = true;
  Index cg_iterations = 0;

  static ScalingFactors identity(Index num_rows, Index num_cols);
  bool isIdentity() const;
};

struct CurtisReidOptions {
  Index max_iterations = 100;
  double tolerance = 1e-6;
};

// Least-squares fit of log2|a_ij| + rho_i + gamma_j = 0 by conjugate
// gradients on the normal equations, started from zero.
ScalingFactors curtisReid(const CscMatrix& matrix,
                          const CurtisReidOptions& options = {});

CscMatrix applyScaling(const CscMatrix& matrix, const ScalingFactors& factors);

// b -> R b
std::vector<double> scaleRowValues(std::span<const double> values,
                                   std::span<const double> row_scale);
// c -> C c
std::vector<double> scaleCost(std::span<const double> cost,
                              std::span<const double> col_scale);
// l, u -> C^{-1} l, C^{-1} u (infinite entries stay infinite)
std::vector<double> scaleBounds(std::span<const double> bounds,
                                std::span<const double> col_scale);

// x -> C x
std::vector<double> unscalePrimal(std::span<const double> x,
                                  std::span<const double> col_scale);
// y -> R y
std::vector<double> unscaleRowDuals(std::span<const double> y,
                                    std::span<const double> row_scale);
// z -> C^{-1} z
std::vector<double> unscaleColumnDuals(std::span<const double> z,
                                       std::span<const double> col_scale);

}  // namespace fipm
