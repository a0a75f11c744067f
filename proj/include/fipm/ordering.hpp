#pragma once

#include <span>
#include <vector>

#include "fipm/sparse_matrix.hpp"

namespace fipm {

// Approximate minimum degree ordering of a symmetric pattern given with both
// triangles (diagonal entries are ignored). Returns perm with perm[k] the
// index eliminated k-th. Ties go to the smallest index.
std::vector<Index> approximateMinimumDegree(const CscMatrix& full_pattern);

// Full symmetric pattern of P M P^T in the new labels, where perm[k] is the
// old index placed at position k. Input is a lower triangle.
CscMatrix permuteSymmetricPattern(const CscMatrix& lower,
                                  std::span<const Index> perm);

std::vector<Index> inversePermutation(std::span<const Index> perm);

// parent[j] = min{i > j : L_ij != 0}, -1 for roots, from the full pattern.
std::vector<Index> eliminationTree(const CscMatrix& full_pattern);

// Postorder visiting children in ascending order; post[k] = node at
// position k.
std::vector<Index> postorder(std::span<const Index> parent);

}  // namespace fipm
