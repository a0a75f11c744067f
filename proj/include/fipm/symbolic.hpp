#pragma once

#include <span>
#include <vector>

#include "fipm/sparse_matrix.hpp"

namespace fipm {

struct SymbolicOptions {
  bool amalgamate = true;
  // Merge a child supernode into its parent when the explicit zeros this
  // adds are at most max(min_extra, fraction * child entries).
  Index amalgamation_min_extra = 16;
  double amalgamation_fraction = 0.1;
  // Largest factor (stored entries) accepted before OutOfMemoryError.
  Index max_entries = Index{1} << 40;
};

// Ordering, elimination tree and supernodal structure of a symmetric matrix.
// Labels are positions after permutation unless stated otherwise.
struct SymbolicFactorization {
  Index n = 0;
  std::vector<Index> perm;   // perm[k] = original index at position k
  std::vector<Index> iperm;  // iperm[perm[k]] = k
  std::vector<Index> parent; // elimination tree, -1 for roots; parent > j
  std::vector<Index> col_count;  // nonzeros of each column of L, diagonal included
  Index nnz_l = 0;       // sum of col_count
  Index nnz_stored = 0;  // entries held by the supernodal factor
  Index flops = 0;

  // Supernode s covers columns [sn_start[s], sn_start[s+1]).
  std::vector<Index> sn_start;
  // Rows of L below the supernode's columns, ascending.
  std::vector<std::vector<Index>> sn_rows;
  std::vector<Index> sn_parent;  // -1 for roots
  // Position of each entry of sn_rows[s] within the parent front.
  std::vector<std::vector<Index>> sn_rel;
  Index max_front = 0;

  Index numSupernodes() const {
    return static_cast<Index>(sn_start.size()) - 1;
  }
  Index frontOrder(Index s) const {
    return sn_start[s + 1] - sn_start[s] + static_cast<Index>(sn_rows[s].size());
  }
};

// Symbolic analysis of a matrix given as its lower triangle. When perm is
// empty an approximate minimum degree ordering is computed.
SymbolicFactorization analyse(const CscMatrix& lower,
                              const SymbolicOptions& options = {},
                              std::span<const Index> perm = {});

// Flops of eliminating k pivots from a dense front of the given order.
Index denseFactorFlops(Index order, Index k);

}  // namespace fipm
