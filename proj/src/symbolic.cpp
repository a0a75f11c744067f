#include "fipm/symbolic.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "fipm/ordering.hpp"

namespace fipm {

namespace {

Index checkedAdd(Index a, Index b) {
  Index r;
  if (__builtin_add_overflow(a, b, &r))
    throw OutOfMemoryError("factor size overflows the index type");
  return r;
}

Index checkedMul(Index a, Index b) {
  Index r;
  if (__builtin_mul_overflow(a, b, &r))
    throw OutOfMemoryError("factor size overflows the index type");
  return r;
}

// Entries stored for a dense trapezoid with k columns and r extra rows.
Index trapezoid(Index k, Index r) {
  return checkedAdd(checkedMul(k, k + 1) / 2, checkedMul(k, r));
}

struct Node {
  Index first;
  Index last;  // exclusive
  std::vector<Index> rows;
};

}  // namespace

Index denseFactorFlops(Index order, Index k) {
  Index flops = 0;
  for (Index t = 0; t < k; ++t) {
    const Index c = order - t - 1;
    flops = checkedAdd(flops, checkedAdd(c, checkedMul(c, c + 1)));
  }
  return flops;
}

SymbolicFactorization analyse(const CscMatrix& lower,
                              const SymbolicOptions& options,
                              std::span<const Index> user_perm) {
  const Index n = lower.cols;
  SymbolicFactorization sym;
  sym.n = n;

  std::vector<Index> order;
  if (user_perm.empty()) {
    std::vector<Index> identity(n);
    std::iota(identity.begin(), identity.end(), Index{0});
    order = approximateMinimumDegree(permuteSymmetricPattern(lower, identity));
  } else {
    order.assign(user_perm.begin(), user_perm.end());
  }

  // Relabel so the elimination tree is postordered.
  {
    const CscMatrix full = permuteSymmetricPattern(lower, order);
    const std::vector<Index> parent = eliminationTree(full);
    const std::vector<Index> post = postorder(parent);
    sym.perm.resize(n);
    for (Index k = 0; k < n; ++k) sym.perm[k] = order[post[k]];
  }
  sym.iperm = inversePermutation(sym.perm);
  const CscMatrix full = permuteSymmetricPattern(lower, sym.perm);
  sym.parent = eliminationTree(full);

  // Column structures from row subtrees.
  std::vector<std::vector<Index>> col_rows(n);
  std::vector<Index> mark(n, -1);
  Index total = 0;
  for (Index i = 0; i < n; ++i) {
    mark[i] = i;
    for (Index p = full.colBegin(i); p < full.colEnd(i); ++p) {
      Index j = full.row_index[p];
      if (j >= i) continue;
      while (mark[j] != i) {
        col_rows[j].push_back(i);
        total = checkedAdd(total, 1);
        if (total > options.max_entries)
          throw OutOfMemoryError("factor exceeds the entry limit");
        mark[j] = i;
        j = sym.parent[j];
        assert(j >= 0);
      }
    }
  }
  sym.col_count.resize(n);
  sym.nnz_l = 0;
  for (Index j = 0; j < n; ++j) {
    sym.col_count[j] = static_cast<Index>(col_rows[j].size()) + 1;
    sym.nnz_l = checkedAdd(sym.nnz_l, sym.col_count[j]);
  }
  if (sym.nnz_l > options.max_entries)
    throw OutOfMemoryError("factor exceeds the entry limit");

  // Fundamental supernodes.
  std::vector<Index> num_children(n, 0);
  for (Index j = 0; j < n; ++j)
    if (sym.parent[j] >= 0) ++num_children[sym.parent[j]];
  std::vector<Node> nodes;
  for (Index j = 0; j < n; ++j) {
    const bool extend = j > 0 && sym.parent[j - 1] == j &&
                        num_children[j] == 1 &&
                        sym.col_count[j - 1] == sym.col_count[j] + 1;
    if (extend) {
      nodes.back().last = j + 1;
    } else {
      nodes.push_back({j, j + 1, {}});
    }
  }
  for (Node& node : nodes) node.rows = std::move(col_rows[node.last - 1]);

  // Amalgamation of a parent with the child numbered just before it.
  std::vector<Node> merged;
  for (Node& node : nodes) {
    merged.push_back(std::move(node));
    while (options.amalgamate && merged.size() >= 2) {
      Node& par = merged[merged.size() - 1];
      Node& child = merged[merged.size() - 2];
      if (sym.parent[child.last - 1] != par.first) break;
      const Index kc = child.last - child.first;
      const Index kp = par.last - par.first;
      const Index rc = static_cast<Index>(child.rows.size());
      const Index rp = static_cast<Index>(par.rows.size());
      const Index child_entries = trapezoid(kc, rc);
      const Index extra =
          trapezoid(kc + kp, rp) - child_entries - trapezoid(kp, rp);
      const double allowed =
          std::max(static_cast<double>(options.amalgamation_min_extra),
                   options.amalgamation_fraction * child_entries);
      if (static_cast<double>(extra) > allowed) break;
      par.first = child.first;
      merged.erase(merged.end() - 2);
    }
  }

  const Index ns = static_cast<Index>(merged.size());
  sym.sn_start.resize(ns + 1);
  sym.sn_rows.resize(ns);
  std::vector<Index> sn_of(n);
  for (Index s = 0; s < ns; ++s) {
    sym.sn_start[s] = merged[s].first;
    sym.sn_rows[s] = std::move(merged[s].rows);
    for (Index j = merged[s].first; j < merged[s].last; ++j) sn_of[j] = s;
  }
  sym.sn_start[ns] = n;

  sym.sn_parent.assign(ns, -1);
  sym.sn_rel.resize(ns);
  sym.nnz_stored = 0;
  sym.flops = 0;
  sym.max_front = 0;
  for (Index s = 0; s < ns; ++s) {
    const Index k = sym.sn_start[s + 1] - sym.sn_start[s];
    const Index r = static_cast<Index>(sym.sn_rows[s].size());
    sym.nnz_stored = checkedAdd(sym.nnz_stored, trapezoid(k, r));
    sym.flops = checkedAdd(sym.flops, denseFactorFlops(k + r, k));
    sym.max_front = std::max(sym.max_front, k + r);
    const Index last = sym.sn_start[s + 1] - 1;
    if (sym.parent[last] < 0) continue;
    const Index par = sn_of[sym.parent[last]];
    sym.sn_parent[s] = par;
    const Index pf = sym.sn_start[par];
    const Index pk = sym.sn_start[par + 1] - pf;
    const std::vector<Index>& prow = sym.sn_rows[par];
    std::vector<Index>& rel = sym.sn_rel[s];
    rel.reserve(r);
    std::size_t q = 0;
    for (Index v : sym.sn_rows[s]) {
      if (v < pf + pk) {
        rel.push_back(v - pf);
      } else {
        while (q < prow.size() && prow[q] < v) ++q;
        assert(q < prow.size() && prow[q] == v);
        rel.push_back(pk + static_cast<Index>(q));
      }
    }
  }
  if (sym.nnz_stored > options.max_entries)
    throw OutOfMemoryError("factor exceeds the entry limit");
  return sym;
}

}  // namespace fipm
