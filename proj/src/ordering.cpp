#include "fipm/ordering.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <utility>

namespace fipm {

std::vector<Index> inversePermutation(std::span<const Index> perm) {
  std::vector<Index> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  return inv;
}

CscMatrix permuteSymmetricPattern(const CscMatrix& lower,
                                  std::span<const Index> perm) {
  const Index n = lower.cols;
  const std::vector<Index> inv = inversePermutation(perm);
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index j = 0; j < n; ++j) {
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
      const Index i = lower.row_index[p];
      const Index a = inv[i], b = inv[j];
      ti.push_back(a);
      tj.push_back(b);
      tv.push_back(1.0);
      if (a != b) {
        ti.push_back(b);
        tj.push_back(a);
        tv.push_back(1.0);
      }
    }
  }
  return CscMatrix::fromTriplets(n, n, ti, tj, tv);
}

std::vector<Index> eliminationTree(const CscMatrix& full) {
  const Index n = full.cols;
  std::vector<Index> parent(n, -1), ancestor(n, -1);
  for (Index i = 0; i < n; ++i) {
    for (Index p = full.colBegin(i); p < full.colEnd(i); ++p) {
      Index k = full.row_index[p];
      if (k >= i) continue;
      // Walk from k to the root of its current subtree, compressing paths.
      while (k != -1 && k < i) {
        const Index next = ancestor[k];
        ancestor[k] = i;
        if (next == -1) {
          parent[k] = i;
          break;
        }
        k = next;
      }
    }
  }
  return parent;
}

std::vector<Index> postorder(std::span<const Index> parent) {
  const Index n = static_cast<Index>(parent.size());
  std::vector<Index> head(n, -1), next(n, -1);
  // Insert children in descending order so lists come out ascending.
  for (Index j = n - 1; j >= 0; --j) {
    if (parent[j] < 0) continue;
    next[j] = head[parent[j]];
    head[parent[j]] = j;
  }
  std::vector<Index> post;
  post.reserve(n);
  std::vector<Index> stack;
  for (Index root = 0; root < n; ++root) {
    if (parent[root] >= 0) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      const Index v = stack.back();
      const Index c = head[v];
      if (c == -1) {
        post.push_back(v);
        stack.pop_back();
      } else {
        head[v] = next[c];
        stack.push_back(c);
      }
    }
  }
  assert(static_cast<Index>(post.size()) == n);
  return post;
}

namespace {

// Quotient-graph state for approximate minimum degree.
class Amd {
 public:
  explicit Amd(const CscMatrix& full);
  std::vector<Index> run();

 private:
  void eliminate(Index p, Index remaining);

  Index n_;
  std::vector<std::vector<Index>> var_adj_;
  std::vector<std::vector<Index>> elem_adj_;
  std::vector<std::vector<Index>> elem_vars_;
  std::vector<Index> degree_;
  std::vector<char> eliminated_;
  std::vector<char> dead_elem_;
  std::vector<Index> mark_;
  std::vector<Index> w_;
  Index stamp_ = 0;
  std::set<std::pair<Index, Index>> queue_;
};

Amd::Amd(const CscMatrix& full)
    : n_(full.cols),
      var_adj_(n_),
      elem_adj_(n_),
      elem_vars_(n_),
      degree_(n_, 0),
      eliminated_(n_, 0),
      dead_elem_(n_, 0),
      mark_(n_, -1),
      w_(n_, -1) {
  for (Index j = 0; j < n_; ++j) {
    for (Index p = full.colBegin(j); p < full.colEnd(j); ++p) {
      const Index i = full.row_index[p];
      if (i != j) var_adj_[j].push_back(i);
    }
    degree_[j] = static_cast<Index>(var_adj_[j].size());
    queue_.emplace(degree_[j], j);
  }
}

void Amd::eliminate(Index p, Index remaining) {
  // L_p: variables reachable through p's variables and elements.
  ++stamp_;
  mark_[p] = stamp_;
  std::vector<Index> lp;
  for (Index i : var_adj_[p]) {
    if (eliminated_[i] || mark_[i] == stamp_) continue;
    mark_[i] = stamp_;
    lp.push_back(i);
  }
  for (Index e : elem_adj_[p]) {
    if (dead_elem_[e]) continue;
    for (Index i : elem_vars_[e]) {
      if (eliminated_[i] || mark_[i] == stamp_) continue;
      mark_[i] = stamp_;
      lp.push_back(i);
    }
    dead_elem_[e] = 1;
    elem_vars_[e].clear();
  }
  std::sort(lp.begin(), lp.end());
  eliminated_[p] = 1;
  var_adj_[p].clear();
  elem_adj_[p].clear();
  elem_vars_[p] = lp;
  const Index lp_size = static_cast<Index>(lp.size());

  // Prune variable lists and attach the new element.
  for (Index i : lp) {
    auto& ea = elem_adj_[i];
    ea.erase(std::remove_if(ea.begin(), ea.end(),
                            [&](Index e) { return dead_elem_[e] != 0; }),
             ea.end());
    ea.push_back(p);
    auto& va = var_adj_[i];
    va.erase(std::remove_if(va.begin(), va.end(),
                            [&](Index v) {
                              return eliminated_[v] || mark_[v] == stamp_;
                            }),
             va.end());
  }

  // |L_e \ L_p| for the other elements touching L_p.
  std::vector<Index> touched;
  for (Index i : lp) {
    for (Index e : elem_adj_[i]) {
      if (e == p) continue;
      if (w_[e] < 0) {
        auto& ev = elem_vars_[e];
        ev.erase(std::remove_if(ev.begin(), ev.end(),
                                [&](Index v) { return eliminated_[v] != 0; }),
                 ev.end());
        w_[e] = static_cast<Index>(ev.size());
        touched.push_back(e);
      }
      --w_[e];
    }
  }
  // Elements covered by L_p are absorbed.
  for (Index e : touched) {
    if (w_[e] == 0) {
      dead_elem_[e] = 1;
      elem_vars_[e].clear();
    }
  }

  for (Index i : lp) {
    auto& ea = elem_adj_[i];
    ea.erase(std::remove_if(ea.begin(), ea.end(),
                            [&](Index e) { return dead_elem_[e] != 0; }),
             ea.end());
    Index external = static_cast<Index>(var_adj_[i].size()) + lp_size - 1;
    for (Index e : ea)
      if (e != p) external += w_[e];
    const Index d = std::min({remaining - 1, degree_[i] + lp_size - 1, external});
    queue_.erase({degree_[i], i});
    degree_[i] = std::max<Index>(d, 0);
    queue_.emplace(degree_[i], i);
  }
  for (Index e : touched) w_[e] = -1;
}

std::vector<Index> Amd::run() {
  std::vector<Index> perm;
  perm.reserve(n_);
  while (!queue_.empty()) {
    const Index p = queue_.begin()->second;
    queue_.erase(queue_.begin());
    perm.push_back(p);
    eliminate(p, n_ - static_cast<Index>(perm.size()));
  }
  return perm;
}

}  // namespace

std::vector<Index> approximateMinimumDegree(const CscMatrix& full_pattern) {
  Amd amd(full_pattern);
  return amd.run();
}

}  // namespace fipm
