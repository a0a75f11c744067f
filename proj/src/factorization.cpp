#include "fipm/factorization.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

namespace fipm {

NumericFactorization factorize(const CscMatrix& lower, std::span<const int> tags,
                               const SymbolicFactorization& sym,
                               const FactorOptions& options) {
  const Index n = sym.n;
  assert(lower.cols == n && static_cast<Index>(tags.size()) == n);

  // Entries of P M P^T bucketed by (permuted) column, lower triangle.
  std::vector<Index> count(n + 1, 0);
  for (Index j = 0; j < n; ++j)
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p)
      ++count[std::min(sym.iperm[lower.row_index[p]], sym.iperm[j]) + 1];
  for (Index j = 0; j < n; ++j) count[j + 1] += count[j];
  std::vector<Index> entry_row(lower.nnz());
  std::vector<double> entry_val(lower.nnz());
  {
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (Index j = 0; j < n; ++j) {
      for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
        const Index a = sym.iperm[lower.row_index[p]];
        const Index b = sym.iperm[j];
        const Index k = next[std::min(a, b)]++;
        entry_row[k] = std::max(a, b);
        entry_val[k] = lower.value[p];
      }
    }
  }

  NumericFactorization fact;
  fact.n_ = n;
  fact.perm_.reserve(n);
  fact.static_.assign(n, 0.0);
  fact.dynamic_.assign(n, 0.0);
  const Index ns = sym.numSupernodes();
  fact.blocks_.resize(ns);

  std::vector<Index> local(n, -1);
  std::vector<std::vector<double>> stack;
  std::vector<Index> stack_owner;

  for (Index s = 0; s < ns; ++s) {
    const Index first = sym.sn_start[s];
    const Index k = sym.sn_start[s + 1] - first;
    const std::vector<Index>& below = sym.sn_rows[s];
    const Index order = k + static_cast<Index>(below.size());

    FrontalMatrix front(order, k, options.block_size);
    std::vector<Index> front_vars(order);
    for (Index t = 0; t < k; ++t) {
      local[first + t] = t;
      front_vars[t] = sym.perm[first + t];
    }
    for (Index t = 0; t < static_cast<Index>(below.size()); ++t) {
      local[below[t]] = k + t;
      front_vars[k + t] = sym.perm[below[t]];
    }
    for (Index t = 0; t < order; ++t) front.tags()[t] = tags[front_vars[t]];

    for (Index c = first; c < first + k; ++c)
      for (Index q = count[c]; q < count[c + 1]; ++q)
        front.at(local[entry_row[q]], local[c]) += entry_val[q];

    // Children sit on top of the stack, ascending; add them in that order.
    std::size_t base = stack.size();
    while (base > 0 && sym.sn_parent[stack_owner[base - 1]] == s) --base;
    for (std::size_t q = base; q < stack.size(); ++q)
      assembleExtendAdd(front, stack[q], sym.sn_rel[stack_owner[q]]);
    stack.resize(base);
    stack_owner.resize(base);

    PartialFactorResult pf;
    try {
      pf = partialFactor(front, options.pivot);
    } catch (const PivotBreakdown& e) {
      throw NumericalFailure(std::string(e.what()) + " in supernode " +
                                 std::to_string(s),
                             s);
    }

    FactorBlock& block = fact.blocks_[s];
    block.num_pivots = k;
    block.rows.resize(order);
    for (Index t = 0; t < k; ++t) block.rows[t] = front_vars[pf.local_perm[t]];
    for (Index t = k; t < order; ++t) block.rows[t] = front_vars[t];
    const std::vector<double>& data = front.data();
    const Index lsize = packedIndex(order, k, k);
    block.l.assign(data.begin(), data.begin() + lsize);
    block.pivot_size = pf.pivot_size;
    block.d_diag = pf.d_diag;
    block.d_off = pf.d_off;
    for (Index t = 0; t < k; ++t) {
      const Index v = block.rows[t];
      fact.perm_.push_back(v);
      fact.static_[v] = pf.static_added[t];
      fact.dynamic_[v] = pf.dynamic_added[t];
      if (pf.pivot_size[t] == 2) ++fact.num_2x2_;
    }

    if (order > k && sym.sn_parent[s] >= 0) {
      stack.emplace_back(data.begin() + lsize, data.end());
      stack_owner.push_back(s);
    }
    for (Index t = 0; t < k; ++t) local[first + t] = -1;
    for (Index v : below) local[v] = -1;
  }
  return fact;
}

std::vector<PerturbationEntry> NumericFactorization::perturbationLedger() const {
  std::vector<PerturbationEntry> ledger;
  for (Index v = 0; v < n_; ++v)
    if (static_[v] != 0.0 || dynamic_[v] != 0.0)
      ledger.push_back({v, static_[v], dynamic_[v]});
  return ledger;
}

double NumericFactorization::maxDynamicPerturbation() const {
  double m = 0.0;
  for (double d : dynamic_) m = std::max(m, std::abs(d));
  return m;
}

Index NumericFactorization::entriesWritten() const {
  Index total = 0;
  for (const FactorBlock& b : blocks_) total += static_cast<Index>(b.l.size());
  return total;
}

std::vector<double> NumericFactorization::solve(
    std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solveInPlace(x);
  return x;
}

void NumericFactorization::solveInPlace(std::span<double> x) const {
  // Forward substitution with unit L.
  for (const FactorBlock& b : blocks_) {
    const Index r = b.order();
    for (Index t = 0; t < b.num_pivots; ++t) {
      const double xt = x[b.rows[t]];
      if (xt == 0.0) continue;
      const double* col = b.l.data() + packedIndex(r, t, t);
      for (Index i = t + 1; i < r; ++i) x[b.rows[i]] -= col[i - t] * xt;
    }
  }
  // Block diagonal.
  for (const FactorBlock& b : blocks_) {
    for (Index t = 0; t < b.num_pivots; ++t) {
      if (b.pivot_size[t] == 2) {
        const double a = b.d_diag[t], c = b.d_diag[t + 1], off = b.d_off[t];
        const double det = a * c - off * off;
        double& u = x[b.rows[t]];
        double& w = x[b.rows[t + 1]];
        const double nu = (c * u - off * w) / det;
        const double nw = (a * w - off * u) / det;
        u = nu;
        w = nw;
        ++t;
      } else {
        x[b.rows[t]] /= b.d_diag[t];
      }
    }
  }
  // Backward substitution with L^T.
  for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
    const FactorBlock& b = *it;
    const Index r = b.order();
    for (Index t = b.num_pivots - 1; t >= 0; --t) {
      const double* col = b.l.data() + packedIndex(r, t, t);
      double sum = x[b.rows[t]];
      for (Index i = t + 1; i < r; ++i) sum -= col[i - t] * x[b.rows[i]];
      x[b.rows[t]] = sum;
    }
  }
}

namespace {

std::vector<double> residual(const CscMatrix& lower,
                             std::span<const double> shift,
                             std::span<const double> d,
                             std::span<const double> f) {
  std::vector<double> r = symmetric::multiply(lower, d);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!shift.empty()) r[i] += shift[i] * d[i];
    r[i] = f[i] - r[i];
  }
  return r;
}

}  // namespace

double backwardError(const CscMatrix& lower, std::span<const double> shift,
                     std::span<const double> d, std::span<const double> f) {
  const Index n = lower.cols;
  const std::vector<double> r = residual(lower, shift, d, f);
  std::vector<double> md = symmetric::absMultiply(lower, d);
  std::vector<double> ones(n, 1.0);
  std::vector<double> me = symmetric::absMultiply(lower, ones);
  if (!shift.empty()) {
    for (Index i = 0; i < n; ++i) {
      md[i] += std::abs(shift[i] * d[i]);
      me[i] += std::abs(shift[i]);
    }
  }
  const double dnorm = infNorm(d);
  constexpr double kTiny = 1e-300;
  double omega = 0.0;
  for (Index i = 0; i < n; ++i) {
    double den = md[i] + std::abs(f[i]);
    if (den <= kTiny) den = md[i] + dnorm * me[i];
    if (den <= kTiny) continue;
    omega = std::max(omega, std::abs(r[i]) / den);
  }
  return omega;
}

RefineResult refine(const CscMatrix& lower, std::span<const double> shift,
                    const NumericFactorization& fact,
                    std::span<const double> rhs, Index max_passes) {
  constexpr double kTarget = 1e-14;
  RefineResult res;
  res.x = fact.solve(rhs);
  double omega = backwardError(lower, shift, res.x, rhs);
  res.omega.push_back(omega);
  for (Index pass = 0; pass < max_passes; ++pass) {
    if (omega <= kTarget) break;
    std::vector<double> r = residual(lower, shift, res.x, rhs);
    fact.solveInPlace(r);
    std::vector<double> next = res.x;
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += r[i];
    const double next_omega = backwardError(lower, shift, next, rhs);
    res.omega.push_back(next_omega);
    ++res.corrections;
    const bool halved = next_omega <= 0.5 * omega;
    if (next_omega < omega) {
      res.x = std::move(next);
      omega = next_omega;
    }
    if (!halved) break;
  }
  res.final_omega = omega;
  return res;
}

}  // namespace fipm
