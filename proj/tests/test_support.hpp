#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fipm/lp_model.hpp"
#include "fipm/sparse_matrix.hpp"

namespace testing {

using fipm::CscMatrix;
using fipm::Index;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index randint(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

// Row-major dense n x n symmetric matrix.
struct Dense {
  Index n = 0;
  std::vector<double> v;

  explicit Dense(Index order = 0) : n(order), v(order * order, 0.0) {}
  double& operator()(Index i, Index j) { return v[i * n + j]; }
  double operator()(Index i, Index j) const { return v[i * n + j]; }
  void setSym(Index i, Index j, double x) {
    (*this)(i, j) = x;
    (*this)(j, i) = x;
  }
  double maxAbs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

// Lower triangle in CSC, keeping every diagonal entry even when zero.
inline CscMatrix lowerOf(const Dense& d) {
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index j = 0; j < d.n; ++j)
    for (Index i = j; i < d.n; ++i)
      if (i == j || d(i, j) != 0.0) {
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(d(i, j));
      }
  return CscMatrix::fromTriplets(d.n, d.n, ti, tj, tv);
}

inline Dense denseOf(const CscMatrix& lower) {
  Dense d(lower.rows);
  d.v = fipm::symmetric::toDense(lower);
  return d;
}

// Quasi-definite matrix: the first n1 rows (tag -1) form a negative definite
// block and the remaining n2 rows (tag +1) a positive definite one.
struct QuasiDefinite {
  Dense m;
  std::vector<int> tags;
};

inline QuasiDefinite randomQuasiDefinite(Rng& rng, Index n1, Index n2,
                                         double density) {
  const Index n = n1 + n2;
  QuasiDefinite q{Dense(n), std::vector<int>(n, 1)};
  for (Index i = 0; i < n1; ++i) q.tags[i] = -1;
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i)
      if (coin(rng, density)) q.m.setSym(i, j, uniform(rng, -1.0, 1.0));
  // Diagonal dominance inside each block keeps both blocks definite.
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (j == i || q.tags[j] != q.tags[i]) continue;
      off += std::abs(q.m(i, j));
    }
    q.m(i, i) = q.tags[i] * (off + uniform(rng, 0.5, 2.0));
  }
  return q;
}

// Random symmetric pattern (lower triangle with full diagonal), values
// chosen so that the matrix is diagonally dominant.
inline CscMatrix randomSpdPattern(Rng& rng, Index n, double density) {
  Dense d(n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i)
      if (coin(rng, density)) d.setSym(i, j, uniform(rng, -1.0, 1.0));
  for (Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Index j = 0; j < n; ++j)
      if (j != i) off += std::abs(d(i, j));
    d(i, i) = off + 1.0;
  }
  return lowerOf(d);
}

// Small random user LP with mixed row senses and bound types. Every column
// has at least one nonzero and every equality row at least one.
inline fipm::UserLp randomUserLp(Rng& rng, Index m, Index n,
                                 bool allow_free = true) {
  fipm::UserLp lp;
  lp.num_rows = m;
  lp.num_cols = n;
  std::vector<double> a(m * n, 0.0);
  auto entry = [&] {
    return uniform(rng, 0.5, 2.0) * (coin(rng, 0.5) ? 1.0 : -1.0);
  };
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i)
      if (coin(rng, 0.6)) a[i * n + j] = entry();
    a[randint(rng, 0, m - 1) * n + j] = entry();
  }
  for (Index i = 0; i < m; ++i) {
    bool any = false;
    for (Index j = 0; j < n; ++j) any = any || a[i * n + j] != 0.0;
    if (!any) a[i * n + randint(rng, 0, n - 1)] = entry();
  }
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (a[i * n + j] != 0.0) {
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(a[i * n + j]);
      }
  lp.matrix = CscMatrix::fromTriplets(m, n, ti, tj, tv);
  for (Index i = 0; i < m; ++i) {
    const double r = uniform(rng, -2.0, 2.0);
    switch (randint(rng, 0, 3)) {
      case 0:
        lp.row_lower.push_back(-fipm::kInf);
        lp.row_upper.push_back(r);
        break;
      case 1:
        lp.row_lower.push_back(r);
        lp.row_upper.push_back(r);
        break;
      case 2:
        lp.row_lower.push_back(r);
        lp.row_upper.push_back(fipm::kInf);
        break;
      default:
        lp.row_lower.push_back(r);
        lp.row_upper.push_back(r + uniform(rng, 0.5, 3.0));
        break;
    }
  }
  for (Index j = 0; j < n; ++j) {
    lp.cost.push_back(uniform(rng, -1.0, 1.0));
    const double l = uniform(rng, -2.0, 0.0);
    switch (randint(rng, 0, allow_free ? 3 : 2)) {
      case 0:
        lp.col_lower.push_back(l);
        lp.col_upper.push_back(fipm::kInf);
        break;
      case 1:
        lp.col_lower.push_back(-fipm::kInf);
        lp.col_upper.push_back(l + 1.0);
        break;
      case 2:
        lp.col_lower.push_back(l);
        lp.col_upper.push_back(l + uniform(rng, 0.5, 3.0));
        break;
      default:
        lp.col_lower.push_back(-fipm::kInf);
        lp.col_upper.push_back(fipm::kInf);
        break;
    }
  }
  return lp;
}

// Strictly interior point: gaps and multipliers drawn from [lo, hi], x and y
// arbitrary.
inline fipm::IterationPoint randomInteriorPoint(Rng& rng,
                                                const fipm::InternalLp& lp,
                                                double lo = 0.5,
                                                double hi = 2.0) {
  fipm::IterationPoint pt = fipm::IterationPoint::zeros(lp);
  for (Index j = 0; j < lp.num_cols; ++j) {
    pt.x[j] = uniform(rng, -1.0, 1.0);
    if (lp.hasLower(j)) {
      pt.xl[j] = uniform(rng, lo, hi);
      pt.zl[j] = uniform(rng, lo, hi);
    }
    if (lp.hasUpper(j)) {
      pt.xu[j] = uniform(rng, lo, hi);
      pt.zu[j] = uniform(rng, lo, hi);
    }
  }
  for (Index i = 0; i < lp.num_rows; ++i) pt.y[i] = uniform(rng, -1.0, 1.0);
  return pt;
}

inline double relDiff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing
