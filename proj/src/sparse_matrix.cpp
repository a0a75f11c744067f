#include "fipm/sparse_matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace fipm {

const char* statusString(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "Optimal";
    case Status::kImprecise:
      return "Imprecise";
    case Status::kIterationLimit:
      return "IterationLimit";
    case Status::kTimeLimit:
      return "TimeLimit";
    case Status::kNumericalFailure:
      return "NumericalFailure";
    case Status::kOutOfMemory:
      return "OutOfMemory";
  }
  return "Unknown";
}

CscMatrix CscMatrix::fromTriplets(Index num_rows, Index num_cols,
                                  std::span<const Index> ti,
                                  std::span<const Index> tj,
                                  std::span<const double> tv) {
  assert(ti.size() == tj.size() && ti.size() == tv.size());
  const Index count = static_cast<Index>(ti.size());

  // Stable counting sort by column, then sort each column by row.
  std::vector<Index> order(count);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return tj[a] != tj[b] ? tj[a] < tj[b] : ti[a] < ti[b];
  });

  CscMatrix mat(num_rows, num_cols);
  mat.row_index.reserve(count);
  mat.value.reserve(count);
  Index k = 0;
  for (Index j = 0; j < num_cols; ++j) {
    Index last_row = -1;
    while (k < count && tj[order[k]] == j) {
      const Index e = order[k];
      assert(ti[e] >= 0 && ti[e] < num_rows);
      if (ti[e] == last_row) {
        mat.value.back() += tv[e];
      } else {
        mat.row_index.push_back(ti[e]);
        mat.value.push_back(tv[e]);
        last_row = ti[e];
      }
      ++k;
    }
    mat.col_start[j + 1] = mat.nnz();
  }
  assert(k == count);
  return mat;
}

CscMatrix CscMatrix::transpose() const {
  CscMatrix t(cols, rows);
  std::vector<Index> count(rows + 1, 0);
  for (Index i : row_index) ++count[i + 1];
  std::partial_sum(count.begin(), count.end(), t.col_start.begin());
  t.row_index.resize(nnz());
  t.value.resize(nnz());
  std::vector<Index> next(t.col_start.begin(), t.col_start.end() - 1);
  for (Index j = 0; j < cols; ++j) {
    for (Index p = colBegin(j); p < colEnd(j); ++p) {
      const Index dest = next[row_index[p]]++;
      t.row_index[dest] = j;
      t.value[dest] = value[p];
    }
  }
  return t;
}

void CscMatrix::multiplyAdd(double alpha, std::span<const double> x,
                            std::span<double> y) const {
  for (Index j = 0; j < cols; ++j) {
    const double xj = alpha * x[j];
    if (xj == 0.0) continue;
    for (Index p = colBegin(j); p < colEnd(j); ++p)
      y[row_index[p]] += value[p] * xj;
  }
}

void CscMatrix::multiplyTransposeAdd(double alpha, std::span<const double> x,
                                     std::span<double> y) const {
  for (Index j = 0; j < cols; ++j) {
    double sum = 0.0;
    for (Index p = colBegin(j); p < colEnd(j); ++p)
      sum += value[p] * x[row_index[p]];
    y[j] += alpha * sum;
  }
}

std::vector<double> CscMatrix::toDense() const {
  std::vector<double> dense(static_cast<std::size_t>(rows * cols), 0.0);
  for (Index j = 0; j < cols; ++j)
    for (Index p = colBegin(j); p < colEnd(j); ++p)
      dense[row_index[p] * cols + j] += value[p];
  return dense;
}

namespace symmetric {

std::vector<double> multiply(const CscMatrix& lower,
                             std::span<const double> x) {
  std::vector<double> y(lower.rows, 0.0);
  for (Index j = 0; j < lower.cols; ++j) {
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
      const Index i = lower.row_index[p];
      y[i] += lower.value[p] * x[j];
      if (i != j) y[j] += lower.value[p] * x[i];
    }
  }
  return y;
}

std::vector<double> absMultiply(const CscMatrix& lower,
                                std::span<const double> x) {
  std::vector<double> y(lower.rows, 0.0);
  for (Index j = 0; j < lower.cols; ++j) {
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
      const Index i = lower.row_index[p];
      const double a = std::abs(lower.value[p]);
      y[i] += a * std::abs(x[j]);
      if (i != j) y[j] += a * std::abs(x[i]);
    }
  }
  return y;
}

CscMatrix fullPattern(const CscMatrix& lower) {
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index j = 0; j < lower.cols; ++j) {
    ti.push_back(j);
    tj.push_back(j);
    tv.push_back(0.0);
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
      const Index i = lower.row_index[p];
      if (i == j) continue;
      ti.push_back(i);
      tj.push_back(j);
      tv.push_back(0.0);
      ti.push_back(j);
      tj.push_back(i);
      tv.push_back(0.0);
    }
  }
  return CscMatrix::fromTriplets(lower.rows, lower.cols, ti, tj, tv);
}

std::vector<double> toDense(const CscMatrix& lower) {
  const Index n = lower.rows;
  std::vector<double> dense(static_cast<std::size_t>(n * n), 0.0);
  for (Index j = 0; j < lower.cols; ++j) {
    for (Index p = lower.colBegin(j); p < lower.colEnd(j); ++p) {
      const Index i = lower.row_index[p];
      dense[i * n + j] = lower.value[p];
      dense[j * n + i] = lower.value[p];
    }
  }
  return dense;
}

}  // namespace symmetric

double infNorm(std::span<const double> v) {
  double norm = 0.0;
  for (double x : v) norm = std::max(norm, std::abs(x));
  return norm;
}

}  // namespace fipm
