#include "fipm/scaling.hpp"

#include <cmath>

namespace fipm {

ScalingFactors ScalingFactors::identity(Index num_rows, Index num_cols) {
  ScalingFactors f;
  f.row.assign(num_rows, 1.0);
  f.col.assign(num_cols, 1.0);
  return f;
}

bool ScalingFactors::isIdentity() const {
  for (double r : row)
    if (r != 1.0) return false;
  for (double c : col)
    if (c != 1.0) return false;
  return true;
}

namespace {

// Applies the normal-equations operator [D_r S; S^T D_c] of the log-scaling
// least-squares problem. v = [rho; gamma].
void normalOperator(const CscMatrix& a, const std::vector<double>& row_count,
                    const std::vector<double>& col_count,
                    const std::vector<double>& v, std::vector<double>& out) {
  const Index m = a.rows;
  for (Index i = 0; i < m; ++i) out[i] = row_count[i] * v[i];
  for (Index j = 0; j < a.cols; ++j) {
    double sum = col_count[j] * v[m + j];
    for (Index p = a.colBegin(j); p < a.colEnd(j); ++p) {
      const Index i = a.row_index[p];
      out[i] += v[m + j];
      sum += v[i];
    }
    out[m + j] = sum;
  }
}

double dot(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

}  // namespace

ScalingFactors curtisReid(const CscMatrix& a,
                          const CurtisReidOptions& options) {
  const Index m = a.rows;
  const Index n = a.cols;
  const Index dim = m + n;

  std::vector<double> row_count(m, 0.0), col_count(n, 0.0);
  // rhs = -B^T t with t_ij = log2|a_ij|
  std::vector<double> rhs(dim, 0.0);
  for (Index j = 0; j < n; ++j) {
    for (Index p = a.colBegin(j); p < a.colEnd(j); ++p) {
      if (a.value[p] == 0.0) continue;
      const Index i = a.row_index[p];
      const double t = std::log2(std::abs(a.value[p]));
      row_count[i] += 1.0;
      col_count[j] += 1.0;
      rhs[i] -= t;
      rhs[m + j] -= t;
    }
  }

  ScalingFactors result = ScalingFactors::identity(m, n);
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  if (rhs_norm == 0.0) return result;

  // The operator must skip explicit zeros just like rhs does.
  CscMatrix pattern = a;
  {
    Index q = 0;
    for (Index j = 0; j < n; ++j) {
      const Index begin = pattern.col_start[j];
      pattern.col_start[j] = q;
      for (Index p = begin; p < a.colEnd(j); ++p) {
        if (a.value[p] == 0.0) continue;
        pattern.row_index[q] = a.row_index[p];
        pattern.value[q] = 1.0;
        ++q;
      }
    }
    pattern.col_start[n] = q;
    pattern.row_index.resize(q);
    pattern.value.resize(q);
  }

  std::vector<double> v(dim, 0.0), r = rhs, d = rhs, q(dim);
  double rr = dot(r, r);
  bool converged = false;
  Index iter = 0;
  while (iter < options.max_iterations) {
    normalOperator(pattern, row_count, col_count, d, q);
    const double dq = dot(d, q);
    if (dq <= 0.0) break;
    const double alpha = rr / dq;
    for (Index k = 0; k < dim; ++k) {
      v[k] += alpha * d[k];
      r[k] -= alpha * q[k];
    }
    ++iter;
    const double rr_new = dot(r, r);
    if (std::sqrt(rr_new) <= options.tolerance * rhs_norm) {
      converged = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (Index k = 0; k < dim; ++k) d[k] = r[k] + beta * d[k];
  }
  result.cg_iterations = iter;
  if (!converged) {
    result.converged = false;
    return result;
  }
  for (Index i = 0; i < m; ++i) result.row[i] = std::exp2(v[i]);
  for (Index j = 0; j < n; ++j) result.col[j] = std::exp2(v[m + j]);
  return result;
}

CscMatrix applyScaling(const CscMatrix& matrix, const ScalingFactors& f) {
  CscMatrix scaled = matrix;
  for (Index j = 0; j < matrix.cols; ++j)
    for (Index p = matrix.colBegin(j); p < matrix.colEnd(j); ++p)
      scaled.value[p] = f.row[matrix.row_index[p]] * matrix.value[p] * f.col[j];
  return scaled;
}

std::vector<double> scaleRowValues(std::span<const double> values,
                                   std::span<const double> row_scale) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = values[i] * row_scale[i];
  return out;
}

std::vector<double> scaleCost(std::span<const double> cost,
                              std::span<const double> col_scale) {
  std::vector<double> out(cost.size());
  for (std::size_t j = 0; j < cost.size(); ++j) out[j] = cost[j] * col_scale[j];
  return out;
}

std::vector<double> scaleBounds(std::span<const double> bounds,
                                std::span<const double> col_scale) {
  std::vector<double> out(bounds.size());
  for (std::size_t j = 0; j < bounds.size(); ++j)
    out[j] = std::isinf(bounds[j]) ? bounds[j] : bounds[j] / col_scale[j];
  return out;
}

std::vector<double> unscalePrimal(std::span<const double> x,
                                  std::span<const double> col_scale) {
  return scaleCost(x, col_scale);
}

std::vector<double> unscaleRowDuals(std::span<const double> y,
                                    std::span<const double> row_scale) {
  return scaleRowValues(y, row_scale);
}

std::vector<double> unscaleColumnDuals(std::span<const double> z,
                                       std::span<const double> col_scale) {
  std::vector<double> out(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] / col_scale[j];
  return out;
}

}  // namespace fipm
