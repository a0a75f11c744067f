#include "fipm/lp_model.hpp"

#include <cmath>

namespace fipm {

const char* rowSenseString(RowSense sense) {
  switch (sense) {
    case RowSense::kLessEqual:
      return "L";
    case RowSense::kEqual:
      return "E";
    case RowSense::kGreaterEqual:
      return "G";
    case RowSense::kRanged:
      return "R";
  }
  return "?";
}

RowSense UserLp::sense(Index i) const {
  const double lo = row_lower[i];
  const double up = row_upper[i];
  if (lo == up) return RowSense::kEqual;
  if (lo == -kInf) return RowSense::kLessEqual;
  if (up == kInf) return RowSense::kGreaterEqual;
  return RowSense::kRanged;
}

double UserLp::rhs(Index i) const {
  return sense(i) == RowSense::kGreaterEqual ? row_lower[i] : row_upper[i];
}

namespace {

std::string rowLabel(const UserLp& lp, Index i) {
  if (i < static_cast<Index>(lp.row_names.size())) return lp.row_names[i];
  return "row " + std::to_string(i);
}

std::string colLabel(const UserLp& lp, Index j) {
  if (j < static_cast<Index>(lp.col_names.size())) return lp.col_names[j];
  return "column " + std::to_string(j);
}

}  // namespace

void UserLp::validate() const {
  const auto m = static_cast<std::size_t>(num_rows);
  const auto n = static_cast<std::size_t>(num_cols);
  if (matrix.rows != num_rows || matrix.cols != num_cols ||
      row_lower.size() != m || row_upper.size() != m || cost.size() != n ||
      col_lower.size() != n || col_upper.size() != n)
    throw ModelError("inconsistent model dimensions");

  for (double v : matrix.value)
    if (!std::isfinite(v)) throw ModelError("non-finite matrix entry");
  if (std::isnan(objective_offset))
    throw ModelError("objective offset is NaN");

  std::vector<Index> row_count(m, 0);
  for (Index i : matrix.row_index) ++row_count[i];

  for (Index i = 0; i < num_rows; ++i) {
    const double lo = row_lower[i];
    const double up = row_upper[i];
    if (std::isnan(lo) || std::isnan(up) || lo == kInf || up == -kInf)
      throw ModelError("invalid bounds on " + rowLabel(*this, i));
    if (lo > up)
      throw ModelError("infeasible row bounds on " + rowLabel(*this, i));
    if (lo == -kInf && up == kInf)
      throw ModelError("free row " + rowLabel(*this, i) + " is not supported");
    if (row_count[i] == 0 && sense(i) == RowSense::kEqual)
      throw ModelError("empty equality row " + rowLabel(*this, i));
  }
  for (Index j = 0; j < num_cols; ++j) {
    const double lo = col_lower[j];
    const double up = col_upper[j];
    if (!std::isfinite(cost[j]))
      throw ModelError("non-finite cost on " + colLabel(*this, j));
    if (std::isnan(lo) || std::isnan(up) || lo == kInf || up == -kInf)
      throw ModelError("invalid bounds on " + colLabel(*this, j));
    if (lo > up)
      throw ModelError("infeasible bounds on " + colLabel(*this, j));
    if (matrix.colBegin(j) == matrix.colEnd(j))
      throw ModelError("empty " + colLabel(*this, j));
  }
}

Index InternalLp::numBounded() const {
  Index count = 0;
  for (Index j = 0; j < num_cols; ++j)
    count += static_cast<Index>(hasLower(j)) + static_cast<Index>(hasUpper(j));
  return count;
}

Index InternalLp::numFree() const {
  Index count = 0;
  for (Index j = 0; j < num_cols; ++j) count += isFree(j);
  return count;
}

IterationPoint IterationPoint::zeros(const InternalLp& lp) {
  IterationPoint pt;
  pt.x.assign(lp.num_cols, 0.0);
  pt.y.assign(lp.num_rows, 0.0);
  pt.xl.assign(lp.num_cols, kInf);
  pt.xu.assign(lp.num_cols, kInf);
  pt.zl.assign(lp.num_cols, 0.0);
  pt.zu.assign(lp.num_cols, 0.0);
  return pt;
}

InternalLp toInternal(const UserLp& user) {
  return toInternal(user,
                    ScalingFactors::identity(user.num_rows, user.num_cols));
}

InternalLp toInternal(const UserLp& user, const ScalingFactors& scaling) {
  user.validate();
  const Index m = user.num_rows;
  const Index nu = user.num_cols;
  const std::vector<double>& rs = scaling.row;
  const std::vector<double>& cs = scaling.col;

  InternalLp lp;
  lp.num_rows = m;
  lp.num_user_cols = nu;
  lp.scaling = scaling;
  lp.objective_offset = user.objective_offset;
  lp.slack_col.assign(m, -1);
  lp.row_sense.resize(m);

  lp.c = scaleCost(user.cost, cs);
  lp.lower = scaleBounds(user.col_lower, cs);
  lp.upper = scaleBounds(user.col_upper, cs);
  lp.col_scale = cs;
  lp.b.resize(m);

  // Scaled user columns, then one singleton column per inequality row.
  CscMatrix scaled = applyScaling(user.matrix, scaling);
  lp.a = CscMatrix(m, nu);
  lp.a.col_start = scaled.col_start;
  lp.a.row_index = scaled.row_index;
  lp.a.value = scaled.value;

  Index n = nu;
  for (Index i = 0; i < m; ++i) {
    const RowSense sense = user.sense(i);
    lp.row_sense[i] = sense;
    double coef = 1.0;
    double s_upper = kInf;
    switch (sense) {
      case RowSense::kEqual:
        lp.b[i] = rs[i] * user.row_lower[i];
        continue;
      case RowSense::kLessEqual:
        lp.b[i] = rs[i] * user.row_upper[i];
        break;
      case RowSense::kGreaterEqual:
        lp.b[i] = rs[i] * user.row_lower[i];
        coef = -1.0;
        break;
      case RowSense::kRanged:
        lp.b[i] = rs[i] * user.row_upper[i];
        s_upper = rs[i] * (user.row_upper[i] - user.row_lower[i]);
        break;
    }
    lp.slack_col[i] = n++;
    lp.a.row_index.push_back(i);
    lp.a.value.push_back(coef);
    lp.a.col_start.push_back(lp.a.nnz());
    lp.c.push_back(0.0);
    lp.lower.push_back(0.0);
    lp.upper.push_back(s_upper);
    lp.col_scale.push_back(1.0 / rs[i]);
  }
  lp.a.cols = n;
  lp.num_cols = n;
  return lp;
}

ObjectiveValues objectiveValues(const IterationPoint& pt,
                                const InternalLp& lp) {
  ObjectiveValues obj{0.0, 0.0};
  for (Index j = 0; j < lp.num_cols; ++j) obj.primal += lp.c[j] * pt.x[j];
  for (Index i = 0; i < lp.num_rows; ++i) obj.dual += lp.b[i] * pt.y[i];
  for (Index j = 0; j < lp.num_cols; ++j) {
    if (lp.hasLower(j)) obj.dual += lp.lower[j] * pt.zl[j];
    if (lp.hasUpper(j)) obj.dual -= lp.upper[j] * pt.zu[j];
  }
  return obj;
}

UserSolution recoverUserSolution(const IterationPoint& pt,
                                 const InternalLp& lp, const UserLp& user) {
  const Index m = lp.num_rows;
  const Index nu = lp.num_user_cols;
  const std::vector<double>& rs = lp.scaling.row;

  UserSolution sol;
  sol.x.resize(nu);
  sol.reduced_cost.resize(nu);
  for (Index j = 0; j < nu; ++j) {
    const double cj = lp.col_scale[j];
    sol.x[j] = cj * pt.x[j];
    double z = 0.0;
    if (lp.hasLower(j)) z += pt.zl[j];
    if (lp.hasUpper(j)) z -= pt.zu[j];
    sol.reduced_cost[j] = z / cj;
  }

  sol.row_activity.assign(m, 0.0);
  user.matrix.multiplyAdd(1.0, sol.x, sol.row_activity);

  sol.row_slack.assign(m, 0.0);
  sol.row_dual.resize(m);
  for (Index i = 0; i < m; ++i) {
    const Index s = lp.slack_col[i];
    if (s < 0) {
      sol.row_dual[i] = rs[i] * pt.y[i];
      continue;
    }
    // The gap x^l is strictly positive at every iterate, unlike x or y.
    sol.row_slack[i] = pt.xl[s] / rs[i];
    double dual = 0.0;
    switch (lp.row_sense[i]) {
      case RowSense::kLessEqual:
        dual = -pt.zl[s];
        break;
      case RowSense::kGreaterEqual:
        dual = pt.zl[s];
        break;
      case RowSense::kRanged:
        dual = pt.zu[s] - pt.zl[s];
        break;
      case RowSense::kEqual:
        break;
    }
    sol.row_dual[i] = rs[i] * dual;
  }

  sol.objective = user.objective_offset;
  for (Index j = 0; j < nu; ++j) sol.objective += user.cost[j] * sol.x[j];
  return sol;
}

}  // namespace fipm
