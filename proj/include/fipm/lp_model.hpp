#pragma once

#include <string>
#include <vector>

#include "fipm/scaling.hpp"
#include "fipm/sparse_matrix.hpp"

namespace fipm {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual, kRanged };

const char* rowSenseString(RowSense sense);

// min c^T x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper
// A row with row_lower == row_upper is an equality, one infinite side gives
// a <= or >= row, two finite sides a ranged row.
struct UserLp {
  std::string name;
  Index num_rows = 0;
  Index num_cols = 0;
  CscMatrix matrix;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  std::vector<double> cost;
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  double objective_offset = 0.0;
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;

  RowSense sense(Index i) const;
  // Right-hand side of a non-ranged row.
  double rhs(Index i) const;

  // Throws ModelError when dimensions, bounds or values are invalid.
  void validate() const;
};

// Internal bounded-variable form:
//   min c^T x  s.t.  A x = b,  x - x^l = l,  x + x^u = u,  x^l, x^u >= 0.
// Columns [0, num_user_cols) are the user columns, the rest are slacks.
struct InternalLp {
  Index num_rows = 0;
  Index num_cols = 0;
  Index num_user_cols = 0;
  CscMatrix a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> lower;
  std::vector<double> upper;

  // Per user row: slack column (or -1 for equalities) and its sense.
  std::vector<Index> slack_col;
  std::vector<RowSense> row_sense;

  // Scaling provenance. col_scale has n entries: C_j for user columns and
  // 1/R_i for the slack of row i.
  ScalingFactors scaling;
  std::vector<double> col_scale;
  double objective_offset = 0.0;

  bool hasLower(Index j) const { return lower[j] > -kInf; }
  bool hasUpper(Index j) const { return upper[j] < kInf; }
  bool isFree(Index j) const { return !hasLower(j) && !hasUpper(j); }
  Index numBounded() const;
  Index numFree() const;
};

// Primal-dual iterate. Gaps off the bound sets are +inf and their
// multipliers are 0.
struct IterationPoint {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> xl;
  std::vector<double> xu;
  std::vector<double> zl;
  std::vector<double> zu;

  static IterationPoint zeros(const InternalLp& lp);
};

struct UserSolution {
  Status status = Status::kNumericalFailure;
  Index iterations = 0;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> reduced_cost;
  std::vector<double> row_activity;
  // Nonnegative distance to the active side of each inequality row (0 for
  // equality rows).
  std::vector<double> row_slack;
  std::vector<double> row_dual;
};

// Adds one slack per inequality row after applying the scaling factors.
// <= rows get +s with s in [0, inf), >= rows get -s with s in [0, inf) and
// ranged rows get +s with s in [0, U - L].
InternalLp toInternal(const UserLp& user, const ScalingFactors& scaling);
InternalLp toInternal(const UserLp& user);

UserSolution recoverUserSolution(const IterationPoint& point,
                                 const InternalLp& lp, const UserLp& user);

struct ObjectiveValues {
  double primal;
  double dual;
};
ObjectiveValues objectiveValues(const IterationPoint& point,
                                const InternalLp& lp);

}  // namespace fipm
