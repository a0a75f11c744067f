#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fipm/lp_model.hpp"
#include "fipm/scaling.hpp"
#include "test_support.hpp"

using namespace fipm;
using testing::Rng;

namespace {

// One column, one row: min x s.t. lo <= x <= up (row), col bounds given.
UserLp singleRow(double row_lo, double row_up, double col_lo, double col_up) {
  UserLp lp;
  lp.num_rows = 1;
  lp.num_cols = 1;
  const std::vector<Index> ti{0}, tj{0};
  const std::vector<double> tv{1.0};
  lp.matrix = CscMatrix::fromTriplets(1, 1, ti, tj, tv);
  lp.row_lower = {row_lo};
  lp.row_upper = {row_up};
  lp.cost = {1.0};
  lp.col_lower = {col_lo};
  lp.col_upper = {col_up};
  return lp;
}

}  // namespace

TEST_CASE("<= row gains a +1 slack in [0, inf)") {
  const InternalLp lp = toInternal(singleRow(-kInf, 5.0, 0.0, kInf));
  CHECK(lp.num_cols == 2);
  CHECK(lp.num_user_cols == 1);
  CHECK(lp.slack_col[0] == 1);
  CHECK(lp.a.toDense() == std::vector<double>{1.0, 1.0});
  CHECK(lp.b[0] == 5.0);
  CHECK(lp.lower[1] == 0.0);
  CHECK(lp.upper[1] == kInf);
  CHECK(lp.c[1] == 0.0);
}

TEST_CASE("equality row adds no slack") {
  const InternalLp lp = toInternal(singleRow(5.0, 5.0, 0.0, kInf));
  CHECK(lp.num_cols == 1);
  CHECK(lp.slack_col[0] == -1);
  CHECK(lp.b[0] == 5.0);
}

TEST_CASE(">= row with a free column gets x - s = b, s in [0, inf)") {
  const InternalLp lp = toInternal(singleRow(5.0, kInf, -kInf, kInf));
  CHECK(lp.num_cols == 2);
  CHECK(lp.a.toDense() == std::vector<double>{1.0, -1.0});
  CHECK(lp.b[0] == 5.0);
  CHECK(lp.lower[1] == 0.0);
  CHECK(lp.upper[1] == kInf);
  CHECK(lp.isFree(0));
  CHECK(lp.numFree() == 1);
}

TEST_CASE("ranged row slack is bounded by the range width") {
  const InternalLp lp = toInternal(singleRow(1.0, 4.0, 0.0, kInf));
  CHECK(lp.b[0] == 4.0);
  CHECK(lp.lower[1] == 0.0);
  CHECK(lp.upper[1] == 3.0);
  CHECK(lp.row_sense[0] == RowSense::kRanged);
}

TEST_CASE("invalid models raise ModelError") {
  CHECK_THROWS_AS(toInternal(singleRow(-kInf, 5.0, 2.0, 1.0)), ModelError);
  CHECK_THROWS_AS(toInternal(singleRow(3.0, 1.0, 0.0, 1.0)), ModelError);
  UserLp nan_cost = singleRow(-kInf, 5.0, 0.0, 1.0);
  nan_cost.cost[0] = std::nan("");
  CHECK_THROWS_AS(toInternal(nan_cost), ModelError);
  UserLp bad_dims = singleRow(-kInf, 5.0, 0.0, 1.0);
  bad_dims.col_upper.push_back(1.0);
  CHECK_THROWS_AS(toInternal(bad_dims), ModelError);
  UserLp empty_col = singleRow(-kInf, 5.0, 0.0, 1.0);
  empty_col.num_cols = 2;
  empty_col.matrix = CscMatrix(1, 2);
  empty_col.matrix.col_start = {0, 1, 1};
  empty_col.matrix.row_index = {0};
  empty_col.matrix.value = {1.0};
  empty_col.cost.push_back(0.0);
  empty_col.col_lower.push_back(0.0);
  empty_col.col_upper.push_back(1.0);
  CHECK_THROWS_AS(toInternal(empty_col), ModelError);
}

TEST_CASE("fixed variables stay two-sided") {
  const InternalLp lp = toInternal(singleRow(-kInf, 5.0, 2.0, 2.0));
  CHECK(lp.hasLower(0));
  CHECK(lp.hasUpper(0));
  CHECK(lp.lower[0] == 2.0);
  CHECK(lp.upper[0] == 2.0);
}

TEST_CASE("recovery with identity scaling on an equality LP") {
  const UserLp user = singleRow(5.0, 5.0, 0.0, kInf);
  const InternalLp lp = toInternal(user);
  IterationPoint pt = IterationPoint::zeros(lp);
  pt.x = {5.0};
  pt.y = {0.75};
  pt.xl = {5.0};
  pt.zl = {0.25};
  const UserSolution sol = recoverUserSolution(pt, lp, user);
  CHECK(sol.x[0] == 5.0);
  CHECK(sol.row_dual[0] == 0.75);
  CHECK(sol.row_slack[0] == 0.0);
  CHECK(sol.reduced_cost[0] == 0.25);
  CHECK(sol.objective == 5.0);
}

TEST_CASE("<= row slack comes from the gap, not from x") {
  const UserLp user = singleRow(-kInf, 5.0, 0.0, kInf);
  const InternalLp lp = toInternal(user);
  IterationPoint pt = IterationPoint::zeros(lp);
  pt.x = {5.0, -1e-12};
  pt.xl = {5.0, 0.0};
  pt.zl = {1.0, 2.0};
  const UserSolution sol = recoverUserSolution(pt, lp, user);
  CHECK(sol.row_slack[0] == 0.0);
  CHECK(sol.row_dual[0] == -2.0);
}

TEST_CASE("row dual signs follow the row sense") {
  const UserLp ge = singleRow(1.0, kInf, 0.0, kInf);
  const InternalLp lge = toInternal(ge);
  IterationPoint p = IterationPoint::zeros(lge);
  p.xl = {1.0, 0.5};
  p.zl = {1.0, 3.0};
  CHECK(recoverUserSolution(p, lge, ge).row_dual[0] == 3.0);
  CHECK(recoverUserSolution(p, lge, ge).row_slack[0] == 0.5);

  const UserLp rg = singleRow(1.0, 4.0, 0.0, kInf);
  const InternalLp lrg = toInternal(rg);
  IterationPoint q = IterationPoint::zeros(lrg);
  q.xl = {1.0, 0.5};
  q.xu[1] = 2.5;
  q.zl = {1.0, 3.0};
  q.zu[1] = 1.0;
  CHECK(recoverUserSolution(q, lrg, rg).row_dual[0] == -2.0);
}

TEST_CASE("unscaling C = 2, x = 3 gives 6") {
  const UserLp user = singleRow(-kInf, 5.0, 0.0, kInf);
  ScalingFactors f = ScalingFactors::identity(1, 1);
  f.col[0] = 2.0;
  const InternalLp lp = toInternal(user, f);
  CHECK(lp.col_scale[0] == 2.0);
  CHECK(lp.a.toDense()[0] == 2.0);
  IterationPoint pt = IterationPoint::zeros(lp);
  pt.x = {3.0, 0.0};
  pt.xl = {3.0, 1.0};
  CHECK(recoverUserSolution(pt, lp, user).x[0] == 6.0);
}

TEST_CASE("objective value examples") {
  const InternalLp lp = toInternal(singleRow(1.0, 1.0, 0.0, kInf));
  IterationPoint pt = IterationPoint::zeros(lp);
  pt.x = {2.0};
  pt.y = {3.0};
  pt.xl = {2.0};
  pt.zl = {1.0};
  const ObjectiveValues o = objectiveValues(pt, lp);
  CHECK(o.primal == 2.0);
  // b y + l z^l = 3 + 0
  CHECK(o.dual == 3.0);
}

TEST_CASE("property: one slack per inequality row") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = testing::randint(rng, 1, 6);
    const Index n = testing::randint(rng, 1, 8);
    const UserLp user = testing::randomUserLp(rng, m, n);
    const InternalLp lp = toInternal(user);
    Index inequalities = 0;
    for (Index i = 0; i < m; ++i)
      if (user.sense(i) != RowSense::kEqual) ++inequalities;
    CHECK(lp.num_cols == n + inequalities);
    for (Index i = 0; i < m; ++i) {
      const Index s = lp.slack_col[i];
      if (s < 0) continue;
      REQUIRE(lp.a.colEnd(s) - lp.a.colBegin(s) == 1);
      CHECK(lp.a.row_index[lp.a.colBegin(s)] == i);
      CHECK(std::abs(lp.a.value[lp.a.colBegin(s)]) == 1.0);
      CHECK(lp.lower[s] == 0.0);
    }
  }
}

TEST_CASE("property: internal round trip preserves the user objective") {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    const Index m = testing::randint(rng, 1, 6);
    const Index n = testing::randint(rng, 1, 8);
    UserLp user = testing::randomUserLp(rng, m, n);
    user.objective_offset = testing::uniform(rng, -5, 5);
    // A point inside the column bounds, then row bounds that contain its
    // activity with the same senses.
    std::vector<double> xt(n);
    for (Index j = 0; j < n; ++j) {
      double lo = user.col_lower[j], up = user.col_upper[j];
      if (!std::isfinite(lo) && !std::isfinite(up)) {
        lo = -1.0;
        up = 1.0;
      } else if (!std::isfinite(lo)) {
        lo = up - 3.0;
      } else if (!std::isfinite(up)) {
        up = lo + 3.0;
      }
      xt[j] = testing::uniform(rng, lo, up);
    }
    std::vector<double> act(m, 0.0);
    user.matrix.multiplyAdd(1.0, xt, act);
    for (Index i = 0; i < m; ++i) {
      const double t1 = testing::uniform(rng, 0.1, 1.0);
      const double t2 = testing::uniform(rng, 0.1, 1.0);
      switch (user.sense(i)) {
        case RowSense::kEqual:
          user.row_lower[i] = user.row_upper[i] = act[i];
          break;
        case RowSense::kLessEqual:
          user.row_upper[i] = act[i] + t1;
          break;
        case RowSense::kGreaterEqual:
          user.row_lower[i] = act[i] - t1;
          break;
        case RowSense::kRanged:
          user.row_lower[i] = act[i] - t1;
          user.row_upper[i] = act[i] + t2;
          break;
      }
    }
    ScalingFactors f = ScalingFactors::identity(m, n);
    for (double& r : f.row) r = std::pow(2.0, testing::uniform(rng, -4, 4));
    for (double& c : f.col) c = std::pow(2.0, testing::uniform(rng, -4, 4));
    const InternalLp lp = toInternal(user, f);

    IterationPoint pt = IterationPoint::zeros(lp);
    for (Index j = 0; j < n; ++j) pt.x[j] = xt[j] / f.col[j];
    std::vector<double> slack_user(m, 0.0);
    for (Index i = 0; i < m; ++i) {
      const Index s = lp.slack_col[i];
      if (s < 0) continue;
      slack_user[i] = user.sense(i) == RowSense::kGreaterEqual
                          ? act[i] - user.row_lower[i]
                          : user.row_upper[i] - act[i];
      pt.x[s] = f.row[i] * slack_user[i];
    }
    for (Index j = 0; j < lp.num_cols; ++j)
      if (lp.hasLower(j)) pt.xl[j] = pt.x[j] - lp.lower[j];

    std::vector<double> r = lp.b;
    lp.a.multiplyAdd(-1.0, pt.x, r);
    for (Index i = 0; i < m; ++i)
      CHECK(std::abs(r[i]) <= 1e-12 * (1.0 + std::abs(lp.b[i])));

    double user_obj = user.objective_offset;
    for (Index j = 0; j < n; ++j) user_obj += user.cost[j] * xt[j];
    const double internal_obj =
        objectiveValues(pt, lp).primal + lp.objective_offset;
    CHECK(internal_obj == doctest::Approx(user_obj).epsilon(1e-13));

    const UserSolution sol = recoverUserSolution(pt, lp, user);
    CHECK(sol.objective == doctest::Approx(user_obj).epsilon(1e-13));
    for (Index j = 0; j < n; ++j)
      CHECK(sol.x[j] == doctest::Approx(xt[j]).epsilon(1e-14));
    for (Index i = 0; i < m; ++i) {
      CHECK(sol.row_slack[i] >= 0.0);
      CHECK(sol.row_slack[i] == doctest::Approx(slack_user[i]).epsilon(1e-12));
      CHECK(sol.row_activity[i] == doctest::Approx(act[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: reported slacks and duals carry the row-sense sign") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const UserLp user = testing::randomUserLp(rng, testing::randint(rng, 1, 6),
                                              testing::randint(rng, 1, 8));
    const InternalLp lp = toInternal(user);
    // Any interior iterate, however far from feasible.
    const IterationPoint pt = testing::randomInteriorPoint(rng, lp, 1e-9, 10.0);
    const UserSolution sol = recoverUserSolution(pt, lp, user);
    for (Index i = 0; i < user.num_rows; ++i) {
      CHECK(sol.row_slack[i] >= 0.0);
      if (user.sense(i) == RowSense::kLessEqual) CHECK(sol.row_dual[i] <= 0.0);
      if (user.sense(i) == RowSense::kGreaterEqual)
        CHECK(sol.row_dual[i] >= 0.0);
    }
  }
}
