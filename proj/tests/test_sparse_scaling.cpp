#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "fipm/matrix_market.hpp"
#include "fipm/scaling.hpp"
#include "fipm/sparse_matrix.hpp"
#include "test_support.hpp"

using namespace fipm;
using testing::Rng;

namespace {

CscMatrix fromDense(Index m, Index n, const std::vector<double>& rowmajor) {
  std::vector<Index> ti, tj;
  std::vector<double> tv;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (rowmajor[i * n + j] != 0.0) {
        ti.push_back(i);
        tj.push_back(j);
        tv.push_back(rowmajor[i * n + j]);
      }
  return CscMatrix::fromTriplets(m, n, ti, tj, tv);
}

CscMatrix randomBadlyScaled(Rng& rng, Index m, Index n) {
  std::vector<double> d(m * n, 0.0);
  std::vector<double> rs(m), cs(n);
  for (double& r : rs) r = std::pow(2.0, testing::uniform(rng, -12, 12));
  for (double& c : cs) c = std::pow(2.0, testing::uniform(rng, -12, 12));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (testing::coin(rng, 0.4) || i == j % m || j == i % n)
        d[i * n + j] = rs[i] * cs[j] * testing::uniform(rng, 0.5, 2.0) *
                       (testing::coin(rng, 0.5) ? 1 : -1);
  return fromDense(m, n, d);
}

double logVariance(const CscMatrix& a) {
  double s = 0.0, s2 = 0.0;
  for (double v : a.value) {
    const double l = std::log2(std::abs(v));
    s += l;
    s2 += l * l;
  }
  const double k = static_cast<double>(a.nnz());
  return s2 / k - (s / k) * (s / k);
}

}  // namespace

TEST_CASE("csc from triplets sums duplicates and sorts rows") {
  const std::vector<Index> ti{2, 0, 2, 1};
  const std::vector<Index> tj{0, 0, 0, 1};
  const std::vector<double> tv{1.0, 2.0, 3.0, 4.0};
  const CscMatrix a = CscMatrix::fromTriplets(3, 2, ti, tj, tv);
  REQUIRE(a.nnz() == 3);
  CHECK(a.row_index == std::vector<Index>{0, 2, 1});
  CHECK(a.value == std::vector<double>{2.0, 4.0, 4.0});
  CHECK(a.col_start == std::vector<Index>{0, 2, 3});
}

TEST_CASE("transpose and products agree with dense arithmetic") {
  const CscMatrix a = fromDense(2, 3, {1, 0, 2, 0, 3, -1});
  const CscMatrix at = a.transpose();
  CHECK(at.toDense() == std::vector<double>{1, 0, 0, 3, 2, -1});
  std::vector<double> y(2, 0.0);
  const std::vector<double> x{1.0, 2.0, 3.0};
  a.multiplyAdd(1.0, x, y);
  CHECK(y == std::vector<double>{7.0, 3.0});
  std::vector<double> z(3, 1.0);
  a.multiplyTransposeAdd(-1.0, std::vector<double>{1.0, 1.0}, z);
  CHECK(z == std::vector<double>{0.0, -2.0, 0.0});
}

TEST_CASE("symmetric lower-triangle helpers") {
  const CscMatrix lower = fromDense(2, 2, {2, 0, -1, 3});
  CHECK(symmetric::toDense(lower) == std::vector<double>{2, -1, -1, 3});
  CHECK(symmetric::multiply(lower, std::vector<double>{1, 1}) ==
        std::vector<double>{1, 2});
  CHECK(symmetric::absMultiply(lower, std::vector<double>{1, -1}) ==
        std::vector<double>{3, 4});
  CHECK(symmetric::fullPattern(lower).nnz() == 4);
}

TEST_CASE("matrix market round trip") {
  const CscMatrix lower = fromDense(3, 3, {4, 0, 0, 1, 5, 0, 0, -2, 6});
  std::stringstream s;
  writeMatrixMarket(s, lower);
  const CscMatrix back = readMatrixMarket(s);
  CHECK(back.row_index == lower.row_index);
  CHECK(back.col_start == lower.col_start);
  CHECK(back.value == lower.value);
}

TEST_CASE("matrix market mirrors upper entries") {
  std::istringstream s(
      "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.5\n1 2 "
      "2.5\n");
  const CscMatrix m = readMatrixMarket(s);
  CHECK(symmetric::toDense(m) == std::vector<double>{1.5, 2.5, 2.5, 0.0});
}

TEST_CASE("curtis-reid on a matrix of unit magnitudes is the identity") {
  const CscMatrix a = fromDense(2, 3, {1, -1, 0, 0, 1, -1});
  const ScalingFactors f = curtisReid(a);
  CHECK(f.converged);
  for (double r : f.row) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  for (double c : f.col) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("curtis-reid 1x1 gives the minimum-norm split") {
  const CscMatrix a = fromDense(1, 1, {4});
  const ScalingFactors f = curtisReid(a);
  CHECK(f.row[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(f.col[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(applyScaling(a, f).value[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("curtis-reid diag(1,16)") {
  const CscMatrix a = fromDense(2, 2, {1, 0, 0, 16});
  const ScalingFactors f = curtisReid(a);
  CHECK(f.row[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.row[1] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(f.col[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f.col[1] == doctest::Approx(0.25).epsilon(1e-9));
  const CscMatrix s = applyScaling(a, f);
  CHECK(s.value[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.value[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("apply scaling examples") {
  const CscMatrix a = fromDense(1, 1, {5});
  ScalingFactors f = ScalingFactors::identity(1, 1);
  CHECK(f.isIdentity());
  CHECK(applyScaling(a, f).value[0] == 5.0);
  f.row[0] = 2.0;
  f.col[0] = 3.0;
  CHECK(applyScaling(a, f).value[0] == 30.0);
}

TEST_CASE("vector scaling maps keep infinities and invert exactly") {
  const std::vector<double> c{3.0, 0.25};
  const std::vector<double> bounds{6.0, -kInf};
  const auto scaled = scaleBounds(bounds, c);
  CHECK(scaled[0] == 2.0);
  CHECK(scaled[1] == -kInf);
  CHECK(scaleCost(std::vector<double>{1.0, 4.0}, c) ==
        std::vector<double>{3.0, 1.0});
  CHECK(scaleRowValues(std::vector<double>{2.0}, std::vector<double>{0.5}) ==
        std::vector<double>{1.0});
}

TEST_CASE("property: scale then unscale round trips within 4 eps") {
  Rng rng(11);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = testing::randint(rng, 1, 12);
    std::vector<double> c(n), x(n);
    for (Index j = 0; j < n; ++j) {
      c[j] = std::pow(2.0, testing::uniform(rng, -20, 20)) *
             testing::uniform(rng, 0.5, 2.0);
      x[j] = testing::uniform(rng, -100, 100);
    }
    const auto xs = scaleBounds(x, c);
    const auto back = unscalePrimal(xs, c);
    const auto zs = scaleCost(x, c);
    const auto zback = unscaleColumnDuals(zs, c);
    const auto yr = unscaleRowDuals(scaleRowValues(x, c), c);
    for (Index j = 0; j < n; ++j) {
      const double tol = 4 * eps * std::abs(x[j]);
      CHECK(std::abs(back[j] - x[j]) <= tol);
      CHECK(std::abs(zback[j] - x[j]) <= tol);
      CHECK(std::abs(yr[j] - c[j] * c[j] * x[j]) <=
            4 * eps * std::abs(c[j] * c[j] * x[j]));
    }
  }
}

TEST_CASE("property: curtis-reid never increases log-magnitude variance") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = testing::randint(rng, 1, 15);
    const Index n = testing::randint(rng, 1, 15);
    const CscMatrix a = randomBadlyScaled(rng, m, n);
    const ScalingFactors f = curtisReid(a);
    REQUIRE(f.converged);
    for (double r : f.row) CHECK((std::isfinite(r) && r > 0.0));
    for (double c : f.col) CHECK((std::isfinite(c) && c > 0.0));
    CHECK(logVariance(applyScaling(a, f)) <= logVariance(a) + 1e-9);
  }
}

TEST_CASE("property: curtis-reid is deterministic") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const CscMatrix a = randomBadlyScaled(rng, 10, 14);
    const ScalingFactors f = curtisReid(a);
    const ScalingFactors g = curtisReid(a);
    CHECK(f.row == g.row);
    CHECK(f.col == g.col);
  }
}

TEST_CASE("curtis-reid hitting its iteration cap falls back to identity") {
  Rng rng(14);
  const CscMatrix a = randomBadlyScaled(rng, 30, 30);
  CurtisReidOptions opt;
  opt.max_iterations = 1;
  opt.tolerance = 1e-15;
  const ScalingFactors f = curtisReid(a, opt);
  CHECK_FALSE(f.converged);
  CHECK(f.isIdentity());
}
