#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fipm/ipm.hpp"
#include "fipm/mps.hpp"
#include "fipm/solution_io.hpp"
#include "fipm/solver.hpp"
#include "test_support.hpp"

using namespace fipm;
namespace fs = std::filesystem;

namespace {

const std::string kData = FIPM_DATA_DIR;
const std::string kBinary = FIPM_BINARY;

MpsResult parse(const std::string& text, MpsFormat format = MpsFormat::kFree) {
  std::istringstream in(text);
  return readMps(in, format);
}

fs::path scratchDir() {
  const fs::path dir =
      fs::temp_directory_path() / ("fipm_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = "\"" + kBinary + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal =
    "NAME          TINY\n"
    "ROWS\n"
    " N  COST\n"
    " L  LIM\n"
    "COLUMNS\n"
    "    X         COST      2.0            LIM       3.0\n"
    "RHS\n"
    "    RHS       LIM       6.0\n"
    "BOUNDS\n"
    " UP BND       X         1.5\n"
    "ENDATA\n";

}  // namespace

TEST_CASE("minimal fixture parses to the expected model") {
  const MpsResult r = parse(kMinimal);
  const UserLp& lp = r.lp;
  CHECK(lp.name == "TINY");
  CHECK(lp.num_rows == 1);
  CHECK(lp.num_cols == 1);
  CHECK(lp.matrix.nnz() == 1);
  CHECK(lp.matrix.value[0] == 3.0);
  CHECK(lp.cost == std::vector<double>{2.0});
  CHECK(lp.row_lower[0] == -kInf);
  CHECK(lp.row_upper[0] == 6.0);
  CHECK(lp.col_lower[0] == 0.0);
  CHECK(lp.col_upper[0] == 1.5);
  CHECK(lp.row_names == std::vector<std::string>{"LIM"});
  CHECK(lp.col_names == std::vector<std::string>{"X"});
  CHECK(r.warnings.empty());

  // Same file in fixed format.
  const MpsResult f = parse(kMinimal, MpsFormat::kFixed);
  CHECK(f.lp.matrix.value == lp.matrix.value);
  CHECK(f.lp.row_upper == lp.row_upper);
  CHECK(f.lp.col_upper == lp.col_upper);
}

TEST_CASE("afiro has 27 rows, 32 columns and 83 nonzeros") {
  const UserLp lp = readMps(kData + "/netlib/afiro.mps").lp;
  CHECK(lp.num_rows == 27);
  CHECK(lp.num_cols == 32);
  CHECK(lp.matrix.nnz() == 83);
}

TEST_CASE("ranges follow the MPS convention") {
  // R on an L row gives [rhs - |R|, rhs]; on a G row [rhs, rhs + |R|]; on an
  // E row the sign of R picks the side.
  const std::string text =
      "NAME RNG\n"
      "ROWS\n"
      " N obj\n"
      " L r1\n"
      " G r2\n"
      " E r3\n"
      " E r4\n"
      "COLUMNS\n"
      " x obj 1 r1 1\n"
      " x r2 1 r3 1\n"
      " x r4 1\n"
      "RHS\n"
      " rhs r1 10 r2 1\n"
      " rhs r3 5 r4 5\n"
      "RANGES\n"
      " rng r1 4 r2 -3\n"
      " rng r3 2 r4 -2\n"
      "ENDATA\n";
  const UserLp lp = parse(text).lp;
  CHECK(lp.row_lower == std::vector<double>{6.0, 1.0, 5.0, 3.0});
  CHECK(lp.row_upper == std::vector<double>{10.0, 4.0, 7.0, 5.0});
  CHECK(lp.sense(0) == RowSense::kRanged);
}

TEST_CASE("bound types") {
  const std::string text =
      "NAME B\n"
      "ROWS\n"
      " N obj\n"
      " E c\n"
      "COLUMNS\n"
      " a c 1\n b c 1\n d c 1\n e c 1\n f c 1\n g c 1\n"
      "RHS\n"
      " rhs c 1\n"
      "BOUNDS\n"
      " FR bnd a\n"
      " MI bnd b\n"
      " FX bnd d 2.5\n"
      " LO bnd e -1\n"
      " UP bnd e 4\n"
      " UP bnd f -2\n"
      " PL bnd g\n"
      "ENDATA\n";
  const MpsResult r = parse(text);
  const UserLp& lp = r.lp;
  CHECK(lp.col_lower == std::vector<double>{-kInf, -kInf, 2.5, -1.0, -kInf, 0.0});
  CHECK(lp.col_upper == std::vector<double>{kInf, kInf, 2.5, 4.0, -2.0, kInf});
  // The negative upper bound with default lower bound is reported.
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("unsupported and malformed input") {
  const std::string head = "NAME E\nROWS\n N obj\n L c\nCOLUMNS\n";
  CHECK_THROWS_AS(parse(head +
                        " MARKER 'MARKER' 'INTORG'\n x c 1\n"
                        "RHS\n rhs c 1\nENDATA\n"),
                  ModelError);
  CHECK_THROWS_AS(parse(head + " x c 1\nRHS\n rhs c 1\nBOUNDS\n BV bnd x\nENDATA\n"),
                  ModelError);
  CHECK_THROWS_AS(parse("NAME E\nOBJSENSE\n    MAX\nROWS\n N obj\n L c\n"
                        "COLUMNS\n x c 1\nRHS\n rhs c 1\nENDATA\n"),
                  ModelError);
  CHECK_THROWS_AS(parse(head + " x nosuchrow 1\nRHS\n rhs c 1\nENDATA\n"),
                  IoError);
  CHECK_THROWS_AS(parse(head + " x c 1\nRHS\n rhs c 1\n"), IoError);
  CHECK_THROWS_AS(parse(head + " x c abc\nRHS\nENDATA\n"), IoError);
  CHECK_THROWS_AS(readMps(kData + "/netlib/does_not_exist.mps"), IoError);
}

TEST_CASE("duplicate entries are summed with a warning") {
  const MpsResult r = parse(
      "NAME D\nROWS\n N obj\n L c\nCOLUMNS\n x c 1 c 2\nRHS\n rhs c 4\nENDATA\n");
  CHECK(r.lp.matrix.nnz() == 1);
  CHECK(r.lp.matrix.value[0] == 3.0);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratchDir();
  const std::string afiro = kData + "/netlib/afiro.mps";
  CHECK(run("\"" + afiro + "\" --output \"" + (dir / "afiro.sol").string() + "\"") == 0);
  CHECK(run("\"" + (dir / "missing.mps").string() + "\"") == 4);
  CHECK(run("\"" + afiro + "\" --max-iter 1") == 2);
  CHECK(run("\"" + afiro + "\" --nb 7") == 4);

  std::ifstream sol(dir / "afiro.sol");
  std::string key, status, obj_key;
  double objective = 0.0;
  Index iterations = 0;
  sol >> key >> status >> key >> iterations >> obj_key >> objective;
  CHECK(status == "Optimal");
  CHECK(obj_key == "objective");
  CHECK(testing::relDiff(objective, -464.75314285714285) <= 1e-6);
  fs::remove_all(dir);
}

TEST_CASE("two runs write byte-identical logs and solutions") {
  const fs::path dir = scratchDir();
  const std::string afiro = kData + "/netlib/afiro.mps";
  for (const char* tag : {"a", "b"})
    REQUIRE(run("\"" + afiro + "\" --output \"" +
                (dir / (std::string(tag) + ".sol")).string() + "\" --log \"" +
                (dir / (std::string(tag) + ".log")).string() + "\"") == 0);
  const std::string log = slurp(dir / "a.log");
  CHECK(!log.empty());
  CHECK(log == slurp(dir / "b.log"));
  CHECK(slurp(dir / "a.sol") == slurp(dir / "b.sol"));
  fs::remove_all(dir);
}

TEST_CASE("logged residuals match the dumped iterates") {
  const fs::path dir = scratchDir();
  const std::string afiro = kData + "/netlib/afiro.mps";
  REQUIRE(run("\"" + afiro + "\" --log \"" + (dir / "run.log").string() +
              "\" --dump-iterates \"" + (dir / "run.dump").string() + "\"") == 0);

  // Same scaling and internal form as the binary.
  const UserLp user = readMps(afiro).lp;
  const LpSolveResult ref = solveLp(user, {});
  const InternalLp& lp = ref.internal;

  std::ifstream dump(dir / "run.dump");
  const std::vector<DumpedIterate> iterates = readIterates(dump);
  REQUIRE(iterates.size() == ref.ipm.report.iterations.size() + 1);

  std::ifstream log(dir / "run.log");
  std::string line;
  std::vector<std::vector<double>> rows;
  bool in_table = false;
  while (std::getline(log, line)) {
    if (line.rfind(iterationLogHeader(), 0) == 0) {
      in_table = true;
      continue;
    }
    if (!in_table) continue;
    if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0]))) break;
    std::istringstream s(line);
    std::vector<double> v;
    double x;
    while (s >> x) v.push_back(x);
    rows.push_back(v);
  }
  REQUIRE(rows.size() == iterates.size());

  auto close = [](double logged, double recomputed) {
    return std::abs(logged - recomputed) <=
           1e-12 * std::max(1.0, std::abs(recomputed));
  };
  for (std::size_t k = 0; k < iterates.size(); ++k) {
    CAPTURE(k);
    const IterationPoint& pt = iterates[k].point;
    CHECK(iterates[k].iteration == static_cast<Index>(rows[k][0]));
    const Residuals res = computeResiduals(pt, lp, 0.0, 0.0);
    const TerminationInfo t = terminationCheck(pt, lp, res, 1e-8, 1e-8);
    CHECK(close(rows[k][1], computeMu(pt, lp)));
    CHECK(close(rows[k][2], t.primal_infeasibility));
    CHECK(close(rows[k][3], t.dual_infeasibility));
    CHECK(close(rows[k][4], t.relative_gap));
  }
  fs::remove_all(dir);
}
