#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fipm/ipm.hpp"
#include "fipm/lp_model.hpp"

namespace fipm {

// Plain text:
//   status <name>
//   iterations <k>
//   objective <value>
//   columns <n>
//   <name> <value> <reduced cost>      (n lines)
//   rows <m>
//   <name> <activity> <slack> <dual>   (m lines)
void writeSolution(std::ostream& out, const UserLp& user,
                   const UserSolution& sol);

std::string iterationLogHeader();
// One line, no trailing newline; every real in %.15e.
std::string formatIterationLine(const IterationRecord& rec);
std::string formatSummary(const SolveReport& report, const UserSolution& sol,
                          bool with_timings);

// Internal iterate as "iterate <k>" followed by one "<block> v0 v1 ..." line
// per vector (x, y, xl, xu, zl, zu), values in %.17g.
void writeIterate(std::ostream& out, Index iteration, const IterationPoint& pt);

struct DumpedIterate {
  Index iteration = 0;
  IterationPoint point;
};
std::vector<DumpedIterate> readIterates(std::istream& in);

}  // namespace fipm
