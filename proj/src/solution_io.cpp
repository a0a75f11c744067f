#include "fipm/solution_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace fipm {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string e15(double v) { return fmt("%.15e", v); }

}  // namespace

void writeSolution(std::ostream& out, const UserLp& user,
                   const UserSolution& sol) {
  out << "status " << statusString(sol.status) << '\n';
  out << "iterations " << sol.iterations << '\n';
  out << "objective " << e15(sol.objective) << '\n';
  out << "columns " << user.num_cols << '\n';
  for (Index j = 0; j < user.num_cols; ++j) {
    const std::string name =
        j < static_cast<Index>(user.col_names.size()) ? user.col_names[j]
                                                      : "c" + std::to_string(j);
    out << name << ' ' << e15(sol.x[j]) << ' ' << e15(sol.reduced_cost[j])
        << '\n';
  }
  out << "rows " << user.num_rows << '\n';
  for (Index i = 0; i < user.num_rows; ++i) {
    const std::string name =
        i < static_cast<Index>(user.row_names.size()) ? user.row_names[i]
                                                      : "r" + std::to_string(i);
    out << name << ' ' << e15(sol.row_activity[i]) << ' '
        << e15(sol.row_slack[i]) << ' ' << e15(sol.row_dual[i]) << '\n';
  }
}

std::string iterationLogHeader() {
  return "iter mu primal_inf dual_inf rel_gap sigma alpha_p alpha_d "
         "correctors refinements max_perturbation";
}

std::string formatIterationLine(const IterationRecord& r) {
  std::ostringstream s;
  s << r.iteration << ' ' << e15(r.mu) << ' ' << e15(r.primal_infeasibility)
    << ' ' << e15(r.dual_infeasibility) << ' ' << e15(r.relative_gap) << ' '
    << e15(r.sigma) << ' ' << e15(r.alpha_primal) << ' '
    << e15(r.alpha_dual) << ' ' << r.correctors << ' ' << r.refinements << ' '
    << e15(r.max_perturbation);
  return s.str();
}

std::string formatSummary(const SolveReport& report, const UserSolution& sol,
                          bool with_timings) {
  std::ostringstream s;
  s << "status " << statusString(report.status) << '\n';
  s << "message " << report.message << '\n';
  s << "iterations " << report.iterations.size() << '\n';
  s << "objective " << e15(sol.objective) << '\n';
  s << "system " << systemKindString(report.system) << '\n';
  s << "nnz_l " << report.nnz_l << '\n';
  s << "flops " << report.flops << '\n';
  s << "corrector_budget " << report.corrector_budget << '\n';
  s << "regularization_retries " << report.regularization_retries << '\n';
  if (with_timings) {
    const double phases =
        report.form_seconds + report.factor_seconds + report.solve_seconds;
    auto frac = [&](double t) { return phases > 0.0 ? t / phases : 0.0; };
    s << "time_total " << fmt("%.6f", report.total_seconds) << '\n';
    s << "time_form " << fmt("%.6f", report.form_seconds) << " fraction "
      << fmt("%.4f", frac(report.form_seconds)) << '\n';
    s << "time_factor " << fmt("%.6f", report.factor_seconds) << " fraction "
      << fmt("%.4f", frac(report.factor_seconds)) << '\n';
    s << "time_solve " << fmt("%.6f", report.solve_seconds) << " fraction "
      << fmt("%.4f", frac(report.solve_seconds)) << '\n';
  }
  return s.str();
}

void writeIterate(std::ostream& out, Index iteration, const IterationPoint& pt) {
  auto block = [&](const char* name, const std::vector<double>& v) {
    out << name;
    for (double x : v) out << ' ' << fmt("%.17g", x);
    out << '\n';
  };
  out << "iterate " << iteration << '\n';
  block("x", pt.x);
  block("y", pt.y);
  block("xl", pt.xl);
  block("xu", pt.xu);
  block("zl", pt.zl);
  block("zu", pt.zu);
}

std::vector<DumpedIterate> readIterates(std::istream& in) {
  std::vector<DumpedIterate> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream s(line);
    std::string key;
    s >> key;
    if (key == "iterate") {
      out.emplace_back();
      s >> out.back().iteration;
      continue;
    }
    if (out.empty()) throw IoError("iterate dump: block before header");
    IterationPoint& pt = out.back().point;
    std::vector<double>* v = key == "x"    ? &pt.x
                             : key == "y"  ? &pt.y
                             : key == "xl" ? &pt.xl
                             : key == "xu" ? &pt.xu
                             : key == "zl" ? &pt.zl
                             : key == "zu" ? &pt.zu
                                           : nullptr;
    if (!v) throw IoError("iterate dump: unknown block " + key);
    std::string tok;
    while (s >> tok) v->push_back(std::strtod(tok.c_str(), nullptr));
  }
  return out;
}

}  // namespace fipm
