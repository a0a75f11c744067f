#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "fipm/mps.hpp"
#include "fipm/solution_io.hpp"
#include "fipm/solver.hpp"

namespace {

enum ExitCode {
  kExitOptimal = 0,
  kExitImprecise = 1,
  kExitLimit = 2,
  kExitNumerical = 3,
  kExitInput = 4,
};

int exitCodeFor(fipm::Status s) {
  switch (s) {
    case fipm::Status::kOptimal:
      return kExitOptimal;
    case fipm::Status::kImprecise:
      return kExitImprecise;
    case fipm::Status::kIterationLimit:
    case fipm::Status::kTimeLimit:
      return kExitLimit;
    case fipm::Status::kNumericalFailure:
    case fipm::Status::kOutOfMemory:
      return kExitNumerical;
  }
  return kExitNumerical;
}

struct CliConfig {
  std::string input;
  bool fixed = false;
  bool no_scaling = false;
  double tol = 0.0;
  double tol_feas = 1e-8;
  double tol_opt = 1e-8;
  std::string system = "auto";
  fipm::Index max_iter = 100;
  fipm::Index correctors = 10;
  fipm::Index refinement = 2;
  fipm::Index nb = 64;
  double static_primal = 1e-10;
  double static_dual = 1e-10;
  double time_limit = fipm::kInf;
  std::string output;
  std::string log;
  bool log_timings = false;
  std::string dump_iterates;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fipm: interior point solver for linear programs in MPS format"};
  CliConfig cfg;
  app.add_option("input", cfg.input, "MPS file")->required();
  app.add_flag("--fixed", cfg.fixed, "Read fixed-format MPS (default: free)");
  app.add_flag("--no-scaling", cfg.no_scaling, "Skip Curtis-Reid scaling");
  app.add_option("--tol", cfg.tol, "Set both tolerances")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-feas", cfg.tol_feas, "Feasibility tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-opt", cfg.tol_opt, "Relative gap tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--system", cfg.system, "KKT system")
      ->check(CLI::IsMember({"auto", "augmented", "normal"}));
  app.add_option("--max-iter", cfg.max_iter, "Iteration limit")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--correctors", cfg.correctors, "Corrector cap")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--refinement", cfg.refinement, "Refinement pass cap")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--nb", cfg.nb, "Dense block width")
      ->check(CLI::IsMember({32, 64, 128}));
  app.add_option("--static-primal", cfg.static_primal,
                 "Static primal regularisation")
      ->check(CLI::Range(1e-12, 1e-6));
  app.add_option("--static-dual", cfg.static_dual,
                 "Static dual regularisation")
      ->check(CLI::Range(1e-12, 1e-6));
  app.add_option("--time-limit", cfg.time_limit, "Wall time limit (seconds)")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", cfg.output, "Solution file");
  app.add_option("--log", cfg.log, "Log file (default: stdout)");
  app.add_flag("--log-timings", cfg.log_timings,
               "Append phase timings to the log");
  app.add_option("--dump-iterates", cfg.dump_iterates,
                 "Write every iterate to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  std::ofstream log_file;
  std::ostream* log = &std::cout;
  if (!cfg.log.empty()) {
    log_file.open(cfg.log);
    if (!log_file) {
      std::cerr << "error: cannot write " << cfg.log << '\n';
      return kExitInput;
    }
    log = &log_file;
  }
  std::ofstream dump;
  if (!cfg.dump_iterates.empty()) {
    dump.open(cfg.dump_iterates);
    if (!dump) {
      std::cerr << "error: cannot write " << cfg.dump_iterates << '\n';
      return kExitInput;
    }
  }

  fipm::SolverOptions opt;
  opt.tau_feas = cfg.tol > 0.0 ? cfg.tol : cfg.tol_feas;
  opt.tau_opt = cfg.tol > 0.0 ? cfg.tol : cfg.tol_opt;
  opt.max_iter = cfg.max_iter;
  opt.corrector_cap = cfg.correctors;
  opt.refinement_cap = cfg.refinement;
  opt.block_size = cfg.nb;
  opt.reg = {cfg.static_primal, cfg.static_dual};
  opt.time_limit = cfg.time_limit;
  opt.system = cfg.system == "augmented" ? fipm::SystemChoice::kAugmented
               : cfg.system == "normal"  ? fipm::SystemChoice::kNormalEquations
                                         : fipm::SystemChoice::kAuto;

  try {
    fipm::MpsResult mps = fipm::readMps(
        cfg.input, cfg.fixed ? fipm::MpsFormat::kFixed : fipm::MpsFormat::kFree);
    *log << "model " << mps.lp.name << " rows " << mps.lp.num_rows
         << " columns " << mps.lp.num_cols << " nonzeros "
         << mps.lp.matrix.nnz() << '\n';
    for (const std::string& w : mps.warnings) *log << "warning " << w << '\n';
    *log << fipm::iterationLogHeader() << '\n';

    auto observer = [&](const fipm::IterationRecord& rec,
                        const fipm::IterationPoint& pt) {
      *log << fipm::formatIterationLine(rec) << '\n';
      if (dump.is_open()) fipm::writeIterate(dump, rec.iteration, pt);
    };
    const fipm::LpSolveResult r =
        fipm::solveLp(mps.lp, opt, observer, !cfg.no_scaling);
    if (!r.internal.scaling.converged)
      *log << "warning scaling did not converge; identity used\n";
    *log << fipm::formatSummary(r.ipm.report, r.solution, cfg.log_timings);

    if (!cfg.output.empty()) {
      std::ofstream out(cfg.output);
      if (!out) {
        std::cerr << "error: cannot write " << cfg.output << '\n';
        return kExitInput;
      }
      fipm::writeSolution(out, mps.lp, r.solution);
    }
    return exitCodeFor(r.ipm.status);
  } catch (const fipm::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fipm::ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fipm::OutOfMemoryError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fipm::NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitNumerical;
  }
}
