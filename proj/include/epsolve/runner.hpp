#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "epsolve/budget.hpp"
#include "epsolve/config.hpp"
#include "epsolve/lattice.hpp"
#include "epsolve/propagate.hpp"

namespace epsolve::runner {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBudgetInfeasible = 3;
inline constexpr int kExitNumericFailure = 4;

struct ContinuumRun {
  budget::ErrorBudget budget;
  propagate::Trajectory trajectory;
  GridFunction initial;

  ContinuumRun() : initial(1.0, 1, 1) {}
};

struct LatticeRun {
  budget::ErrorBudget budget;
  lattice::LatticeTrajectory trajectory;
  lattice::LatticeState initial;

  LatticeRun() : trajectory{lattice::LatticeState(0, 1), {}, {}, {}}, initial(0, 1) {}
};

/// Plans the budget and propagates.  The initial state is cut off by
/// gamma_R, singular potentials are excised, and (on the S^eps route) the
/// state is Hermite-projected and potentials mollified before the cubic
/// discretization.
ContinuumRun run_continuum(const config::BuiltProblem& bp);
LatticeRun run_lattice(const config::BuiltProblem& bp);

/// Budget-ledger header plus "t,x,re,im,density" rows at the snapshot
/// stride; floats at 17 significant digits, byte-deterministic.
void write_csv(std::ostream& os, const ContinuumRun& run);
void write_csv(std::ostream& os, const LatticeRun& run);

/// Full solve subcommand: returns a process exit code and writes the CSV to
/// the configured path (or `override_path` when set).
int solve_to_file(const config::Ini& ini, bool pin_constants,
                  const std::optional<std::string>& override_path, std::ostream& log);

struct BlowupReport {
  std::vector<double> times;
  std::vector<double> numeric_sup;
  std::vector<double> exact_amplitude;
  double exact_ratio = 0.0;    // amplitude(9.9) / amplitude(9)
  double numeric_ratio = 0.0;  // sup(9.9) / sup(9)
  bool plateau = false;        // numeric_ratio < exact_ratio / 2
  double t_star = 10.0;
};

/// Focusing quintic run with the explicit blow-up datum on a fixed grid;
/// tracks the numerical sup-norm against the exact amplitude up to t = 9.9.
BlowupReport demo_blowup(std::ostream* csv = nullptr);

}  // namespace epsolve::runner
