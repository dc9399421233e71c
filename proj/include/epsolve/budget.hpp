#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epsolve/problem.hpp"
#include "epsolve/truncation.hpp"

namespace epsolve::budget {

/// Flow and order constants the source material defines only as "recursively
/// defined"; they are configuration with conservative defaults, and
/// reproducible runs pin them explicitly.  Certificates produced by plan()
/// are relative to these values.
struct Constants {
  double d1 = 1.0;            // boundary-flux constant
  std::optional<double> c_t;  // pinned flow constant; otherwise the formula below
  double c_flow_rate = 4.0;   // C_T = exp(rate * T * (1 + ||u||_W11) * (1 + C_pot))
  double c_grid = 1.0;        // spatial convergence constant (h shape)
  double c_time = 1.0;        // Crank-Nicolson accuracy constant (tau^3/h^4 shape)
  double c_split = 1.0;       // splitting-order constant (tau shape)
  double c_sub = 1.0;         // sampler-substitution amplification C(n, R, h)
  double c_lattice = 1.0;     // lattice truncation constant
  double d4 = 1.0;            // Hermite embedding constant
  double phase_margin = 2.0;  // headroom on the certified phase range
  truncation::RadiusRule radius_rule = truncation::RadiusRule::BoundaryFlux;
  double tail_eta = 2.0;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Inequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct Params {
  double box_radius = 0.0;   // R (continuum) or lattice half-width n
  int cells_per_unit = 0;    // m, h = 1/m (continuum only)
  double tau = 0.0;
  long long steps = 0;
  int n_samples = 0;         // QMC N (continuum only)
  int order_k = 0;           // exp_K truncation order
  int precision_m = 52;
  std::optional<double> excision_delta;
  std::optional<double> mollifier_sigma;
  std::optional<double> mollifier_xi;
  std::optional<int> hermite_k;
};

struct ErrorBudget {
  double epsilon = 0.0;
  std::map<std::string, double> shares;
  Params params;
  Constants constants;
  std::vector<Inequality> ledger;
  std::string binding_time_rule;  // "cn_accuracy" or "splitting"

  // Class data the inequalities are recomputed from.
  Family family = Family::Linear;
  int dimension = 1;
  int sigma = 3;
  double horizon = 1.0;
  double mu = 1.0;
  double c1 = 1.0;       // state class bound (lattice: the l2_s bound A)
  double state_eps = 0.5; // state class epsilon (lattice: the weight s)
  double c_t_value = 1.0;
  double tv_cert = 1.0;
  double phase_sup = 0.0;  // certified sup of the phase-stage potential
  double phi_r = 0.0;      // Phi(R+1) for the Assumption-2 route
  double lp = 2.0;

  bool assumption2 = false;
};

/// Derives (R, h, tau, N, K, M) from the accuracy target by equal split of
/// eps across the active error sources.  Never calls the samplers: identical
/// declared class constants give identical budgets.
ErrorBudget plan(const ProblemSpec& problem, const InitialState& state,
                 const PotentialModel& pot, double eps, const Constants& constants = {});

struct ReplayVerdict {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Recomputes every ledger inequality from the recorded constants and
/// parameters.
ReplayVerdict replay(const ErrorBudget& budget);

/// Closed-form arithmetic-operation count of the run the budget describes;
/// depends only on the budget parameters, never on the sampled values.
long long uniform_runtime_estimate(const ErrorBudget& budget);

/// Serializes as "key = value" lines for CLI headers; parse-free plumbing.
std::string format_ledger(const ErrorBudget& budget);

}  // namespace epsolve::budget
