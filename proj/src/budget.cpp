#include "epsolve/budget.hpp"

#include <cmath>
#include <sstream>

#include "epsolve/propagate.hpp"
#include "epsolve/qmc.hpp"

namespace epsolve::budget {

namespace {

double flow_constant(const Constants& c, const ProblemSpec& problem,
                     const PotentialModel& pot) {
  if (c.c_t) return *c.c_t;
  return std::exp(c.c_flow_rate * problem.horizon * (1.0 + pot.u.w11_budget()) *
                  (1.0 + pot.global_bound));
}

int grid_power(Family family) { return family == Family::DefocusingNls ? 6 : 4; }

double cell_count(const ErrorBudget& b) {
  return std::pow(2.0 * b.params.box_radius * b.params.cells_per_unit, b.dimension);
}

double radius_lhs(const ErrorBudget& b) {
  const double r = b.params.box_radius;
  if (b.family == Family::LatticeNls) {
    const double jap = std::sqrt(1.0 + r * r);
    return b.constants.c_lattice * b.c1 * std::pow(jap, -b.state_eps / 4.0);
  }
  if (b.constants.radius_rule == truncation::RadiusRule::TailOnly) {
    return b.c1 * std::pow(r, -b.constants.tail_eta);
  }
  return b.constants.d1 * 2.0 * b.c_t_value * b.c1 * b.c1 / r +
         b.c_t_value * b.c1 / (r * r);
}

double grid_lhs(const ErrorBudget& b) {
  return b.constants.c_grid * b.c_t_value * b.c1 / b.params.cells_per_unit;
}

double cn_time_lhs(const ErrorBudget& b) {
  const double h = 1.0 / b.params.cells_per_unit;
  return b.constants.c_time * b.c_t_value * b.horizon * b.params.tau * b.params.tau /
         std::pow(h, grid_power(b.family));
}

double split_time_lhs(const ErrorBudget& b) {
  return b.constants.c_split * b.c_t_value * b.horizon * b.params.tau;
}

double exp_range(const ErrorBudget& b) {
  return b.constants.phase_margin * b.params.tau * b.phase_sup;
}

double exp_lhs(const ErrorBudget& b) {
  return static_cast<double>(b.params.steps) *
         propagate::exp_k_remainder_bound(b.params.order_k, exp_range(b));
}

double integration_lhs(const ErrorBudget& b) {
  const double n = b.params.n_samples;
  const long long cs =
      qmc::c_star(qmc::HaltonConfig::first_primes(b.dimension, 2).bases);
  const double kh = b.tv_cert * static_cast<double>(cs) *
                        std::pow(std::log(n), b.dimension) / n +
                    n * std::ldexp(1.0, -b.params.precision_m) * cell_count(b);
  return b.constants.c_sub * b.c_t_value * kh;
}

double hermite_k_lhs(const ErrorBudget& b, int k) {
  return b.c_t_value * b.c1 / std::pow(2.0 * k + 1.0, b.state_eps);
}

double mollifier_lhs(const ErrorBudget& b) {
  if (!b.params.mollifier_sigma) return 0.0;
  // 2 ||V|| |B(0,R+1)|^{1/p} erfc(delta/(sqrt2 sigma)) + Phi(R+1) delta^eps,
  // with the split radius tied to the width by delta = sqrt(sigma).
  const double sigma = *b.params.mollifier_sigma;
  const double delta = std::sqrt(sigma);
  const double vol = std::pow(2.0 * (b.params.box_radius + 1.0), b.dimension);
  return b.c_t_value * (2.0 * b.tv_cert * std::pow(vol, 1.0 / b.lp) *
                            std::erfc(delta / (std::sqrt(2.0) * sigma)) +
                        b.phi_r * std::pow(delta, b.state_eps));
}

int lattice_radius_scan(double c_lattice, double a, double s, double share) {
  for (int n = 1; n <= (1 << 24); n *= 2) {
    const double jap = std::sqrt(1.0 + static_cast<double>(n) * n);
    if (c_lattice * a * std::pow(jap, -s / 4.0) <= share) return n;
  }
  throw BudgetError("plan: lattice radius exceeds 2^24");
}

}  // namespace

ErrorBudget plan(const ProblemSpec& problem, const InitialState& state,
                 const PotentialModel& pot, double eps, const Constants& constants) {
  problem.validate();
  pot.validate();
  if (eps <= 0) throw BudgetError("plan: eps must be positive");

  ErrorBudget b;
  b.epsilon = eps;
  b.constants = constants;
  b.family = problem.family;
  b.dimension = problem.dimension;
  b.sigma = problem.sigma;
  b.horizon = problem.horizon;
  b.mu = problem.mu;
  b.c1 = state.sobolev.bound;
  b.state_eps = state.sobolev.eps;
  b.assumption2 = state.sobolev.cls == SobolevCertificate::Class::SEps &&
                  problem.family != Family::LatticeNls;
  b.lp = pot.w_sing ? pot.w_sing->lp_exponent : 2.0;
  b.c_t_value = flow_constant(constants, problem, pot);

  const bool lattice = problem.family == Family::LatticeNls;
  const bool nonlinear = problem.family != Family::Linear;

  std::vector<std::string> sources = {"truncation", "time"};
  if (nonlinear || pot.has_control()) sources.push_back("exponential");
  if (!lattice) {
    sources.push_back("grid");
    sources.push_back("integration");
    if (pot.w_sing) sources.push_back("excision");
    if (b.assumption2) {
      sources.push_back("mollification");
      sources.push_back("hermite");
    }
  }
  const double share = eps / static_cast<double>(sources.size());
  for (const auto& s : sources) b.shares[s] = share;
  for (const char* s : {"truncation", "excision", "mollification", "hermite", "grid",
                        "time", "exponential", "integration"}) {
    if (!b.shares.count(s)) b.shares[s] = 0.0;
  }

  // Radius.
  if (lattice) {
    b.params.box_radius = static_cast<double>(
        lattice_radius_scan(constants.c_lattice, b.c1, b.state_eps, share));
    b.params.cells_per_unit = 1;
  } else {
    auto cert = truncation::choose_radius(b.c1, b.c_t_value, constants.d1, share,
                                          constants.radius_rule, constants.tail_eta);
    b.params.box_radius = cert.radius;
  }
  b.ledger.push_back({"truncation", radius_lhs(b), share});
  const double r_box = b.params.box_radius;

  if (pot.w_eps_p_control) b.phi_r = (*pot.w_eps_p_control)(r_box + 1.0);

  // Certified sup of the phase-stage potential over the box, from the
  // declared smoothness/variation maps; the nonlinear amplitude rides on the
  // state's CLBBV bound.
  double phase_sup = 0.0;
  double pot_tv = 0.0;
  if (pot.v_con && !pot.u.is_zero()) {
    const double vb = pot.v_con->smoothness(r_box);
    phase_sup += pot.u.sup() * vb;
    pot_tv = std::max(pot_tv, vb);
  }
  if (pot.w_reg) pot_tv = std::max(pot_tv, pot.w_reg->smoothness(r_box));
  if (nonlinear && !lattice) {
    phase_sup += std::pow(state.clbbv(r_box), problem.sigma - 1.0);
  }
  if (lattice) phase_sup += std::pow(b.c1, problem.sigma - 1.0);
  b.phase_sup = phase_sup;
  b.tv_cert =
      std::max({state.clbbv.empty() ? b.c1 : state.clbbv(r_box), pot_tv, 1e-12});

  // Excision: delta and the excised remainder's smoothness bound come from
  // the declared blowup control; the L^p cost is the map's own guarantee.
  if (pot.w_sing && !lattice) {
    auto [delta, k_bound] = pot.w_sing->blowup_control(share / 2.0, r_box);
    if (delta <= 0) throw BudgetError("plan: blowup control returned delta <= 0");
    b.params.excision_delta = delta;
    b.tv_cert = std::max(b.tv_cert, k_bound);
    b.ledger.push_back({"excision", share, share});
  }

  // Assumption-2 smoothing pipeline.
  if (b.assumption2) {
    int k = 1;
    while (hermite_k_lhs(b, k) > b.shares.at("hermite")) {
      if (++k > 100000) throw BudgetError("plan: Hermite K exceeds 1e5");
    }
    b.params.hermite_k = k;
    b.ledger.push_back({"hermite", hermite_k_lhs(b, k), b.shares.at("hermite")});

    double sigma = 0.25;
    b.params.mollifier_sigma = sigma;
    while (mollifier_lhs(b) > b.shares.at("mollification")) {
      sigma *= 0.5;
      b.params.mollifier_sigma = sigma;
      if (sigma < 1e-12) throw BudgetError("plan: mollifier width underflow");
    }
    double xi = 1.0;
    while (b.tv_cert * std::erfc(xi / (std::sqrt(2.0) * sigma)) > std::ldexp(1.0, -40) &&
           xi < 64.0) {
      xi += 1.0;
    }
    b.params.mollifier_xi = xi;
    b.ledger.push_back({"mollification", mollifier_lhs(b), b.shares.at("mollification")});
  }

  // Grid.
  if (!lattice) {
    int m = 1;
    while (constants.c_grid * b.c_t_value * b.c1 / m > b.shares.at("grid")) {
      m *= 2;
      if (m > (1 << 26)) throw BudgetError("plan: grid size exceeds 2^26 cells per unit");
    }
    b.params.cells_per_unit = m;
    b.ledger.push_back({"grid", grid_lhs(b), b.shares.at("grid")});
  }

  // Time step: both the Crank-Nicolson accuracy shape and the splitting
  // shape; the binding one is recorded.
  {
    const double share_t = b.shares.at("time");
    const double h = 1.0 / b.params.cells_per_unit;
    const double hp = lattice ? 1.0 : std::pow(h, grid_power(b.family));
    const double tau_cn =
        std::sqrt(share_t * hp / (constants.c_time * b.c_t_value * b.horizon));
    const double tau_split = share_t / (constants.c_split * b.c_t_value * b.horizon);
    const double tau_max = std::min(tau_cn, tau_split);
    long long steps = 1;
    while (b.horizon / static_cast<double>(steps) > tau_max) {
      steps *= 2;
      if (steps > (1LL << 40)) throw BudgetError("plan: step count exceeds 2^40");
    }
    b.params.steps = steps;
    b.params.tau = b.horizon / static_cast<double>(steps);
    b.binding_time_rule = tau_cn < tau_split ? "cn_accuracy" : "splitting";
    if (!lattice) b.ledger.push_back({"time_cn", cn_time_lhs(b), share_t});
    b.ledger.push_back({"time_split", split_time_lhs(b), share_t});
  }

  // Exponential truncation order.
  if (b.shares.at("exponential") > 0.0 && b.phase_sup > 0.0) {
    const double per_step =
        b.shares.at("exponential") / static_cast<double>(b.params.steps);
    b.params.order_k = propagate::choose_k(per_step, exp_range(b));
    b.ledger.push_back({"exponential", exp_lhs(b), b.shares.at("exponential")});
  } else {
    b.params.order_k = 1;
  }

  // Integration sample count (continuum only); the 2^-M term rides inside
  // the same inequality, so infeasibility at M = 52 surfaces here.
  if (!lattice) {
    const double share_i = b.shares.at("integration");
    int n = 2;
    for (;;) {
      b.params.n_samples = n;
      const double lhs = integration_lhs(b);
      if (lhs <= share_i) {
        b.ledger.push_back({"integration", lhs, share_i});
        break;
      }
      if (n > (1 << 24)) {
        throw BudgetError(
            "plan: integration share infeasible at M = 52 (binding share: integration)");
      }
      n *= 2;
    }
  }
  b.params.precision_m = kMaxPrecisionExponent;

  return b;
}

ReplayVerdict replay(const ErrorBudget& b) {
  ReplayVerdict v;
  auto check = [&](const std::string& name, double lhs, double rhs) {
    if (lhs > rhs * (1.0 + 1e-12)) {
      v.ok = false;
      std::ostringstream os;
      os << name << ": " << lhs << " > " << rhs;
      v.violations.push_back(os.str());
    }
  };
  for (const auto& ineq : b.ledger) {
    double lhs = ineq.lhs;
    if (ineq.name == "truncation") lhs = radius_lhs(b);
    else if (ineq.name == "grid") lhs = grid_lhs(b);
    else if (ineq.name == "time_cn") lhs = cn_time_lhs(b);
    else if (ineq.name == "time_split") lhs = split_time_lhs(b);
    else if (ineq.name == "exponential") lhs = exp_lhs(b);
    else if (ineq.name == "integration") lhs = integration_lhs(b);
    else if (ineq.name == "mollification") lhs = mollifier_lhs(b);
    else if (ineq.name == "hermite" && b.params.hermite_k) {
      lhs = hermite_k_lhs(b, *b.params.hermite_k);
    }
    check(ineq.name, lhs, ineq.rhs);
  }
  double total = 0.0;
  for (const auto& [key, s] : b.shares) total += s;
  check("share_sum", total, b.epsilon);
  return v;
}

long long uniform_runtime_estimate(const ErrorBudget& b) {
  const double cells = b.family == Family::LatticeNls
                           ? std::pow(2.0 * b.params.box_radius + 1.0, b.dimension)
                           : cell_count(b);
  const double solve_ops = 16.0;
  const double phase_ops = 4.0 * b.params.order_k + 5.0;
  const double sample_ops = 8.0;
  double total =
      static_cast<double>(b.params.steps) * cells * (2.0 * solve_ops + phase_ops);
  if (b.family != Family::LatticeNls) {
    total += 2.0 * static_cast<double>(b.params.n_samples) * cells * sample_ops;
  }
  return static_cast<long long>(total);
}

std::string format_ledger(const ErrorBudget& b) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon = " << b.epsilon << "\n";
  for (const auto& [k, s] : b.shares) os << "share." << k << " = " << s << "\n";
  os << "R = " << b.params.box_radius << "\n";
  os << "m = " << b.params.cells_per_unit << "\n";
  os << "tau = " << b.params.tau << "\n";
  os << "steps = " << b.params.steps << "\n";
  os << "N = " << b.params.n_samples << "\n";
  os << "K = " << b.params.order_k << "\n";
  os << "M = " << b.params.precision_m << "\n";
  if (b.params.excision_delta) os << "excision_delta = " << *b.params.excision_delta << "\n";
  if (b.params.mollifier_sigma) os << "mollifier_sigma = " << *b.params.mollifier_sigma << "\n";
  if (b.params.mollifier_xi) os << "mollifier_xi = " << *b.params.mollifier_xi << "\n";
  if (b.params.hermite_k) os << "hermite_K = " << *b.params.hermite_k << "\n";
  os << "C_T = " << b.c_t_value << "\n";
  os << "D1 = " << b.constants.d1 << "\n";
  os << "binding_time_rule = " << b.binding_time_rule << "\n";
  for (const auto& ineq : b.ledger) {
    os << "check." << ineq.name << " = " << ineq.lhs << " <= " << ineq.rhs << "\n";
  }
  os << "runtime_estimate = " << uniform_runtime_estimate(b) << "\n";
  return os.str();
}

}  // namespace epsolve::budget
