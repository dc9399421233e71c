#include "epsolve/runner.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "epsolve/fdm.hpp"
#include "epsolve/qmc.hpp"
#include "epsolve/reference.hpp"
#include "epsolve/truncation.hpp"

namespace epsolve::runner {

namespace {

constexpr const char* kVersion = "epsolve 0.1.0";

void write_header(std::ostream& os, const budget::ErrorBudget& b, const std::string& name) {
  os << "# " << kVersion << "\n";
  if (!name.empty()) os << "# builtin = " << name << "\n";
  std::istringstream ledger(budget::format_ledger(b));
  std::string line;
  while (std::getline(ledger, line)) os << "# " << line << "\n";
}

void write_row(std::ostream& os, double t, double x, cplx v) {
  os.precision(17);
  os << t << "," << x << "," << v.real() << "," << v.imag() << "," << std::norm(v) << "\n";
}

}  // namespace

ContinuumRun run_continuum(const config::BuiltProblem& bp) {
  if (bp.problem.family == Family::LatticeNls) {
    throw std::invalid_argument("run_continuum: lattice family");
  }
  ContinuumRun run;
  run.budget = budget::plan(bp.problem, bp.state, bp.potential, bp.eps, bp.constants);
  const auto& p = run.budget.params;
  const int d = bp.problem.dimension;
  const double r_box = p.box_radius;

  // Effective state sampler: gamma_R cutoff; Hermite smoothing on the S^eps
  // route first.
  Sampler state_sampler = bp.state.sampler;
  if (run.budget.assumption2 && p.hermite_k) {
    truncation::HermiteIntegration integ;
    integ.d4 = bp.constants.d4;
    InitialState proxy = bp.state;
    auto proj = truncation::hermite_project(
        proxy, run.budget.shares.at("hermite") / run.budget.c_t_value, integ);
    state_sampler = proj.sampler;
  }
  truncation::CutoffSpec gamma{truncation::CutoffSpec::Kind::GammaR, r_box, 1.0, {}, d};
  Sampler cut_state = [state_sampler, gamma](std::span<const double> x, int prec) -> cplx {
    const double g = gamma(x);
    return g == 0.0 ? cplx{} : g * state_sampler(x, prec);
  };

  // Static potential: excised singular part plus the regular part, mollified
  // on the S^eps route.
  std::optional<Sampler> static_sampler;
  if (bp.potential.w_sing) {
    auto exc = truncation::excise_singularities(
        bp.potential, run.budget.shares.at("excision"), r_box, d);
    static_sampler = exc.sampler;
  }
  if (bp.potential.w_reg) {
    Sampler reg = bp.potential.w_reg->sampler;
    if (static_sampler) {
      Sampler prev = *static_sampler;
      static_sampler = [prev, reg](std::span<const double> x, int prec) {
        return prev(x, prec) + reg(x, prec);
      };
    } else {
      static_sampler = reg;
    }
  }
  std::optional<Sampler> control_sampler;
  if (bp.potential.v_con) control_sampler = bp.potential.v_con->sampler;
  if (run.budget.assumption2 && p.mollifier_sigma) {
    truncation::MollifierSpec mspec;
    mspec.sigma = *p.mollifier_sigma;
    mspec.xi = p.mollifier_xi.value_or(1.0);
    mspec.n_samples = std::max(256, p.n_samples);
    mspec.sampling_precision = run.budget.tv_cert *
        std::erfc(mspec.xi / (std::sqrt(2.0) * mspec.sigma)) + 1e-300;
    if (static_sampler) {
      static_sampler =
          truncation::mollify_potential(*static_sampler, run.budget.tv_cert, mspec, d).sampler;
    }
    if (control_sampler) {
      control_sampler =
          truncation::mollify_potential(*control_sampler, run.budget.tv_cert, mspec, d).sampler;
    }
  }

  // Cubic discretizations, all on the same Halton points.
  qmc::HaltonConfig halton = qmc::HaltonConfig::first_primes(d, p.n_samples);
  run.initial =
      qmc::cubic_discretize(cut_state, r_box, p.cells_per_unit, d, halton, p.precision_m);
  propagate::DiscretePotential pots;
  if (static_sampler) {
    pots.static_part = qmc::cubic_discretize(*static_sampler, r_box, p.cells_per_unit, d,
                                             halton, p.precision_m);
  }
  if (control_sampler) {
    pots.control_part = qmc::cubic_discretize(*control_sampler, r_box, p.cells_per_unit, d,
                                              halton, p.precision_m);
    pots.u = bp.potential.u;
  }

  propagate::SplitScheme scheme;
  scheme.kind = bp.problem.family == Family::DefocusingNls ? propagate::SchemeKind::Nls
                                                           : propagate::SchemeKind::LinearTD;
  scheme.tau = p.tau;
  scheme.order_k = p.order_k;
  scheme.k_eps = run.budget.shares.at("exponential") > 0
                     ? run.budget.shares.at("exponential") / static_cast<double>(p.steps)
                     : 1e-12;
  scheme.k_range = bp.constants.phase_margin * p.tau * run.budget.phase_sup;
  scheme.mu2 = bp.problem.mu * bp.problem.mu;
  scheme.sigma = bp.problem.sigma;
  scheme.nu = 1.0;

  propagate::TrajectoryOptions opts;
  opts.snapshot_stride = bp.snapshot_stride;
  opts.record_h1h = scheme.kind == propagate::SchemeKind::Nls;

  run.trajectory = scheme.kind == propagate::SchemeKind::Nls
                       ? propagate::strang_nls(run.initial, scheme, pots,
                                               static_cast<int>(p.steps), opts)
                       : propagate::strang_linear(run.initial, scheme, pots,
                                                  static_cast<int>(p.steps), opts);
  return run;
}

LatticeRun run_lattice(const config::BuiltProblem& bp) {
  if (bp.problem.family != Family::LatticeNls) {
    throw std::invalid_argument("run_lattice: continuum family");
  }
  LatticeRun run;
  run.budget = budget::plan(bp.problem, bp.state, bp.potential, bp.eps, bp.constants);
  const auto& p = run.budget.params;
  const int n = static_cast<int>(p.box_radius);
  const int d = bp.problem.dimension;

  run.initial = lattice::LatticeState(n, d, bp.state.sobolev.eps, bp.state.sobolev.bound);
  std::vector<int> site(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < run.initial.size(); ++i) {
    run.initial.site(i, site);
    for (int a = 0; a < d; ++a) x[a] = static_cast<double>(site[a]);
    run.initial[i] = bp.state.sampler(x, p.precision_m);
  }
  run.initial.check_certificate();

  run.trajectory = lattice::lattice_strang(run.initial, bp.problem.nu, bp.problem.sigma,
                                           p.tau, static_cast<int>(p.steps), p.order_k,
                                           bp.snapshot_stride);
  return run;
}

void write_csv(std::ostream& os, const ContinuumRun& run) {
  write_header(os, run.budget, "");
  os << "t,x,re,im,density\n";
  const auto emit = [&](double t, const GridFunction& g) {
    std::vector<double> x(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.midpoint(i, x);
      write_row(os, t, x[0], g[i]);
    }
  };
  emit(0.0, run.initial);
  for (std::size_t s = 0; s < run.trajectory.snapshots.size(); ++s) {
    emit(run.trajectory.snapshot_times[s], run.trajectory.snapshots[s]);
  }
  const double t_final = run.budget.params.tau * static_cast<double>(run.budget.params.steps);
  if (run.trajectory.snapshot_times.empty() ||
      run.trajectory.snapshot_times.back() != t_final) {
    emit(t_final, run.trajectory.final);
  }
}

void write_csv(std::ostream& os, const LatticeRun& run) {
  write_header(os, run.budget, "");
  os << "t,k,re,im,density\n";
  const auto emit = [&](double t, const lattice::LatticeState& v) {
    std::vector<int> site(v.dim());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v.site(i, site);
      write_row(os, t, static_cast<double>(site[0]), v[i]);
    }
  };
  emit(0.0, run.initial);
  const double t_final = run.budget.params.tau * static_cast<double>(run.budget.params.steps);
  emit(t_final, run.trajectory.final);
}

int solve_to_file(const config::Ini& ini, bool pin_constants,
                  const std::optional<std::string>& override_path, std::ostream& log) {
  config::BuiltProblem bp;
  try {
    bp = config::build_problem(ini, pin_constants);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  const std::string path = override_path.value_or(bp.output_path);
  try {
    std::ofstream out(path);
    if (!out) {
      log << "config error: cannot open output path '" << path << "'\n";
      return kExitConfigError;
    }
    if (bp.problem.family == Family::LatticeNls) {
      LatticeRun run = run_lattice(bp);
      write_csv(out, run);
      log << budget::format_ledger(run.budget);
    } else {
      ContinuumRun run = run_continuum(bp);
      write_csv(out, run);
      log << budget::format_ledger(run.budget);
    }
  } catch (const budget::BudgetError& e) {
    log << "budget infeasible: " << e.what() << "\n";
    return kExitBudgetInfeasible;
  } catch (const config::ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kExitNumericFailure;
  }
  log << "wrote " << path << "\n";
  return kExitOk;
}

BlowupReport demo_blowup(std::ostream* csv) {
  BlowupReport report;
  const double t_star = 10.0;
  report.t_star = t_star;

  // Fixed grid: the point of the demonstration is that refining it does not
  // recover the blow-up, only the plateau level moves.
  const double r_box = 8.0;
  const int m = 64;
  const double tau = 1e-3;
  const int segment_steps = 100;  // 0.1 per segment
  const int segments = 99;        // up to t = 9.9 < T*

  reference::QuinticBlowup exact;
  GridFunction psi(r_box, m, 1);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = psi.axis_midpoint(static_cast<int>(i));
    psi[i] = exact.evaluate(x, 0.0);
  }

  propagate::SplitScheme scheme;
  scheme.kind = propagate::SchemeKind::Nls;
  scheme.tau = tau;
  scheme.order_k = 12;
  scheme.k_eps = 1e-10;
  scheme.k_range = 1.0;
  scheme.mu2 = 1.0;
  scheme.sigma = 5;
  scheme.nu = -1.0;  // focusing
  propagate::DiscretePotential pots;

  auto sup_norm = [](const GridFunction& g) {
    double s = 0.0;
    for (const cplx& v : g.values()) s = std::max(s, std::abs(v));
    return s;
  };

  if (csv) {
    *csv << "# " << kVersion << "\n# blow-up demonstration, T* = " << t_star << "\n";
    *csv << "t,numeric_sup,exact_amplitude\n";
    csv->precision(17);
  }
  report.times.push_back(0.0);
  report.numeric_sup.push_back(sup_norm(psi));
  report.exact_amplitude.push_back(exact.amplitude(0.0));
  if (csv) *csv << 0.0 << "," << report.numeric_sup.back() << "," << report.exact_amplitude.back() << "\n";

  for (int seg = 1; seg <= segments; ++seg) {
    auto traj = propagate::strang_nls(psi, scheme, pots, segment_steps, {});
    psi = std::move(traj.final);
    scheme.order_k = traj.k_used;  // keep the recomputed order
    scheme.k_range = std::max(scheme.k_range, traj.max_phase_range);
    const double t = 0.1 * seg;
    report.times.push_back(t);
    report.numeric_sup.push_back(sup_norm(psi));
    report.exact_amplitude.push_back(exact.amplitude(t));
    if (csv) {
      *csv << t << "," << report.numeric_sup.back() << "," << report.exact_amplitude.back()
           << "\n";
    }
  }

  auto at_time = [&](double t, const std::vector<double>& series) {
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      if (std::abs(report.times[i] - t) < 1e-9) return series[i];
    }
    throw std::logic_error("demo_blowup: time not sampled");
  };
  report.exact_ratio = at_time(9.9, report.exact_amplitude) / at_time(9.0, report.exact_amplitude);
  report.numeric_ratio = at_time(9.9, report.numeric_sup) / at_time(9.0, report.numeric_sup);
  report.plateau = report.numeric_ratio < report.exact_ratio / 2.0;
  return report;
}

}  // namespace epsolve::runner
