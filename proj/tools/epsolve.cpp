#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "epsolve/budget.hpp"
#include "epsolve/config.hpp"
#include "epsolve/qmc.hpp"
#include "epsolve/reference.hpp"
#include "epsolve/runner.hpp"

namespace {

using namespace epsolve;

int cmd_solve(const std::string& config_path, const std::string& builtin,
              const std::string& output, bool pin_constants) {
  config::Ini ini;
  try {
    if (!builtin.empty()) {
      ini = config::Ini::parse(config::preset_config(builtin));
      if (!config_path.empty()) ini.merge(config::Ini::parse_file(config_path));
    } else {
      ini = config::Ini::parse_file(config_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return runner::kExitConfigError;
  }
  std::optional<std::string> out;
  if (!output.empty()) out = output;
  return runner::solve_to_file(ini, pin_constants, out, std::cout);
}

int cmd_budget(const std::string& config_path, const std::string& builtin,
               bool pin_constants) {
  try {
    config::Ini ini;
    if (!builtin.empty()) {
      ini = config::Ini::parse(config::preset_config(builtin));
      if (!config_path.empty()) ini.merge(config::Ini::parse_file(config_path));
    } else {
      ini = config::Ini::parse_file(config_path);
    }
    auto bp = config::build_problem(ini, pin_constants);
    auto b = budget::plan(bp.problem, bp.state, bp.potential, bp.eps, bp.constants);
    std::cout << budget::format_ledger(b);
    auto verdict = budget::replay(b);
    std::cout << "replay = " << (verdict.ok ? "pass" : "FAIL") << "\n";
    for (const auto& v : verdict.violations) std::cout << "violated: " << v << "\n";
    return verdict.ok ? runner::kExitOk : runner::kExitNumericFailure;
  } catch (const budget::BudgetError& e) {
    std::cerr << "budget infeasible: " << e.what() << "\n";
    return runner::kExitBudgetInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return runner::kExitConfigError;
  }
}

int cmd_reference(const std::string& name, const std::vector<double>& times, double x_min,
                  double x_max, int points) {
  try {
    std::cout.precision(17);
    std::cout << "t,x,re,im,density\n";
    for (double t : times) {
      for (int i = 0; i < points; ++i) {
        const double x = x_min + (x_max - x_min) * i / std::max(points - 1, 1);
        const cplx v = reference::evaluate_reference(name, x, t);
        std::cout << t << "," << x << "," << v.real() << "," << v.imag() << ","
                  << std::norm(v) << "\n";
      }
    }
    return runner::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runner::kExitConfigError;
  }
}

int cmd_demo_blowup(const std::string& output) {
  try {
    std::ofstream csv(output);
    if (!csv) {
      std::cerr << "cannot open '" << output << "'\n";
      return runner::kExitConfigError;
    }
    auto report = runner::demo_blowup(&csv);
    std::cout.precision(6);
    std::cout << "T* = " << report.t_star << "\n";
    std::cout << "exact amplitude ratio t=9 -> 9.9:   " << report.exact_ratio << "\n";
    std::cout << "numeric sup-norm ratio t=9 -> 9.9:  " << report.numeric_ratio << "\n";
    std::cout << "plateau (numeric < exact/2):        " << (report.plateau ? "yes" : "no")
              << "\n";
    std::cout << "wrote " << output << "\n";
    return report.plateau ? runner::kExitOk : runner::kExitNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return runner::kExitNumericFailure;
  }
}

int cmd_discrepancy(const std::vector<int>& bases, int n) {
  try {
    qmc::HaltonConfig cfg{bases, n};
    auto cert = qmc::discrepancy_certificate(cfg);
    std::cout.precision(17);
    std::cout << "d = " << cert.d << "\n";
    std::cout << "N = " << cert.n << "\n";
    std::cout << "c_star = " << cert.c_star << "\n";
    std::cout << "bound = " << cert.bound << "\n";
    if (cert.d <= 2 && cert.n <= 4096) {
      std::vector<std::vector<double>> pts;
      for (int k = 1; k <= cert.n; ++k) pts.push_back(qmc::halton(cfg, k));
      std::cout << "measured_d_star = " << qmc::star_discrepancy_brute(pts) << "\n";
    }
    return runner::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return runner::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-budgeted Schrodinger solver on unbounded domains"};
  app.require_subcommand(1);

  std::string config_path, builtin, output;
  bool pin_constants = false;

  auto* solve = app.add_subcommand("solve", "plan a budget, propagate, write CSV");
  solve->add_option("config", config_path, "config file path");
  solve->add_option("--builtin", builtin, "builtin problem preset");
  solve->add_option("-o,--output", output, "override the output path");
  solve->add_flag("--pin-constants", pin_constants,
                  "apply the config's [pinned-constants] section");

  auto* budget_cmd = app.add_subcommand("budget", "plan only; print the ledger and replay it");
  budget_cmd->add_option("config", config_path, "config file path");
  budget_cmd->add_option("--builtin", builtin, "builtin problem preset");
  budget_cmd->add_flag("--pin-constants", pin_constants,
                       "apply the config's [pinned-constants] section");

  std::string ref_name;
  std::vector<double> ref_times;
  double x_min = -8.0, x_max = 8.0;
  int ref_points = 257;
  auto* ref = app.add_subcommand("reference", "closed-form reference values");
  ref->add_option("name", ref_name, "coherent-field | quintic-blowup | free-gaussian")
      ->required();
  ref->add_option("-t,--times", ref_times, "evaluation times")->required();
  ref->add_option("--x-min", x_min, "left edge");
  ref->add_option("--x-max", x_max, "right edge");
  ref->add_option("--points", ref_points, "grid points");

  std::string blowup_out = "blowup.csv";
  auto* demo = app.add_subcommand("demo-blowup", "focusing quintic blow-up demonstration");
  demo->add_option("-o,--output", blowup_out, "CSV output path");

  std::vector<int> bases{2};
  int disc_n = 1024;
  auto* disc = app.add_subcommand("discrepancy", "Halton discrepancy certificate");
  disc->add_option("-b,--bases", bases, "pairwise coprime bases");
  disc->add_option("-n", disc_n, "sample count");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) {
    if (config_path.empty() && builtin.empty()) {
      std::cerr << "config error: solve needs a config path or --builtin\n";
      return epsolve::runner::kExitConfigError;
    }
    return cmd_solve(config_path, builtin, output, pin_constants);
  }
  if (budget_cmd->parsed()) {
    if (config_path.empty() && builtin.empty()) {
      std::cerr << "config error: budget needs a config path or --builtin\n";
      return epsolve::runner::kExitConfigError;
    }
    return cmd_budget(config_path, builtin, pin_constants);
  }
  if (ref->parsed()) return cmd_reference(ref_name, ref_times, x_min, x_max, ref_points);
  if (demo->parsed()) return cmd_demo_blowup(blowup_out);
  if (disc->parsed()) return cmd_discrepancy(bases, disc_n);
  return 0;
}
