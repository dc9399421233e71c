#pragma once

#include <vector>

#include "epsolve/grid.hpp"
#include "epsolve/problem.hpp"

namespace epsolve::fdm {

/// Symmetric difference (f(x + h e_i) - f(x - h e_i)) / (2h) with Dirichlet
/// ghost cells (zero outside the box).
GridFunction sym_diff(const GridFunction& f, int axis);

/// The composition sum_i (delta_h^i)^2: a stride-2h five-point form
/// (f(x + 2h e_i) - 2 f(x) + f(x - 2h e_i)) / (4 h^2) per axis.  Note the
/// stride: this is the square of the symmetric difference, not the classical
/// 3-point stencil, and on parity sublattices it only couples through the
/// boundary.
GridFunction laplacian_h(const GridFunction& f);

struct DiscreteSobolev {
  double h1h = 0.0;
  double h2h = 0.0;
  double grad_l2 = 0.0;
  double lap_l2 = 0.0;
  bool summation_by_parts_ok = false;  // ||grad f||^2 <= ||f|| ||lap f|| held
};

DiscreteSobolev discrete_sobolev_norms(const GridFunction& f);

NormReport norm_report(const GridFunction& f,
                       const std::vector<std::pair<int, int>>& pairs);

/// Empirical log-log slope of || D_h^n f_Q - d^n f ||_{L^2} against h, given
/// the analytic n-th derivative.  Discretizations use exact cell means when
/// `exact_means` samples suffice (midpoint + Richardson is enough for the
/// smooth test integrands).
struct ConvergenceStudy {
  std::vector<double> hs;
  std::vector<double> errors;
  double slope = 0.0;
};

ConvergenceStudy convergence_study(const Sampler& f, const Sampler& dnf, int order,
                                   double box_radius, const std::vector<int>& ms,
                                   int dim = 1);

}  // namespace epsolve::fdm
