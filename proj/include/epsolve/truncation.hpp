#pragma once

#include <optional>
#include <vector>

#include "epsolve/problem.hpp"
#include "epsolve/qmc.hpp"

namespace epsolve::truncation {

enum class RadiusRule { TailOnly, BoundaryFlux };

struct RadiusCertificate {
  double radius = 0.0;
  double epsilon_share = 0.0;
  RadiusRule rule = RadiusRule::BoundaryFlux;
  double c1 = 0.0;   // state bound
  double c_t = 0.0;  // flow constant
  double d1 = 0.0;   // boundary-flux constant
  double eta = 2.0;  // decay exponent for the tail rule
  double lhs = 0.0;  // value of the satisfied inequality's left side
};

/// Smallest dyadic R in {1, 2, 4, ...} satisfying
///   TailOnly:      c1 * R^-eta <= eps_share
///   BoundaryFlux:  d1 * 2 * c_t * c1^2 / R + c_t * c1 / R^2 <= eps_share
RadiusCertificate choose_radius(double c1, double c_t, double d1, double eps_share,
                                RadiusRule rule, double eta = 2.0);

/// C-infinity transition built from the normalized antiderivative of the
/// bump exp(1 + 1/(s^2 - 1)) on (-1, 1): 0 for u <= 0, 1 for u >= 1, all
/// derivatives vanishing at both junctions.  Evaluated from a cached cumulative
/// quadrature table, accurate to ~1e-13.
double smooth_step(double u);

struct CutoffSpec {
  enum class Kind { GammaR, Zeta };
  Kind kind = Kind::GammaR;
  double radius = 1.0;           // R for GammaR, delta for Zeta
  double transition_width = 1.0; // GammaR: absolute width; Zeta uses delta
  std::vector<std::vector<double>> centers;  // Zeta only
  int dim = 1;

  /// GammaR: 1 on max_i |x_i| <= R - width, 0 outside the box.
  /// Zeta: 0 on max_i |x_i - c_i| <= delta around each center, 1 beyond 2*delta.
  double operator()(std::span<const double> x) const;
};

/// Sup-norm bounds of the first q derivatives of the transition profile,
/// measured once on a dense grid and inflated by 2x; scaling by width^-order
/// is applied by the callers.
std::vector<double> step_derivative_bounds(int max_order);

struct ExcisionResult {
  Sampler sampler;          // x -> zeta(x) * w_sing(x)
  CutoffSpec zeta;
  double delta = 0.0;
  double w_k_inf_bound = 0.0;  // hat-C(K): K times cutoff derivative bounds
  std::vector<std::vector<double>> excised;  // singularities inside the box
};

/// Queries (delta, K) = f(eps_share / 2, R) and excises delta-cubes around
/// each singularity inside [-R, R]^d.
ExcisionResult excise_singularities(const PotentialModel& pot, double eps_share,
                                    double box_radius, int dim, int smoothness_order = 2);

struct MollifierSpec {
  double sigma = 0.1;
  double xi = 1.0;             // integration cutoff radius
  int n_samples = 4096;        // QMC samples for the convolution integral
  double sampling_precision = 1e-12;

  void validate(double v_sup) const;  // erfc(xi / (sqrt 2 sigma)) * sup <= precision
};

struct MollifiedPotential {
  Sampler sampler;
  double tail_bound = 0.0;       // ||V||_inf erfc(xi / (sqrt 2 sigma)) per axis count
  double derivative_bound = 0.0; // ||V||_inf * ||chi_sigma'||_L1 = ||V||_inf sqrt(2/pi)/sigma
};

/// x -> integral over [-xi, xi]^d of V(x - y) chi_sigma(y) dy by Halton QMC,
/// with the Gaussian tail beyond xi accounted separately.
MollifiedPotential mollify_potential(const Sampler& v, double v_sup, const MollifierSpec& spec,
                                     int dim);

/// Hermite function psi_n (harmonic oscillator eigenfunction, eigenvalue
/// 2n + 1 in 1d) by the normalized three-term recurrence.
double hermite_function(int n, double x);

struct HermiteProjection {
  std::vector<cplx> coefficients;
  int k = 0;              // number of retained modes
  double delta = 0.0;     // targeted L2 truncation error
  double h44_bound = 0.0; // d4 * sqrt(sum lambda_n^2 |c_n|^2)
  Sampler sampler;        // reconstruction x -> sum c_n psi_n(x)
};

struct HermiteIntegration {
  double box_radius = 16.0;  // 0: choose from K automatically
  int cells_per_unit = 16;
  int n_samples = 128;
  double d4 = 1.0;  // the (uncited-value) embedding constant, configurable
};

/// K = smallest integer with C^2 / (2K+1)^{2 eps} <= delta^2; coefficients
/// <psi_n, phi0> by per-cell Halton means over a box covering the classical
/// turning points.  1d only (higher dimensions tensorize).
HermiteProjection hermite_project(const InitialState& state, double delta,
                                  const HermiteIntegration& integration = {});

/// ||f g||-type variation bound with lambda = 3^d - 2^{d+1} + 2:
///   sup_f sup_g + lambda^2 TV_f TV_g + lambda (TV_f sup_g + TV_g sup_f)
double tv_product_bound(double sup_f, double tv_f, double sup_g, double tv_g, int dim);

}  // namespace epsolve::truncation
