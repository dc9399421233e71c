#pragma once

#include <span>
#include <vector>

#include "epsolve/grid.hpp"

namespace epsolve::qmc {

struct HaltonConfig {
  std::vector<int> bases;  // pairwise coprime, each >= 2
  int n_samples = 64;

  void validate() const;
  static HaltonConfig first_primes(int d, int n_samples);
};

/// Certificate D*_N <= c_star * log(N)^d / N for Halton points in the given
/// bases, valid for N >= 2 (at N = 1 the log-form bound is vacuous).
struct DiscrepancyCertificate {
  int n = 0;
  int d = 0;
  long long c_star = 0;
  double bound = 0.0;
};

/// k-th Halton point (k >= 1): componentwise radical inverse of k.
std::vector<double> halton(const HaltonConfig& config, long long k);
double radical_inverse(int base, long long k);

/// Smallest integer c with
///   d/N + prod_k((b_k-1)/(2 log b_k) log N + (b_k+1)/2) / N <= c log(N)^d / N
/// for all N >= 2.  The ratio of the two sides is decreasing in N (every term
/// of the expanded bracket divided by log(N)^d has a non-positive power of
/// log N), so a scan up to the horizon brackets the maximum at N = 2; the
/// scan is kept as a guard.
long long c_star(std::span<const int> bases, long long scan_horizon = 1000000);

DiscrepancyCertificate discrepancy_certificate(const HaltonConfig& config);

/// Right side of the Halton star-discrepancy bound at a given N.
double halton_bound_rhs(std::span<const int> bases, long long n);

/// Exact star discrepancy by exhaustive scan over anchored boxes with corners
/// on the coordinate grid of the points (taken open and closed).  Test-only
/// oracle: d <= 2 and N <= 4096.
double star_discrepancy_brute(const std::vector<std::vector<double>>& points);

/// Numerical cubic discretization: per cell, the N-point Halton mean of
/// sampler values at precision 2^-M.  All cells share the same point set;
/// within-cell summation order is fixed, so concurrent cell evaluation is
/// bit-identical to sequential.
GridFunction cubic_discretize(const Sampler& f, double box_radius, int cells_per_unit,
                              int dim, const HaltonConfig& halton, int precision_exponent,
                              int threads = 0);

struct KhBound {
  double linf = 0.0;
  double l2 = 0.0;
};

/// Koksma-Hlawka bounds on |f_Q - f^M_{Q,N}|:
///   sup bound  (max TV) * cert.bound + N 2^-M
///   L2 bound   sqrt(sum TV^2) * cert.bound + N 2^-M * cell_count
KhBound kh_error_bound(std::span<const double> tv_per_cell,
                       const DiscrepancyCertificate& cert, int precision_exponent,
                       int n_samples, std::size_t cell_count);

/// Measured variation of a sampler composed with the affine map onto one cell,
/// by dense directional sampling (samples_per_axis points per axis), inflated
/// by 2x.  Convenience for tests; budgets use the declared CLBBV map.
double tv_estimate_on_cell(const Sampler& f, std::span<const double> cell_lo, double h,
                           int dim, int samples_per_axis = 1024);

}  // namespace epsolve::qmc
