#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "epsolve/grid.hpp"
#include "epsolve/problem.hpp"

namespace epsolve::propagate {

/// Degree-K truncation of e^{ix}: sum of the alternating even part (cos) and
/// i times the odd part (sin) up to x^{2K+1}.
cplx exp_k(double x, int order);

/// Smallest K whose Stirling-form remainder bound
///   (r e / N)^N / sqrt(2 pi N),  N in {2K+2, 2K+3}
/// stays below eps on [-r, r].  Antitone in eps, monotone in r.
int choose_k(double eps, double r);

/// Remainder bound used by choose_k, exposed for certificates.
double exp_k_remainder_bound(int order, double r);

/// Crank-Nicolson step (1 + i tau H / 2) psi' = (1 - i tau H / 2) psi with
/// H = -mu^2 Laplacian_h + V_Q, Dirichlet boundary.  d = 1 uses a sparse
/// direct factorization; d >= 2 a matrix-free conjugate-orthogonal CG
/// (the matrix is complex symmetric).  Residual tolerance 1e-12 relative.
class CayleyOperator {
 public:
  CayleyOperator(const GridFunction& potential, double tau, double mu2);
  ~CayleyOperator();
  CayleyOperator(CayleyOperator&&) noexcept;
  CayleyOperator& operator=(CayleyOperator&&) noexcept;

  GridFunction apply(const GridFunction& psi) const;
  double last_residual() const;
  double tau() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GridFunction cayley_step(const GridFunction& psi, double tau, const GridFunction& potential,
                         double mu2 = 1.0);

enum class SchemeKind { LinearTD, Nls };

struct SplitScheme {
  SchemeKind kind = SchemeKind::LinearTD;
  double tau = 0.01;
  int order_k = 8;
  double k_eps = 1e-12;       // per-step exp_K accuracy target
  double k_range = 1.0;       // certified |phase argument| range
  double mu2 = 1.0;
  int sigma = 3;              // NLS power
  double nu = 1.0;            // nonlinearity sign (lattice admits -1)
};

/// Static potential (inside the Cayley Hamiltonian) plus an optional control
/// potential applied in the phase stage as u(t_k) * (V_con)_Q at the left
/// endpoint of each step.
struct DiscretePotential {
  std::optional<GridFunction> static_part;
  std::optional<GridFunction> control_part;
  ControlFunction u;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> l2_norms;       // after each step
  std::vector<double> h1h_norms;      // NLS runs
  std::vector<GridFunction> snapshots;
  std::vector<double> snapshot_times;
  GridFunction final;
  int k_used = 0;
  int k_recomputations = 0;
  double max_phase_range = 0.0;

  Trajectory() : final(1.0, 1, 1) {}
};

struct TrajectoryOptions {
  int snapshot_stride = 0;  // 0: keep only the final state
  bool record_h1h = false;
};

Trajectory strang_linear(const GridFunction& psi0, const SplitScheme& scheme,
                         const DiscretePotential& pot, int steps,
                         const TrajectoryOptions& opts = {});

Trajectory strang_nls(const GridFunction& psi0, const SplitScheme& scheme,
                      const DiscretePotential& pot, int steps,
                      const TrajectoryOptions& opts = {});

struct SubstitutionCheck {
  std::vector<double> sizes;
  std::vector<double> max_distance;  // max_k ||psi - psi~||_L2 per size
  std::vector<double> ratios;        // distance / size
};

/// Compares trajectories of runs differing only in samplers; reports the
/// max-over-time L2 distance per perturbation size (requires snapshots taken
/// at the same stride).
SubstitutionCheck lipschitz_substitution_check(const Trajectory& base,
                                               const std::vector<Trajectory>& perturbed,
                                               const std::vector<double>& sizes);

}  // namespace epsolve::propagate
