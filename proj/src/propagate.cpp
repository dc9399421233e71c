#include "epsolve/propagate.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "epsolve/fdm.hpp"

namespace epsolve::propagate {

namespace {

constexpr double kResidualTol = 1e-12;

using SpMat = Eigen::SparseMatrix<cplx>;
using Vec = Eigen::VectorXcd;

std::size_t axis_stride(const GridFunction& f, int axis) {
  std::size_t s = 1;
  for (int a = f.dim() - 1; a > axis; --a) s *= static_cast<std::size_t>(f.extent());
  return s;
}

/// y = (I + c H) x with H = -mu2 * Laplacian_h + V, Dirichlet ghosts.
void apply_shifted(const GridFunction& pot, double mu2, cplx c, const Vec& x, Vec& y) {
  const int extent = pot.extent();
  const double denom = 4.0 * pot.h() * pot.h();
  const std::size_t size = pot.size();
  for (std::size_t i = 0; i < size; ++i) {
    y[static_cast<Eigen::Index>(i)] = x[static_cast<Eigen::Index>(i)] * (1.0 + c * pot[i]);
  }
  for (int axis = 0; axis < pot.dim(); ++axis) {
    const std::size_t stride = axis_stride(pot, axis);
    for (std::size_t i = 0; i < size; ++i) {
      const int k = static_cast<int>((i / stride) % static_cast<std::size_t>(extent));
      cplx up = (k + 2 < extent) ? x[static_cast<Eigen::Index>(i + 2 * stride)] : cplx{};
      cplx dn = (k - 2 >= 0) ? x[static_cast<Eigen::Index>(i - 2 * stride)] : cplx{};
      // -mu2 * lap contribution
      y[static_cast<Eigen::Index>(i)] +=
          c * (-mu2) * (up - 2.0 * x[static_cast<Eigen::Index>(i)] + dn) / denom;
    }
  }
}

}  // namespace

cplx exp_k(double x, int order) {
  // Alternating series for cos and sin truncated at x^{2K} and x^{2K+1}.
  double even = 1.0, odd = x;
  double term_even = 1.0, term_odd = x;
  for (int n = 1; n <= order; ++n) {
    term_even *= -x * x / ((2.0 * n - 1.0) * (2.0 * n));
    term_odd *= -x * x / ((2.0 * n) * (2.0 * n + 1.0));
    even += term_even;
    odd += term_odd;
  }
  return {even, odd};
}

double exp_k_remainder_bound(int order, double r) {
  auto stirling = [](double x, double n) {
    if (x == 0.0) return 0.0;
    // x^n / n! <= (x e / n)^n / sqrt(2 pi n)
    return std::exp(n * (std::log(x) + 1.0 - std::log(n))) / std::sqrt(2.0 * M_PI * n);
  };
  const double n1 = 2.0 * order + 2.0;
  const double n2 = 2.0 * order + 3.0;
  return stirling(r, n1) + stirling(r, n2);
}

int choose_k(double eps, double r) {
  if (eps <= 0 || r <= 0) throw std::invalid_argument("choose_k: eps, r > 0 required");
  for (int k = 0; k <= 512; ++k) {
    if (exp_k_remainder_bound(k, r) <= eps) return k;
  }
  throw std::runtime_error("choose_k: no K <= 512 satisfied the bound");
}

struct CayleyOperator::Impl {
  GridFunction potential;
  double tau;
  double mu2;
  bool direct;
  Eigen::SparseLU<SpMat> lu;
  mutable double residual = 0.0;

  Impl(const GridFunction& pot, double tau_, double mu2_)
      : potential(pot), tau(tau_), mu2(mu2_), direct(pot.dim() == 1) {
    if (direct) {
      const auto n = static_cast<Eigen::Index>(pot.size());
      const cplx c{0.0, 0.5 * tau};
      const double denom = 4.0 * pot.h() * pot.h();
      std::vector<Eigen::Triplet<cplx>> trip;
      trip.reserve(static_cast<std::size_t>(3 * n));
      for (Eigen::Index i = 0; i < n; ++i) {
        trip.emplace_back(i, i, 1.0 + c * (potential[static_cast<std::size_t>(i)] + mu2 * 2.0 / denom));
        if (i + 2 < n) trip.emplace_back(i, i + 2, c * (-mu2) / denom);
        if (i - 2 >= 0) trip.emplace_back(i, i - 2, c * (-mu2) / denom);
      }
      SpMat a(n, n);
      a.setFromTriplets(trip.begin(), trip.end());
      a.makeCompressed();
      lu.compute(a);
      if (lu.info() != Eigen::Success) {
        throw std::runtime_error("cayley: sparse factorization failed");
      }
    }
  }

  Vec solve(const Vec& rhs) const {
    const cplx c{0.0, 0.5 * tau};
    if (direct) {
      Vec x = lu.solve(rhs);
      Vec ax(rhs.size());
      apply_shifted(potential, mu2, c, x, ax);
      residual = (ax - rhs).norm() / std::max(rhs.norm(), 1e-300);
      if (residual > kResidualTol) {
        // one step of iterative refinement
        Vec corr = lu.solve(rhs - ax);
        x += corr;
        apply_shifted(potential, mu2, c, x, ax);
        residual = (ax - rhs).norm() / std::max(rhs.norm(), 1e-300);
        if (residual > kResidualTol) {
          throw std::runtime_error("cayley: direct solve residual " + std::to_string(residual));
        }
      }
      return x;
    }
    // Conjugate-orthogonal CG for the complex symmetric system, Jacobi
    // preconditioned.
    const auto n = rhs.size();
    const double denom = 4.0 * potential.h() * potential.h();
    Vec diag_inv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      diag_inv[i] = 1.0 / (1.0 + c * (potential[static_cast<std::size_t>(i)] +
                                      mu2 * 2.0 * potential.dim() / denom));
    }
    Vec x = Vec::Zero(n), ax(n);
    Vec r = rhs;
    Vec z = diag_inv.cwiseProduct(r);
    Vec p = z;
    cplx rz = r.transpose() * z;  // unconjugated inner product
    const double rhs_norm = std::max(rhs.norm(), 1e-300);
    for (int it = 0; it < 10000; ++it) {
      apply_shifted(potential, mu2, c, p, ax);
      const cplx pap = p.transpose() * ax;
      if (pap == cplx{}) break;
      const cplx alpha = rz / pap;
      x += alpha * p;
      r -= alpha * ax;
      residual = r.norm() / rhs_norm;
      if (residual <= kResidualTol) return x;
      z = diag_inv.cwiseProduct(r);
      const cplx rz_new = r.transpose() * z;
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    throw std::runtime_error("cayley: iterative solve stalled at residual " +
                             std::to_string(residual));
  }
};

CayleyOperator::CayleyOperator(const GridFunction& potential, double tau, double mu2)
    : impl_(std::make_unique<Impl>(potential, tau, mu2)) {}
CayleyOperator::~CayleyOperator() = default;
CayleyOperator::CayleyOperator(CayleyOperator&&) noexcept = default;
CayleyOperator& CayleyOperator::operator=(CayleyOperator&&) noexcept = default;

double CayleyOperator::last_residual() const { return impl_->residual; }
double CayleyOperator::tau() const { return impl_->tau; }

GridFunction CayleyOperator::apply(const GridFunction& psi) const {
  if (!psi.same_grid(impl_->potential)) throw std::invalid_argument("cayley: grid mismatch");
  const auto n = static_cast<Eigen::Index>(psi.size());
  if (impl_->tau == 0.0) return psi;
  Vec in(n);
  for (Eigen::Index i = 0; i < n; ++i) in[i] = psi[static_cast<std::size_t>(i)];
  Vec rhs(n);
  apply_shifted(impl_->potential, impl_->mu2, cplx{0.0, -0.5 * impl_->tau}, in, rhs);
  Vec out = impl_->solve(rhs);
  GridFunction result(psi.box_radius(), psi.cells_per_unit(), psi.dim());
  for (Eigen::Index i = 0; i < n; ++i) result[static_cast<std::size_t>(i)] = out[i];
  return result;
}

GridFunction cayley_step(const GridFunction& psi, double tau, const GridFunction& potential,
                         double mu2) {
  CayleyOperator op(potential, tau, mu2);
  return op.apply(psi);
}

namespace {

Trajectory run_strang(const GridFunction& psi0, const SplitScheme& scheme,
                      const DiscretePotential& pot, int steps, const TrajectoryOptions& opts,
                      bool nonlinear) {
  if (steps < 0) throw std::invalid_argument("strang: steps >= 0");
  GridFunction zero(psi0.box_radius(), psi0.cells_per_unit(), psi0.dim());
  const GridFunction& static_pot = pot.static_part ? *pot.static_part : zero;
  if (!static_pot.same_grid(psi0)) throw std::invalid_argument("strang: potential grid mismatch");
  if (pot.control_part && !pot.control_part->same_grid(psi0)) {
    throw std::invalid_argument("strang: control grid mismatch");
  }

  CayleyOperator half(static_pot, 0.5 * scheme.tau, scheme.mu2);

  Trajectory traj;
  traj.k_used = scheme.order_k;
  GridFunction psi = psi0;
  int order_k = scheme.order_k;
  double certified_range = scheme.k_range;

  for (int step = 0; step < steps; ++step) {
    const double t_k = step * scheme.tau;
    psi = half.apply(psi);

    // Phase stage: multiply by exp_K(-tau * (u(t_k) V_con + nu |psi|^{sigma-1})).
    const double u_k = pot.control_part ? pot.u(t_k) : 0.0;
    double range = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      double arg = 0.0;
      if (pot.control_part) arg += u_k * (*pot.control_part)[i].real();
      if (nonlinear) {
        arg += scheme.nu * std::pow(std::abs(psi[i]),
                                    static_cast<double>(scheme.sigma - 1));
      }
      range = std::max(range, std::abs(scheme.tau * arg));
    }
    if (range > certified_range) {
      certified_range = 1.1 * range;
      order_k = choose_k(scheme.k_eps, certified_range);
      traj.k_recomputations++;
      traj.k_used = order_k;
    }
    traj.max_phase_range = std::max(traj.max_phase_range, range);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      double arg = 0.0;
      if (pot.control_part) arg += u_k * (*pot.control_part)[i].real();
      if (nonlinear) {
        arg += scheme.nu * std::pow(std::abs(psi[i]),
                                    static_cast<double>(scheme.sigma - 1));
      }
      psi[i] *= exp_k(-scheme.tau * arg, order_k);
    }

    psi = half.apply(psi);

    traj.times.push_back((step + 1) * scheme.tau);
    traj.l2_norms.push_back(grid_l2_norm(psi));
    if (opts.record_h1h) {
      traj.h1h_norms.push_back(fdm::discrete_sobolev_norms(psi).h1h);
    }
    if (opts.snapshot_stride > 0 && (step + 1) % opts.snapshot_stride == 0) {
      traj.snapshots.push_back(psi);
      traj.snapshot_times.push_back((step + 1) * scheme.tau);
    }
  }
  traj.final = std::move(psi);
  return traj;
}

}  // namespace

Trajectory strang_linear(const GridFunction& psi0, const SplitScheme& scheme,
                         const DiscretePotential& pot, int steps,
                         const TrajectoryOptions& opts) {
  if (scheme.kind != SchemeKind::LinearTD) {
    throw std::invalid_argument("strang_linear: scheme kind mismatch");
  }
  return run_strang(psi0, scheme, pot, steps, opts, /*nonlinear=*/false);
}

Trajectory strang_nls(const GridFunction& psi0, const SplitScheme& scheme,
                      const DiscretePotential& pot, int steps, const TrajectoryOptions& opts) {
  if (scheme.kind != SchemeKind::Nls) {
    throw std::invalid_argument("strang_nls: scheme kind mismatch");
  }
  if (scheme.sigma != 3 && scheme.sigma != 5) {
    throw std::invalid_argument("strang_nls: sigma must be 3 or 5");
  }
  return run_strang(psi0, scheme, pot, steps, opts, /*nonlinear=*/true);
}

SubstitutionCheck lipschitz_substitution_check(const Trajectory& base,
                                               const std::vector<Trajectory>& perturbed,
                                               const std::vector<double>& sizes) {
  if (perturbed.size() != sizes.size()) {
    throw std::invalid_argument("substitution check: one trajectory per size");
  }
  SubstitutionCheck out;
  out.sizes = sizes;
  for (std::size_t p = 0; p < perturbed.size(); ++p) {
    const Trajectory& other = perturbed[p];
    if (other.snapshots.size() != base.snapshots.size()) {
      throw std::invalid_argument("substitution check: snapshot count mismatch");
    }
    double worst = grid_l2_distance(base.final, other.final);
    for (std::size_t k = 0; k < base.snapshots.size(); ++k) {
      worst = std::max(worst, grid_l2_distance(base.snapshots[k], other.snapshots[k]));
    }
    out.max_distance.push_back(worst);
    out.ratios.push_back(sizes[p] > 0 ? worst / sizes[p] : 0.0);
  }
  return out;
}

}  // namespace epsolve::propagate
