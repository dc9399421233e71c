#include "epsolve/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epsolve/propagate.hpp"

namespace epsolve::lattice {

namespace {

std::size_t checked_total(int extent, int dim) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) {
    total *= static_cast<std::size_t>(extent);
    if (total > (std::size_t{1} << 30)) throw std::invalid_argument("lattice too large");
  }
  return total;
}

}  // namespace

LatticeState::LatticeState(int half_width, int dim) : n_(half_width), dim_(dim) {
  if (half_width < 0 || dim < 1) throw std::invalid_argument("lattice: n >= 0, d >= 1");
  values_.assign(checked_total(extent(), dim), cplx{});
}

LatticeState::LatticeState(int half_width, int dim, double weight_s, double bound_a)
    : LatticeState(half_width, dim) {
  s_ = weight_s;
  a_ = bound_a;
}

void LatticeState::site(std::size_t flat, std::span<int> k) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    k[a] = static_cast<int>(flat % static_cast<std::size_t>(extent())) - n_;
    flat /= static_cast<std::size_t>(extent());
  }
}

std::size_t LatticeState::flatten(std::span<const int> k) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    flat = flat * static_cast<std::size_t>(extent()) + static_cast<std::size_t>(k[a] + n_);
  }
  return flat;
}

double LatticeState::l2_norm() const {
  double s = 0.0;
  for (const cplx& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

double LatticeState::weighted_l2_norm() const {
  std::vector<int> k(dim_);
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    site(i, k);
    double r2 = 1.0;
    for (int c : k) r2 += static_cast<double>(c) * c;
    s += std::pow(r2, s_) * std::norm(values_[i]);
  }
  return std::sqrt(s);
}

void LatticeState::check_certificate() const {
  if (a_ > 0.0 && weighted_l2_norm() > a_ * (1.0 + 1e-12)) {
    throw std::invalid_argument("lattice state violates its declared l2_s bound");
  }
}

LatticeState lattice_laplacian(const LatticeState& v) {
  LatticeState out(v.half_width(), v.dim(), v.weight_s(), 0.0);
  const int extent = v.extent();
  std::size_t stride = 1;
  for (int axis = v.dim() - 1; axis >= 0; --axis) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int k = static_cast<int>((i / stride) % static_cast<std::size_t>(extent));
      const cplx up = (k + 1 < extent) ? v[i + stride] : cplx{};
      const cplx dn = (k - 1 >= 0) ? v[i - stride] : cplx{};
      out[i] += up + dn - 2.0 * v[i];
    }
    stride *= static_cast<std::size_t>(extent);
  }
  return out;
}

int choose_lattice_radius(double bound_a, double weight_s, double eps_share,
                          double c_lattice) {
  if (bound_a <= 0 || weight_s <= 0 || eps_share <= 0) {
    throw std::invalid_argument("choose_lattice_radius: positive inputs required");
  }
  for (int n = 1; n <= (1 << 24); n *= 2) {
    const double jap = std::sqrt(1.0 + static_cast<double>(n) * n);
    if (c_lattice * bound_a * std::pow(jap, -weight_s / 4.0) <= eps_share) return n;
  }
  throw std::runtime_error("choose_lattice_radius: exceeded 2^24");
}

namespace {

/// Tridiagonal Thomas solve of (I + i tau/2 H) x = rhs with H = -Lap_1d
/// (diag 2, off-diag -1), strictly dominant for all tau.  Counts flops.
struct Tridiag {
  cplx diag, off;
  std::vector<cplx> c_prime;  // precomputed forward-elimination coefficients

  Tridiag(int size, double tau) {
    diag = cplx{1.0, tau};        // 1 + i tau/2 * 2
    off = cplx{0.0, -0.5 * tau};  // i tau/2 * (-1)
    c_prime.resize(size);
    cplx denom = diag;
    for (int i = 0; i < size; ++i) {
      c_prime[i] = off / denom;
      denom = diag - off * c_prime[i];
    }
  }

  void solve(std::span<cplx> x, std::span<cplx> scratch, OpCount& ops) const {
    const int n = static_cast<int>(x.size());
    cplx denom = diag;
    scratch[0] = x[0] / denom;
    for (int i = 1; i < n; ++i) {
      denom = diag - off * c_prime[i - 1];
      scratch[i] = (x[i] - off * scratch[i - 1]) / denom;
      ops.muls += 3;
      ops.adds += 2;
    }
    x[n - 1] = scratch[n - 1];
    for (int i = n - 2; i >= 0; --i) {
      x[i] = scratch[i] - c_prime[i] * x[i + 1];
      ops.muls += 1;
      ops.adds += 1;
    }
  }
};

/// Dense discrete sine transform pair for the d >= 2 Cayley application.
struct SineBasis {
  int size;
  std::vector<double> basis;   // basis[j*size + k] = sqrt(2/(N+1)) sin((j+1)(k+1)pi/(N+1))
  std::vector<double> eigen;   // lattice Laplacian eigenvalues 4 sin^2(...)

  explicit SineBasis(int n) : size(n), basis(static_cast<std::size_t>(n) * n), eigen(n) {
    const double f = M_PI / (n + 1.0);
    const double norm = std::sqrt(2.0 / (n + 1.0));
    for (int j = 0; j < n; ++j) {
      eigen[j] = 4.0 * std::pow(std::sin(0.5 * (j + 1) * f), 2);
      for (int k = 0; k < n; ++k) {
        basis[static_cast<std::size_t>(j) * n + k] = norm * std::sin((j + 1.0) * (k + 1.0) * f);
      }
    }
  }
};

void phase_stage(LatticeState& v, int nu, int sigma, double tau, int order_k, OpCount& ops) {
  const double power = sigma - 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double arg = -tau * nu * std::pow(std::abs(v[i]), power);
    v[i] *= propagate::exp_k(arg, order_k);
    ops.muls += static_cast<std::uint64_t>(2 * order_k + 4);
    ops.adds += static_cast<std::uint64_t>(2 * order_k + 1);
  }
}

}  // namespace

LatticeTrajectory lattice_strang(const LatticeState& v0, int nu, int sigma, double tau,
                                 int steps, int order_k, int snapshot_stride) {
  if (nu != 1 && nu != -1) throw std::invalid_argument("lattice_strang: nu must be +-1");
  if (sigma != 3 && sigma != 5) throw std::invalid_argument("lattice_strang: sigma in {3,5}");
  if (tau <= 0) throw std::invalid_argument("lattice_strang: tau > 0");

  LatticeTrajectory traj{LatticeState(v0.half_width(), v0.dim(), v0.weight_s(), 0.0), {}, {}, {}};
  LatticeState v = v0;
  const int extent = v.extent();

  if (v.dim() == 1) {
    Tridiag solver(extent, 0.5 * tau);
    std::vector<cplx> scratch(extent);
    auto half = [&](LatticeState& s) {
      // rhs = (I - i tau/4 H) s, then the tridiagonal solve.
      std::vector<cplx> rhs(extent);
      const cplx c{0.0, -0.25 * tau};
      for (int i = 0; i < extent; ++i) {
        const cplx up = (i + 1 < extent) ? s[i + 1] : cplx{};
        const cplx dn = (i - 1 >= 0) ? s[i - 1] : cplx{};
        rhs[i] = s[i] + c * (2.0 * s[i] - up - dn);
        traj.ops.muls += 2;
        traj.ops.adds += 4;
      }
      std::copy(rhs.begin(), rhs.end(), s.values().begin());
      solver.solve(s.values(), scratch, traj.ops);
    };
    for (int step = 0; step < steps; ++step) {
      half(v);
      phase_stage(v, nu, sigma, tau, order_k, traj.ops);
      half(v);
      traj.l2_norms.push_back(v.l2_norm());
      if (snapshot_stride > 0 && (step + 1) % snapshot_stride == 0) traj.snapshots.push_back(v);
    }
  } else {
    SineBasis sine(extent);
    std::vector<cplx> mode(extent);
    // Cayley multipliers per 1d eigenvalue; d-dim eigenvalue is the sum.
    auto half = [&](LatticeState& s) {
      // Transform along every axis, multiply, transform back.  Work in a
      // buffer indexed like the state.
      std::vector<cplx> buf(s.values().begin(), s.values().end());
      std::vector<cplx> tmp(s.size());
      std::size_t stride = 1;
      for (int axis = v.dim() - 1; axis >= 0; --axis) {
        for (std::size_t base = 0; base < s.size(); ++base) {
          const int k = static_cast<int>((base / stride) % static_cast<std::size_t>(extent));
          if (k != 0) continue;
          for (int j = 0; j < extent; ++j) {
            cplx acc{};
            for (int q = 0; q < extent; ++q) {
              acc += sine.basis[static_cast<std::size_t>(j) * extent + q] * buf[base + stride * q];
              traj.ops.muls += 1;
              traj.ops.adds += 1;
            }
            tmp[base + stride * static_cast<std::size_t>(j)] = acc;
          }
        }
        std::swap(buf, tmp);
        stride *= static_cast<std::size_t>(extent);
      }
      std::vector<int> idx(v.dim());
      for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t f = i;
        double lambda = 0.0;
        for (int a = v.dim() - 1; a >= 0; --a) {
          lambda += sine.eigen[f % static_cast<std::size_t>(extent)];
          f /= static_cast<std::size_t>(extent);
        }
        const cplx z{0.0, 0.25 * tau * lambda};  // i tau/2 * lambda / 2
        buf[i] *= (1.0 - z) / (1.0 + z);
        traj.ops.muls += 2;
        traj.ops.adds += 2;
      }
      stride = 1;
      for (int axis = v.dim() - 1; axis >= 0; --axis) {
        for (std::size_t base = 0; base < s.size(); ++base) {
          const int k = static_cast<int>((base / stride) % static_cast<std::size_t>(extent));
          if (k != 0) continue;
          for (int q = 0; q < extent; ++q) {
            cplx acc{};
            for (int j = 0; j < extent; ++j) {
              acc += sine.basis[static_cast<std::size_t>(j) * extent + q] * buf[base + stride * j];
              traj.ops.muls += 1;
              traj.ops.adds += 1;
            }
            tmp[base + stride * static_cast<std::size_t>(q)] = acc;
          }
        }
        std::swap(buf, tmp);
        stride *= static_cast<std::size_t>(extent);
      }
      std::copy(buf.begin(), buf.end(), s.values().begin());
    };
    for (int step = 0; step < steps; ++step) {
      half(v);
      phase_stage(v, nu, sigma, tau, order_k, traj.ops);
      half(v);
      traj.l2_norms.push_back(v.l2_norm());
      if (snapshot_stride > 0 && (step + 1) % snapshot_stride == 0) traj.snapshots.push_back(v);
    }
  }
  traj.final = std::move(v);
  return traj;
}

TruncationStudy truncation_study(const LatticeState& v0, const std::vector<int>& radii,
                                 int nu, int sigma, double tau, int steps, int order_k) {
  if (radii.empty()) throw std::invalid_argument("truncation_study: need radii");
  int n_ref = *std::max_element(radii.begin(), radii.end());
  if (v0.half_width() < n_ref) {
    throw std::invalid_argument("truncation_study: v0 must live on the largest lattice");
  }

  auto restrict_to = [&](const LatticeState& src, int n) {
    LatticeState out(n, src.dim(), src.weight_s(), 0.0);
    std::vector<int> k(src.dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
      out.site(i, k);
      out[i] = src[src.flatten(k)];
    }
    return out;
  };

  LatticeState ref0 = restrict_to(v0, n_ref);
  LatticeTrajectory ref = lattice_strang(ref0, nu, sigma, tau, steps, order_k);

  TruncationStudy study;
  std::vector<int> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  for (int n : sorted) {
    LatticeState vn = restrict_to(v0, n);
    LatticeTrajectory run = lattice_strang(vn, nu, sigma, tau, steps, order_k);
    // L2 distance on I_{n-1}.
    std::vector<int> k(v0.dim());
    double err = 0.0;
    LatticeState inner(n - 1, v0.dim());
    for (std::size_t i = 0; i < inner.size(); ++i) {
      inner.site(i, k);
      err += std::norm(run.final[run.final.flatten(k)] - ref.final[ref.final.flatten(k)]);
    }
    study.radii.push_back(n);
    study.errors.push_back(std::sqrt(err));
  }
  study.monotone = true;
  for (std::size_t i = 1; i < study.errors.size(); ++i) {
    study.monotone = study.monotone && study.errors[i] <= study.errors[i - 1] + 1e-14;
  }
  // Slope of log err against log <n> over the strictly positive entries.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < study.errors.size(); ++i) {
    if (study.errors[i] <= 1e-14) continue;
    const double lx = std::log(std::sqrt(1.0 + static_cast<double>(study.radii[i]) * study.radii[i]));
    const double ly = std::log(study.errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 2) study.decay_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return study;
}

}  // namespace epsolve::lattice
