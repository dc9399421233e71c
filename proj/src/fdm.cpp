#include "epsolve/fdm.hpp"

#include <cmath>
#include <stdexcept>

namespace epsolve::fdm {

namespace {

std::size_t axis_stride(const GridFunction& f, int axis) {
  std::size_t s = 1;
  for (int a = f.dim() - 1; a > axis; --a) s *= static_cast<std::size_t>(f.extent());
  return s;
}

GridFunction shift_diff(const GridFunction& f, int axis, int stride_cells, double denom) {
  GridFunction out(f.box_radius(), f.cells_per_unit(), f.dim());
  const std::size_t stride = axis_stride(f, axis);
  const int extent = f.extent();
  const std::size_t size = f.size();
  for (std::size_t i = 0; i < size; ++i) {
    const int k = static_cast<int>((i / stride) % static_cast<std::size_t>(extent));
    const cplx up = (k + stride_cells < extent) ? f[i + stride * stride_cells] : cplx{};
    const cplx dn = (k - stride_cells >= 0) ? f[i - stride * stride_cells] : cplx{};
    out[i] = (up - dn) / denom;
  }
  return out;
}

}  // namespace

GridFunction sym_diff(const GridFunction& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw std::invalid_argument("sym_diff: bad axis");
  return shift_diff(f, axis, 1, 2.0 * f.h());
}

GridFunction laplacian_h(const GridFunction& f) {
  GridFunction out(f.box_radius(), f.cells_per_unit(), f.dim());
  const int extent = f.extent();
  const double denom = 4.0 * f.h() * f.h();
  const std::size_t size = f.size();
  for (int axis = 0; axis < f.dim(); ++axis) {
    const std::size_t stride = axis_stride(f, axis);
    for (std::size_t i = 0; i < size; ++i) {
      const int k = static_cast<int>((i / stride) % static_cast<std::size_t>(extent));
      const cplx up = (k + 2 < extent) ? f[i + 2 * stride] : cplx{};
      const cplx dn = (k - 2 >= 0) ? f[i - 2 * stride] : cplx{};
      out[i] += (up - 2.0 * f[i] + dn) / denom;
    }
  }
  return out;
}

DiscreteSobolev discrete_sobolev_norms(const GridFunction& f) {
  DiscreteSobolev r;
  const double l2 = grid_l2_norm(f);
  double grad_sq = 0.0;
  for (int a = 0; a < f.dim(); ++a) {
    const double g = grid_l2_norm(sym_diff(f, a));
    grad_sq += g * g;
  }
  r.grad_l2 = std::sqrt(grad_sq);
  r.lap_l2 = grid_l2_norm(laplacian_h(f));
  r.h1h = std::sqrt(l2 * l2 + grad_sq);
  r.h2h = std::sqrt(l2 * l2 + r.lap_l2 * r.lap_l2);
  r.summation_by_parts_ok =
      grad_sq <= l2 * r.lap_l2 * (1.0 + 1e-10) + 1e-14;
  return r;
}

NormReport norm_report(const GridFunction& f,
                       const std::vector<std::pair<int, int>>& pairs) {
  NormReport rep;
  rep.l2 = grid_l2_norm(f);
  auto sob = discrete_sobolev_norms(f);
  rep.h1h = sob.h1h;
  rep.h2h = sob.h2h;

  // D^j surrogates of || |grad|^j f ||^2 for j = 0..3.
  double d_j[4] = {rep.l2 * rep.l2, sob.grad_l2 * sob.grad_l2,
                   sob.lap_l2 * sob.lap_l2, 0.0};
  GridFunction lap = laplacian_h(f);
  double d3 = 0.0;
  for (int a = 0; a < f.dim(); ++a) {
    const double g = grid_l2_norm(sym_diff(lap, a));
    d3 += g * g;
  }
  d_j[3] = d3;

  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  std::vector<double> x(f.dim());
  for (auto [rho, eta] : pairs) {
    if (rho < 0 || rho > 3 || eta < 0 || eta > 2) {
      throw std::invalid_argument("norm_report supports rho in 0..3, eta in 0..2");
    }
    double weighted = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      f.midpoint(i, x);
      double r2 = 0.0;
      for (double c : x) r2 += c * c;
      weighted += std::pow(1.0 + r2, eta) * std::norm(f[i]);
    }
    weighted *= std::pow(f.h(), f.dim());
    double fourier = 0.0;
    for (int j = 0; j <= rho; ++j) fourier += binom[rho][j] * d_j[j];
    rep.h_rho_eta[{rho, eta}] = std::sqrt(fourier + weighted);
  }
  return rep;
}

ConvergenceStudy convergence_study(const Sampler& f, const Sampler& dnf, int order,
                                   double box_radius, const std::vector<int>& ms, int dim) {
  if (dim != 1) throw std::invalid_argument("convergence_study implemented for d = 1");
  ConvergenceStudy study;
  // 5-point Gauss-Legendre nodes/weights on [-1/2, 1/2] for exact cell means.
  static const double gx[5] = {-0.453089922969332, -0.269234655052841, 0.0,
                               0.269234655052841, 0.453089922969332};
  static const double gw[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                               0.239314335249683, 0.118463442528095};
  for (int m : ms) {
    GridFunction fq(box_radius, m, 1);
    const double h = fq.h();
    std::vector<double> x(1);
    for (std::size_t i = 0; i < fq.size(); ++i) {
      const double mid = fq.axis_midpoint(static_cast<int>(i));
      cplx acc{};
      for (int g = 0; g < 5; ++g) {
        x[0] = mid + h * gx[g];
        acc += gw[g] * f(x, kMaxPrecisionExponent);
      }
      fq[i] = acc;
    }
    GridFunction d = fq;
    for (int n = 0; n < order; ++n) d = sym_diff(d, 0);
    double err_sq = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      x[0] = d.axis_midpoint(static_cast<int>(i));
      err_sq += std::norm(d[i] - dnf(x, kMaxPrecisionExponent));
    }
    study.hs.push_back(h);
    study.errors.push_back(std::sqrt(err_sq * h));
  }
  // Least-squares slope of log(err) against log(h).
  const std::size_t n = study.hs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(study.hs[i]);
    const double ly = std::log(std::max(study.errors[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return study;
}

}  // namespace epsolve::fdm
