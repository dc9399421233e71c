#include "epsolve/grid.hpp"

#include <cmath>
#include <string>

namespace epsolve {

namespace {

std::size_t checked_total(int extent, int dim) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) {
    total *= static_cast<std::size_t>(extent);
    if (total > (std::size_t{1} << 34)) {
      throw std::invalid_argument("grid too large: extent " + std::to_string(extent) +
                                  "^" + std::to_string(dim));
    }
  }
  return total;
}

}  // namespace

GridFunction::GridFunction(double box_radius, int cells_per_unit, int dim)
    : radius_(box_radius), m_(cells_per_unit), dim_(dim) {
  if (box_radius <= 0 || cells_per_unit <= 0 || dim <= 0) {
    throw std::invalid_argument("GridFunction: R, m, d must be positive");
  }
  const double rm = box_radius * cells_per_unit;
  if (std::abs(rm - std::round(rm)) > 1e-9) {
    throw std::invalid_argument("GridFunction: R*m must be integral");
  }
  extent_ = static_cast<int>(std::llround(2.0 * rm));
  values_.assign(checked_total(extent_, dim_), cplx{0.0, 0.0});
}

void GridFunction::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % extent_);
    flat /= extent_;
  }
}

std::size_t GridFunction::flatten(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    flat = flat * extent_ + static_cast<std::size_t>(idx[a]);
  }
  return flat;
}

void GridFunction::midpoint(std::size_t flat, std::span<double> x) const {
  for (int a = dim_ - 1; a >= 0; --a) {
    x[a] = axis_midpoint(static_cast<int>(flat % extent_));
    flat /= extent_;
  }
}

cplx GridFunction::at_or_zero(std::span<const int> idx) const {
  for (int a = 0; a < dim_; ++a) {
    if (idx[a] < 0 || idx[a] >= extent_) return {0.0, 0.0};
  }
  return values_[flatten(idx)];
}

double grid_l2_norm(const GridFunction& f) {
  double s = 0.0;
  for (const cplx& v : f.values()) s += std::norm(v);
  return std::sqrt(s) * std::pow(f.h(), 0.5 * f.dim());
}

double grid_l2_distance(const GridFunction& f, const GridFunction& g) {
  if (!f.same_grid(g)) throw std::invalid_argument("grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f[i] - g[i]);
  return std::sqrt(s) * std::pow(f.h(), 0.5 * f.dim());
}

double weighted_tail_norm(const GridFunction& f, double eta, double r0) {
  if (eta < 0) throw std::invalid_argument("weighted_tail_norm: eta < 0");
  if (r0 <= 0 || r0 >= f.box_radius()) {
    throw std::domain_error("weighted_tail_norm: need 0 < r0 < box radius");
  }
  std::vector<double> x(f.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.midpoint(i, x);
    double sup = 0.0;
    for (double c : x) sup = std::max(sup, std::abs(c));
    if (sup > r0) s += std::norm(f[i]);
  }
  return std::sqrt(s) * std::pow(f.h(), 0.5 * f.dim());
}

GridFunction grid_map(const GridFunction& f, const std::function<cplx(cplx)>& fn) {
  GridFunction out(f.box_radius(), f.cells_per_unit(), f.dim());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

GridFunction grid_binary(const GridFunction& f, const GridFunction& g,
                         const std::function<cplx(cplx, cplx)>& fn) {
  if (!f.same_grid(g)) throw std::invalid_argument("grid mismatch");
  GridFunction out(f.box_radius(), f.cells_per_unit(), f.dim());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i], g[i]);
  return out;
}

cplx quantize(cplx v, int precision_exponent) {
  if (precision_exponent >= kMaxPrecisionExponent) return v;
  const double scale = std::ldexp(1.0, precision_exponent);
  return {std::round(v.real() * scale) / scale, std::round(v.imag() * scale) / scale};
}

}  // namespace epsolve
