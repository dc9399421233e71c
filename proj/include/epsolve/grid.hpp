#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace epsolve {

using cplx = std::complex<double>;

/// Point sampler contract: evaluates a function at a point x to precision
/// 2^-M (M <= 52; with IEEE doubles the quantization grid is 2^-M).
/// Samplers must be deterministic: same (x, M) -> same value.
using Sampler = std::function<cplx(std::span<const double>, int)>;

constexpr int kMaxPrecisionExponent = 52;

/// Complex-valued function that is constant on each cell of a uniform cube
/// lattice over the box [-R, R]^d with grid size h = 1/m.  Cell midpoints sit
/// at -R + (k + 1/2) h per axis; values are flattened lexicographically
/// (last axis fastest).  Immutable after construction apart from value
/// assignment helpers used by the operators that produce new grids.
class GridFunction {
 public:
  GridFunction(double box_radius, int cells_per_unit, int dim);

  double box_radius() const { return radius_; }
  int cells_per_unit() const { return m_; }
  int dim() const { return dim_; }
  double h() const { return 1.0 / m_; }
  /// Cells per axis, 2*R*m.
  int extent() const { return extent_; }
  std::size_t size() const { return values_.size(); }

  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  bool same_grid(const GridFunction& other) const {
    return radius_ == other.radius_ && m_ == other.m_ && dim_ == other.dim_;
  }

  /// Midpoint coordinate of cell index k along one axis.
  double axis_midpoint(int k) const { return -radius_ + (k + 0.5) * h(); }

  /// Multi-index of flat index (last axis fastest).
  void unflatten(std::size_t flat, std::span<int> idx) const;
  std::size_t flatten(std::span<const int> idx) const;
  void midpoint(std::size_t flat, std::span<double> x) const;

  /// Value at multi-index with Dirichlet ghost cells: out-of-box reads are 0.
  cplx at_or_zero(std::span<const int> idx) const;

 private:
  double radius_;
  int m_;
  int dim_;
  int extent_;
  std::vector<cplx> values_;
};

/// Discrete L2 norm h^{d/2} * sqrt(sum |values|^2); exact for cell-constant
/// functions.
double grid_l2_norm(const GridFunction& f);

double grid_l2_distance(const GridFunction& f, const GridFunction& g);

/// L2 norm of f restricted to the complement of the cube of radius r0
/// (a cell belongs to the tail when its midpoint has sup-norm > r0; exact
/// whenever r0 is aligned with cell boundaries).  `eta` names the decay
/// class being verified against C * r0^-eta and does not enter the value.
double weighted_tail_norm(const GridFunction& f, double eta, double r0);

/// Pointwise helpers returning new grids.
GridFunction grid_map(const GridFunction& f, const std::function<cplx(cplx)>& fn);
GridFunction grid_binary(const GridFunction& f, const GridFunction& g,
                         const std::function<cplx(cplx, cplx)>& fn);

/// Quantizes to the 2^-M grid, the numeric realization of an M-approximation.
/// M is capped at 52 (IEEE double); values pass through unchanged at the cap.
cplx quantize(cplx v, int precision_exponent);

}  // namespace epsolve
