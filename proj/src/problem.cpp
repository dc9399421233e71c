#include "epsolve/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace epsolve {

void ProblemSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (mu <= 0) throw std::invalid_argument("mu must be positive");
  if (family != Family::Linear && sigma != 3 && sigma != 5) {
    throw std::invalid_argument("sigma must be 3 or 5 for NLS families");
  }
  if (family == Family::DefocusingNls) {
    if (nu != +1) throw std::invalid_argument("continuum NLS requires nu = +1");
    if (dimension != 1) throw std::invalid_argument("continuum NLS requires d = 1");
  }
  if (family == Family::LatticeNls && nu != +1 && nu != -1) {
    throw std::invalid_argument("lattice NLS requires nu in {+1, -1}");
  }
}

ClbbvMap::ClbbvMap(std::map<double, double> table) : table_(std::move(table)) {
  double prev = -1.0;
  for (const auto& [r, k] : table_) {
    if (r <= 0 || k < 0) throw std::invalid_argument("clbbv table entries must be positive");
    if (k < prev) throw std::invalid_argument("clbbv map must be monotone in R");
    prev = k;
  }
}

double ClbbvMap::operator()(double R) const {
  if (table_.empty()) throw std::logic_error("clbbv map is empty");
  auto it = table_.lower_bound(R);
  if (it == table_.end()) {
    throw std::domain_error("clbbv map queried beyond its declared range");
  }
  return it->second;
}

ControlFunction::ControlFunction(std::vector<double> breakpoints,
                                 std::vector<double> values, double w11_budget)
    : t_(std::move(breakpoints)), v_(std::move(values)), w11_budget_(w11_budget) {
  if (t_.size() != v_.size() || t_.size() < 2) {
    throw std::invalid_argument("control: need matching breakpoint/value lists, >= 2 points");
  }
  for (std::size_t i = 1; i < t_.size(); ++i) {
    if (t_[i] <= t_[i - 1]) throw std::invalid_argument("control: breakpoints must increase");
  }
  if (w11_budget_ + 1e-12 < w11_norm()) {
    throw std::invalid_argument("control: declared W^{1,1} budget below the data's norm");
  }
}

double ControlFunction::operator()(double t) const {
  if (t_.empty()) return 0.0;
  if (t <= t_.front()) return v_.front();
  if (t >= t_.back()) return v_.back();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - t_.begin());
  const double w = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
  return (1.0 - w) * v_[i - 1] + w * v_[i];
}

double ControlFunction::sup() const {
  double s = 0.0;
  for (double v : v_) s = std::max(s, std::abs(v));
  return s;
}

double ControlFunction::w11_norm() const {
  double s = 0.0;
  for (std::size_t i = 1; i < t_.size(); ++i) {
    const double dt = t_[i] - t_[i - 1];
    // |u| integrated piecewise-linearly plus |u'| dt = |dv|.
    s += 0.5 * (std::abs(v_[i - 1]) + std::abs(v_[i])) * dt + std::abs(v_[i] - v_[i - 1]);
  }
  return s;
}

bool ControlFunction::is_zero() const {
  for (double v : v_) {
    if (v != 0.0) return false;
  }
  return true;
}

ControlFunction ControlFunction::constant(double value, double horizon) {
  return ControlFunction({0.0, horizon}, {value, value},
                         std::abs(value) * horizon + 1.0);
}

void PotentialModel::validate() const {
  if (w_sing) {
    if (!w_sing->blowup_control) {
      throw std::invalid_argument("singular part requires a blowup control map");
    }
    const auto& xs = w_sing->singularities;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        double gap = 0.0;
        for (std::size_t a = 0; a < xs[i].size(); ++a) {
          gap = std::max(gap, std::abs(xs[i][a] - xs[j][a]));
        }
        if (gap < w_sing->min_gap) {
          throw std::invalid_argument("singularities closer than the declared gap");
        }
      }
    }
  }
}

}  // namespace epsolve
