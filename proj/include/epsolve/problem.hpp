#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epsolve/grid.hpp"

namespace epsolve {

enum class Family { Linear, DefocusingNls, LatticeNls };

struct ProblemSpec {
  Family family = Family::Linear;
  int dimension = 1;
  int sigma = 3;       // nonlinearity power, {3, 5}; ignored for Linear
  int nu = +1;         // lattice NLS sign; continuum NLS forces +1
  double horizon = 1.0;
  double mu = 1.0;     // semiclassical coefficient, -mu^2 Laplacian

  void validate() const;
};

/// Regularity certificate of an initial state: which class the bound C lives
/// in and the epsilon of that class.
struct SobolevCertificate {
  enum class Class { H2PlusEps2, H3PlusEps2, SEps };
  Class cls = Class::H2PlusEps2;
  double bound = 1.0;
  double eps = 0.5;
};

/// Controlled local boundedness and bounded variation: monotone map from box
/// radius to a bound on both sup norm and total variation over [-R, R]^d.
class ClbbvMap {
 public:
  ClbbvMap() = default;
  explicit ClbbvMap(double constant) { table_[1e300] = constant; }
  explicit ClbbvMap(std::map<double, double> table);

  /// Bound valid for radius R: value at the smallest tabulated radius >= R.
  double operator()(double R) const;
  bool empty() const { return table_.empty(); }

 private:
  std::map<double, double> table_;
};

struct InitialState {
  Sampler sampler;
  SobolevCertificate sobolev;
  ClbbvMap clbbv;
};

/// Controlled singularity-blowup map f: (eps, R) -> (delta, K).  Excising
/// delta-cubes around the singularities inside [-R,R]^d costs at most eps in
/// L^p and leaves a remainder with W^{q,inf} bound K.
using BlowupControl = std::function<std::pair<double, double>(double, double)>;

struct SingularPart {
  Sampler sampler;
  std::vector<std::vector<double>> singularities;
  double lp_exponent = 2.0;
  double min_gap = 1.0;  // declared lower bound on pairwise sup-distance
  BlowupControl blowup_control;
};

struct SmoothPart {
  Sampler sampler;
  ClbbvMap smoothness;  // g: R -> W^{k,inf} bound over [-R, R]^d
};

/// Piecewise-linear control on [0, T] given by breakpoints and values.
class ControlFunction {
 public:
  ControlFunction() = default;
  ControlFunction(std::vector<double> breakpoints, std::vector<double> values,
                  double w11_budget);

  double operator()(double t) const;
  double sup() const;
  /// Sum of per-piece W^{1,1} norms of the declared breakpoint data.
  double w11_norm() const;
  double w11_budget() const { return w11_budget_; }
  bool is_zero() const;

  static ControlFunction constant(double value, double horizon);

 private:
  std::vector<double> t_;
  std::vector<double> v_;
  double w11_budget_ = 0.0;
};

struct PotentialModel {
  std::optional<SingularPart> w_sing;
  std::optional<SmoothPart> w_reg;
  std::optional<SmoothPart> v_con;
  ControlFunction u;
  double global_bound = 1.0;  // the C of the assumption route in force
  std::optional<std::function<double(double)>> w_eps_p_control;  // Phi(r)

  bool has_static_part() const { return w_sing.has_value() || w_reg.has_value(); }
  bool has_control() const { return v_con.has_value() && !u.is_zero(); }
  void validate() const;
};

struct NormReport {
  double l2 = 0.0;
  std::map<std::pair<int, int>, double> h_rho_eta;  // discrete surrogates
  double h1h = 0.0;
  double h2h = 0.0;
};

/// Discrete surrogate of the generalized Sobolev norms for
/// rho in {0,..,3}, eta in {0,..,2}; continuum values are not evaluated, and
/// reports carry the surrogate values only.
NormReport norm_report(const GridFunction& f, const std::vector<std::pair<int, int>>& pairs);

}  // namespace epsolve
