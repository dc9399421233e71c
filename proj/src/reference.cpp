#include "epsolve/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace epsolve::reference {

namespace {

/// Composite-Simpson antiderivatives of F and of p_c on [0, t]; step fine
/// enough that the quadrature error is far below solver tolerances.
struct ForcingIntegrals {
  double p_c = 0.0;      // int F
  double x_raw = 0.0;    // int int F
  double theta_raw = 0.0;  // int p_c^2
};

ForcingIntegrals integrate_forcing(const std::function<double(double)>& f, double t) {
  ForcingIntegrals out;
  if (t == 0.0) return out;
  const int n = std::max(64, static_cast<int>(std::ceil(std::abs(t) * 4096)));
  const double dt = t / n;
  double p = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t0 = i * dt;
    const double f0 = f(t0), fm = f(t0 + 0.5 * dt), f1 = f(t0 + dt);
    const double dp = dt / 6.0 * (f0 + 4.0 * fm + f1);
    const double p_mid = p + dt / 6.0 * (f0 + 2.0 * fm);  // midpoint estimate
    out.x_raw += dt / 6.0 * (p + 4.0 * p_mid + (p + dp));
    out.theta_raw += dt / 6.0 * (p * p + 4.0 * p_mid * p_mid + (p + dp) * (p + dp));
    p += dp;
  }
  out.p_c = p;
  return out;
}

}  // namespace

cplx CoherentField::evaluate(double x, double t) const {
  const double mu2 = mu * mu;
  const auto ints = integrate_forcing(forcing, t);
  const cplx a_t = a0 - 2.0 * mu2 * b0 * t;
  const double x_c = 2.0 * mu2 * ints.x_raw;
  const double p_c = ints.p_c;
  const double theta = mu2 * ints.theta_raw;
  const cplx u = x - x_c;
  const cplx phase = -cplx{0.0, 1.0} * (b0 * u * u / (2.0 * a_t)) +
                     cplx{0.0, 1.0} * (p_c * x - theta);
  return std::exp(phase) / std::sqrt(a_t / a0);
}

double CoherentField::density(double x, double t) const { return std::norm(evaluate(x, t)); }

double CoherentField::center(double t) const {
  return 2.0 * mu * mu * integrate_forcing(forcing, t).x_raw;
}

double CoherentField::momentum(double t) const { return integrate_forcing(forcing, t).p_c; }

double QuinticBlowup::soliton(double x) {
  return std::sqrt(std::sqrt(3.0) / std::cosh(2.0 * x));
}

cplx QuinticBlowup::evaluate(double x, double t) const {
  if (t >= t_star) throw std::domain_error("quintic blow-up solution requires t < T*");
  const double lam = t_star / (t_star - t);
  const double phase = x * x / (4.0 * (t - t_star)) + t * t_star / (t_star - t);
  return std::sqrt(lam) * std::exp(cplx{0.0, phase}) * soliton(lam * x);
}

double QuinticBlowup::amplitude(double t) const {
  return std::sqrt(t_star / (t_star - t)) * soliton(0.0);
}

cplx FreeGaussian::evaluate(double x, double t) const {
  CoherentField cf;
  cf.forcing = [](double) { return 0.0; };
  cf.mu = mu;
  return cf.evaluate(x, t);
}

cplx evaluate_reference(const std::string& name, double x, double t) {
  if (name == "coherent-field") {
    CoherentField cf;
    cf.forcing = [](double) { return 50.0; };
    return cf.evaluate(x, t);
  }
  if (name == "quintic-blowup") {
    QuinticBlowup qb;
    return qb.evaluate(x, t);
  }
  if (name == "free-gaussian") {
    FreeGaussian fg;
    return fg.evaluate(x, t);
  }
  throw std::invalid_argument("unknown reference problem '" + name + "'");
}

}  // namespace epsolve::reference
