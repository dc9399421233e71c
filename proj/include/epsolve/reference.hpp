#pragma once

#include <functional>
#include <numbers>
#include <string>

#include "epsolve/grid.hpp"

namespace epsolve::reference {

/// Coherent state driven by a spatially linear control potential,
///   i psi_t = -mu^2 psi_xx - F(t) x psi.
/// The closed form is the Gaussian
///   psi(x,t) = (A(t)/A0)^{-1/2} exp(-i mu^2 int_0^t p_c^2)
///              exp(-i B0 (x - x_c)^2 / (2 A(t)) + i p_c x)
/// with A(t) = A0 - 2 mu^2 B0 t, p_c = int_0^t F, x_c = 2 mu^2 int int F.
/// At mu^2 = 1/2 this is the textbook form A(t) = A0 - B0 t, x_c = int int F;
/// Im(B0/A0) < 0 is required for a normalizable density.
struct CoherentField {
  std::function<double(double)> forcing;  // F(t)
  cplx a0{1.0, 0.0};
  cplx b0{0.0, -1.0};
  double mu = 1.0 / std::numbers::sqrt2;

  cplx evaluate(double x, double t) const;
  double density(double x, double t) const;
  double center(double t) const;    // x_c(t)
  double momentum(double t) const;  // p_c(t)
};

/// Explicit blow-up family of the focusing quintic NLS
///   i psi_t = -psi_xx - |psi|^4 psi,
///   u(x,t) = (T*/(T*-t))^{1/2} e^{i (x^2/(4(t-T*)) + t T*/(T*-t))}
///            phi(T* x / (T*-t)),   phi(x) = sqrt(3^{1/2} / cosh(2x)),
/// valid for t < T*.
struct QuinticBlowup {
  double t_star = 10.0;

  cplx evaluate(double x, double t) const;  // throws std::domain_error at t >= T*
  double amplitude(double t) const;         // |u(0, t)|
  static double soliton(double x);          // phi
};

/// Free Gaussian evolution i psi_t = -mu^2 psi_xx from e^{-x^2/2}/pi^{1/4}:
/// the CoherentField closed form with F = 0.
struct FreeGaussian {
  double mu = 1.0;
  cplx evaluate(double x, double t) const;
};

/// Named evaluator for the CLI: "coherent-field", "quintic-blowup",
/// "free-gaussian".
cplx evaluate_reference(const std::string& name, double x, double t);

}  // namespace epsolve::reference
