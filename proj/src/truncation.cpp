#include "epsolve/truncation.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace epsolve::truncation {

namespace {

double tail_lhs(double c1, double eta, double r) { return c1 * std::pow(r, -eta); }

double flux_lhs(double c1, double c_t, double d1, double r) {
  return d1 * 2.0 * c_t * c1 * c1 / r + c_t * c1 / (r * r);
}

constexpr int kStepTable = 8192;

struct StepTable {
  std::array<double, kStepTable + 1> cumulative{};
  double total = 0.0;
};

double bump_profile(double s) {
  const double d = s * s - 1.0;
  return d < 0.0 ? std::exp(1.0 + 1.0 / d) : 0.0;
}

const StepTable& step_table() {
  static StepTable table = [] {
    StepTable t;
    // Composite Simpson cumulative of the bump over [-1, 1].
    const double a = -1.0, b = 1.0;
    const double dx = (b - a) / kStepTable;
    t.cumulative[0] = 0.0;
    for (int i = 1; i <= kStepTable; ++i) {
      const double x0 = a + (i - 1) * dx;
      const double x1 = x0 + dx;
      const double xm = 0.5 * (x0 + x1);
      t.cumulative[i] = t.cumulative[i - 1] +
                        dx / 6.0 * (bump_profile(x0) + 4.0 * bump_profile(xm) + bump_profile(x1));
    }
    t.total = t.cumulative[kStepTable];
    return t;
  }();
  return table;
}

}  // namespace

RadiusCertificate choose_radius(double c1, double c_t, double d1, double eps_share,
                                RadiusRule rule, double eta) {
  if (c1 <= 0 || c_t <= 0 || d1 <= 0 || eps_share <= 0 || eta <= 0) {
    throw std::invalid_argument("choose_radius: all constants must be positive");
  }
  RadiusCertificate cert;
  cert.epsilon_share = eps_share;
  cert.rule = rule;
  cert.c1 = c1;
  cert.c_t = c_t;
  cert.d1 = d1;
  cert.eta = eta;
  double r = 1.0;
  for (int k = 0; k < 128; ++k) {
    const double lhs = rule == RadiusRule::TailOnly ? tail_lhs(c1, eta, r)
                                                    : flux_lhs(c1, c_t, d1, r);
    if (lhs <= eps_share) {
      cert.radius = r;
      cert.lhs = lhs;
      return cert;
    }
    r *= 2.0;
  }
  throw std::runtime_error("choose_radius: no dyadic radius up to 2^127 satisfied the rule");
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const StepTable& t = step_table();
  const double s = -1.0 + 2.0 * u;  // map [0,1] -> [-1,1]
  const double pos = (s + 1.0) / 2.0 * kStepTable;
  const int i = static_cast<int>(pos);
  // Table value plus a local Simpson correction on the partial interval.
  const double x0 = -1.0 + 2.0 * i / kStepTable;
  const double x1 = s;
  const double xm = 0.5 * (x0 + x1);
  const double partial =
      (x1 - x0) / 6.0 * (bump_profile(x0) + 4.0 * bump_profile(xm) + bump_profile(x1));
  return (t.cumulative[i] + partial) / t.total;
}

double CutoffSpec::operator()(std::span<const double> x) const {
  double v = 1.0;
  if (kind == Kind::GammaR) {
    for (double c : x) {
      v *= smooth_step((radius - std::abs(c)) / transition_width);
    }
  } else {
    for (const auto& center : centers) {
      double sup = 0.0;
      for (int a = 0; a < dim; ++a) sup = std::max(sup, std::abs(x[a] - center[a]));
      v *= smooth_step((sup - radius) / radius);
    }
  }
  return v;
}

std::vector<double> step_derivative_bounds(int max_order) {
  // Central differences of smooth_step on a dense grid; inflated by 2x.
  const int n = 100001;
  const double dh = 1.0 / (n - 1);
  std::vector<double> cur(n), next(n), bounds;
  for (int i = 0; i < n; ++i) cur[i] = smooth_step(i * dh);
  for (int order = 1; order <= max_order; ++order) {
    double sup = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      next[i] = (cur[i + 1] - cur[i - 1]) / (2.0 * dh);
      sup = std::max(sup, std::abs(next[i]));
    }
    next[0] = next[1];
    next[n - 1] = next[n - 2];
    bounds.push_back(2.0 * sup);
    std::swap(cur, next);
  }
  return bounds;
}

ExcisionResult excise_singularities(const PotentialModel& pot, double eps_share,
                                    double box_radius, int dim, int smoothness_order) {
  if (!pot.w_sing) throw std::invalid_argument("excise_singularities: no singular part");
  const auto& sing = *pot.w_sing;

  ExcisionResult result;
  for (const auto& xj : sing.singularities) {
    bool inside = true;
    for (int a = 0; a < dim; ++a) inside = inside && std::abs(xj[a]) <= box_radius;
    if (inside) result.excised.push_back(xj);
  }

  if (result.excised.empty()) {
    result.sampler = sing.sampler;
    result.delta = 0.0;
    result.zeta = CutoffSpec{CutoffSpec::Kind::Zeta, 0.0, 0.0, {}, dim};
    result.w_k_inf_bound = 0.0;
    return result;
  }

  auto [delta, k_bound] = sing.blowup_control(eps_share / 2.0, box_radius);
  if (delta <= 0.0) {
    throw std::invalid_argument("excise_singularities: blowup control returned delta <= 0");
  }
  result.delta = delta;
  result.zeta = CutoffSpec{CutoffSpec::Kind::Zeta, delta, delta, result.excised, dim};

  auto bounds = step_derivative_bounds(smoothness_order);
  double deriv = 1.0;
  for (int q = 1; q <= smoothness_order; ++q) {
    deriv = std::max(deriv, bounds[q - 1] / std::pow(delta, q));
  }
  result.w_k_inf_bound = k_bound * deriv * static_cast<double>(result.excised.size() + 1);

  CutoffSpec zeta = result.zeta;
  Sampler base = sing.sampler;
  result.sampler = [zeta, base](std::span<const double> x, int prec) -> cplx {
    const double z = zeta(x);
    if (z == 0.0) return {0.0, 0.0};
    return z * base(x, prec);
  };
  return result;
}

void MollifierSpec::validate(double v_sup) const {
  if (sigma <= 0 || xi <= 0) throw std::invalid_argument("mollifier: sigma, xi > 0");
  const double tail = std::erfc(xi / (std::sqrt(2.0) * sigma)) * v_sup;
  if (tail > sampling_precision) {
    throw std::invalid_argument("mollifier: erfc tail exceeds the declared sampling precision");
  }
}

MollifiedPotential mollify_potential(const Sampler& v, double v_sup,
                                     const MollifierSpec& spec, int dim) {
  spec.validate(v_sup);
  const double sigma = spec.sigma;
  const double xi = spec.xi;
  qmc::HaltonConfig halton = qmc::HaltonConfig::first_primes(dim, spec.n_samples);

  // Precompute the sample offsets in [-xi, xi]^d and Gaussian weights.
  const int n = spec.n_samples;
  std::vector<double> offsets(static_cast<std::size_t>(n) * dim);
  std::vector<double> weights(n);
  const double norml = 1.0 / (std::sqrt(2.0 * M_PI) * sigma);
  for (int k = 1; k <= n; ++k) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const double y = -xi + 2.0 * xi * qmc::radical_inverse(halton.bases[a], k);
      offsets[static_cast<std::size_t>(k - 1) * dim + a] = y;
      w *= norml * std::exp(-y * y / (2.0 * sigma * sigma));
    }
    weights[k - 1] = w * std::pow(2.0 * xi, dim);
  }

  MollifiedPotential out;
  out.tail_bound = dim * v_sup * std::erfc(xi / (std::sqrt(2.0) * sigma));
  out.derivative_bound = v_sup * std::sqrt(2.0 / M_PI) / sigma;
  out.sampler = [v, offsets, weights, n, dim](std::span<const double> x, int prec) -> cplx {
    std::vector<double> y(dim);
    cplx acc{};
    for (int k = 0; k < n; ++k) {
      for (int a = 0; a < dim; ++a) {
        y[a] = x[a] - offsets[static_cast<std::size_t>(k) * dim + a];
      }
      acc += weights[k] * v(y, prec);
    }
    return acc / static_cast<double>(n);
  };
  return out;
}

double hermite_function(int n, double x) {
  // psi_0 = pi^{-1/4} e^{-x^2/2}; psi_{k} = sqrt(2/k) x psi_{k-1}
  //           - sqrt((k-1)/k) psi_{k-2}.  Normalized recurrence keeps values
  // of order one for n up to several hundred.
  double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (n == 0) return p0;
  double p1 = std::sqrt(2.0) * x * p0;
  for (int k = 2; k <= n; ++k) {
    const double p2 = std::sqrt(2.0 / k) * x * p1 - std::sqrt((k - 1.0) / k) * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

HermiteProjection hermite_project(const InitialState& state, double delta,
                                  const HermiteIntegration& integration) {
  if (state.sobolev.cls != SobolevCertificate::Class::SEps) {
    throw std::invalid_argument("hermite_project: state must declare an S^eps certificate");
  }
  const double c = state.sobolev.bound;
  const double eps = state.sobolev.eps;
  if (delta <= 0) throw std::invalid_argument("hermite_project: delta > 0 required");

  HermiteProjection proj;
  proj.delta = delta;
  int k = 0;
  while (c * c / std::pow(2.0 * k + 1.0, 2.0 * eps) > delta * delta) {
    ++k;
    if (k > 100000) throw std::runtime_error("hermite_project: K exceeds 1e5");
  }
  proj.k = std::max(k, 1);

  double box = integration.box_radius;
  if (box <= 0.0) box = std::ceil(std::sqrt(2.0 * (2.0 * proj.k + 1.0))) + 4.0;

  // Per-cell Halton means of conj(psi_n) * phi0 over the box, summed times h.
  qmc::HaltonConfig halton = qmc::HaltonConfig::first_primes(1, integration.n_samples);
  const int m = integration.cells_per_unit;
  const int cells = static_cast<int>(std::llround(2.0 * box * m));
  const double h = 1.0 / m;
  std::vector<double> nodes(integration.n_samples);
  for (int s = 1; s <= integration.n_samples; ++s) {
    nodes[s - 1] = qmc::radical_inverse(2, s);
  }

  proj.coefficients.assign(proj.k, cplx{});
  std::vector<double> x(1);
  for (int cell = 0; cell < cells; ++cell) {
    const double lo = -box + cell * h;
    for (int s = 0; s < integration.n_samples; ++s) {
      x[0] = lo + h * nodes[s];
      const cplx phi = state.sampler(x, kMaxPrecisionExponent);
      if (phi == cplx{}) continue;
      for (int n = 0; n < proj.k; ++n) {
        proj.coefficients[n] += hermite_function(n, x[0]) * phi;
      }
    }
  }
  const double scale = h / integration.n_samples;
  double s2 = 0.0;
  for (int n = 0; n < proj.k; ++n) {
    proj.coefficients[n] *= scale;
    const double lambda = 2.0 * n + 1.0;
    s2 += lambda * lambda * std::norm(proj.coefficients[n]);
  }
  proj.h44_bound = integration.d4 * std::sqrt(s2);

  std::vector<cplx> coeffs = proj.coefficients;
  proj.sampler = [coeffs](std::span<const double> x, int) -> cplx {
    cplx acc{};
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
      acc += coeffs[n] * hermite_function(static_cast<int>(n), x[0]);
    }
    return acc;
  };
  return proj;
}

double tv_product_bound(double sup_f, double tv_f, double sup_g, double tv_g, int dim) {
  if (sup_f < 0 || tv_f < 0 || sup_g < 0 || tv_g < 0) {
    throw std::invalid_argument("tv_product_bound: inputs must be non-negative");
  }
  const double lambda = std::pow(3.0, dim) - 2.0 * std::pow(2.0, dim) + 2.0;
  return sup_f * sup_g + lambda * lambda * tv_f * tv_g +
         lambda * (tv_f * sup_g + tv_g * sup_f);
}

}  // namespace epsolve::truncation
