#include "epsolve/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace epsolve::qmc {

namespace {

long long gcd_ll(long long a, long long b) { return std::gcd(a, b); }

int first_prime_after(int p) {
  auto is_prime = [](int n) {
    if (n < 2) return false;
    for (int q = 2; q * q <= n; ++q) {
      if (n % q == 0) return false;
    }
    return true;
  };
  int n = p + 1;
  while (!is_prime(n)) ++n;
  return n;
}

}  // namespace

void HaltonConfig::validate() const {
  if (bases.empty()) throw std::invalid_argument("halton: need at least one base");
  if (n_samples < 1) throw std::invalid_argument("halton: N >= 1 required");
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (bases[i] < 2) throw std::invalid_argument("halton: bases must be >= 2");
    for (std::size_t j = i + 1; j < bases.size(); ++j) {
      if (gcd_ll(bases[i], bases[j]) != 1) {
        throw std::invalid_argument("halton: bases must be pairwise coprime");
      }
    }
  }
}

HaltonConfig HaltonConfig::first_primes(int d, int n_samples) {
  HaltonConfig cfg;
  cfg.n_samples = n_samples;
  int p = 1;
  for (int i = 0; i < d; ++i) {
    p = first_prime_after(p);
    cfg.bases.push_back(p);
  }
  return cfg;
}

double radical_inverse(int base, long long k) {
  double inv = 1.0 / base;
  double scale = inv;
  double x = 0.0;
  while (k > 0) {
    x += static_cast<double>(k % base) * scale;
    k /= base;
    scale *= inv;
  }
  return x;
}

std::vector<double> halton(const HaltonConfig& config, long long k) {
  if (k < 1) throw std::invalid_argument("halton: index k >= 1");
  std::vector<double> pt(config.bases.size());
  for (std::size_t i = 0; i < config.bases.size(); ++i) {
    pt[i] = radical_inverse(config.bases[i], k);
  }
  return pt;
}

double halton_bound_rhs(std::span<const int> bases, long long n) {
  const double d = static_cast<double>(bases.size());
  double prod = 1.0;
  const double logn = std::log(static_cast<double>(n));
  for (int b : bases) {
    prod *= (b - 1) / (2.0 * std::log(static_cast<double>(b))) * logn + (b + 1) / 2.0;
  }
  return d / n + prod / n;
}

long long c_star(std::span<const int> bases, long long scan_horizon) {
  const int d = static_cast<int>(bases.size());
  double worst = 0.0;
  for (long long n = 2; n <= scan_horizon; ++n) {
    const double logn = std::log(static_cast<double>(n));
    double prod = 1.0;
    for (int b : bases) {
      prod *= (b - 1) / (2.0 * std::log(static_cast<double>(b))) * logn + (b + 1) / 2.0;
    }
    const double ratio = (d + prod) / std::pow(logn, d);
    if (ratio <= worst) break;  // decreasing from here on
    worst = ratio;
  }
  return static_cast<long long>(std::ceil(worst));
}

DiscrepancyCertificate discrepancy_certificate(const HaltonConfig& config) {
  config.validate();
  DiscrepancyCertificate cert;
  cert.n = config.n_samples;
  cert.d = static_cast<int>(config.bases.size());
  cert.c_star = c_star(config.bases);
  const double n = cert.n;
  cert.bound = cert.n >= 2 ? cert.c_star * std::pow(std::log(n), cert.d) / n
                           : halton_bound_rhs(config.bases, 1);
  return cert;
}

namespace {

double brute_1d(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  std::vector<double> cands = xs;
  cands.push_back(1.0);
  for (double b : cands) {
    const auto lt = static_cast<double>(
        std::lower_bound(xs.begin(), xs.end(), b) - xs.begin());
    const auto le = static_cast<double>(
        std::upper_bound(xs.begin(), xs.end(), b) - xs.begin());
    worst = std::max({worst, std::abs(lt / n - b), std::abs(le / n - b)});
  }
  return worst;
}

double brute_2d(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pts[i][1];
  std::sort(ys.begin(), ys.end());
  std::vector<double> ycand = ys;
  ycand.push_back(1.0);

  std::vector<double> xcand;
  for (std::size_t i = 0; i < n; ++i) xcand.push_back(pts[order[i]][0]);
  xcand.push_back(1.0);
  xcand.erase(std::unique(xcand.begin(), xcand.end()), xcand.end());

  auto yrank = [&](double y) {
    return static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), y) - ys.begin());
  };

  // counts[r] = points currently admitted with y-rank r; prefix sums give the
  // box count for every y-candidate.  Points are admitted in x order, so each
  // x-candidate is handled with both the strict and the closed x-count.
  std::vector<int> counts(n + 1, 0);
  std::vector<int> prefix(n + 2, 0);
  double worst = 0.0;
  std::size_t admitted = 0;

  auto scan = [&](double b1) {
    prefix[0] = 0;
    for (std::size_t r = 0; r <= n; ++r) prefix[r + 1] = prefix[r] + counts[r];
    const double dn = static_cast<double>(n);
    for (double b2 : ycand) {
      const std::size_t r = yrank(b2);
      std::size_t lt = static_cast<std::size_t>(prefix[r]);
      // points with y == b2 among admitted:
      std::size_t eq = 0;
      for (std::size_t rr = r; rr < n && ys[rr] == b2; ++rr) {
        eq += static_cast<std::size_t>(counts[rr]);
      }
      const double vol = b1 * b2;
      worst = std::max({worst, std::abs(lt / dn - vol),
                        std::abs((lt + eq) / dn - vol)});
    }
  };

  for (double b1 : xcand) {
    // strict count: admit all points with x < b1.
    while (admitted < n && pts[order[admitted]][0] < b1) {
      counts[yrank(pts[order[admitted]][1])]++;
      ++admitted;
    }
    scan(b1);
    // closed count: also admit x == b1.
    std::size_t save = admitted;
    while (admitted < n && pts[order[admitted]][0] == b1) {
      counts[yrank(pts[order[admitted]][1])]++;
      ++admitted;
    }
    if (admitted != save) scan(b1);
  }
  return worst;
}

}  // namespace

double star_discrepancy_brute(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw std::invalid_argument("star discrepancy: empty point set");
  const std::size_t d = points[0].size();
  if (d > 2 || points.size() > 4096) {
    throw std::invalid_argument("star discrepancy oracle limited to d <= 2, N <= 4096");
  }
  if (d == 1) {
    std::vector<double> xs(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) xs[i] = points[i][0];
    return brute_1d(std::move(xs));
  }
  return brute_2d(points);
}

GridFunction cubic_discretize(const Sampler& f, double box_radius, int cells_per_unit,
                              int dim, const HaltonConfig& halton_cfg,
                              int precision_exponent, int threads) {
  halton_cfg.validate();
  if (static_cast<int>(halton_cfg.bases.size()) != dim) {
    throw std::invalid_argument("cubic_discretize: halton dimension mismatch");
  }
  const int precision = std::min(precision_exponent, kMaxPrecisionExponent);
  GridFunction out(box_radius, cells_per_unit, dim);

  const int n_samples = halton_cfg.n_samples;
  std::vector<double> pts(static_cast<std::size_t>(n_samples) * dim);
  for (int k = 1; k <= n_samples; ++k) {
    for (int a = 0; a < dim; ++a) {
      pts[static_cast<std::size_t>(k - 1) * dim + a] =
          radical_inverse(halton_cfg.bases[a], k);
    }
  }

  const double h = out.h();
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> lo(dim), x(dim);
    for (std::size_t cell = begin; cell < end; ++cell) {
      out.midpoint(cell, lo);
      for (int a = 0; a < dim; ++a) lo[a] -= 0.5 * h;
      cplx acc{0.0, 0.0};
      for (int k = 0; k < n_samples; ++k) {
        for (int a = 0; a < dim; ++a) {
          x[a] = lo[a] + h * pts[static_cast<std::size_t>(k) * dim + a];
        }
        cplx v = quantize(f(x, precision), precision);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
          throw std::runtime_error("cubic_discretize: sampler returned non-finite value at cell " +
                                   std::to_string(cell) + ", sample " + std::to_string(k + 1));
        }
        acc += v;
      }
      out[cell] = acc / static_cast<double>(n_samples);
    }
  };

  int n_threads = threads;
  if (n_threads <= 0) {
    if (const char* env = std::getenv("EPSOLVE_THREADS")) n_threads = std::atoi(env);
  }
  if (n_threads <= 1 || out.size() < 1024) {
    work(0, out.size());
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    const std::size_t chunk = (out.size() + n_threads - 1) / n_threads;
    for (int ti = 0; ti < n_threads; ++ti) {
      const std::size_t b = std::min(out.size(), ti * chunk);
      const std::size_t e = std::min(out.size(), b + chunk);
      if (b >= e) break;
      pool.emplace_back([&, b, e] {
        try {
          work(b, e);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return out;
}

KhBound kh_error_bound(std::span<const double> tv_per_cell,
                       const DiscrepancyCertificate& cert, int precision_exponent,
                       int n_samples, std::size_t cell_count) {
  double max_tv = 0.0, sumsq = 0.0;
  for (double tv : tv_per_cell) {
    if (!(tv >= 0.0) || !std::isfinite(tv)) {
      throw std::invalid_argument("kh_error_bound: TV values must be finite and >= 0");
    }
    max_tv = std::max(max_tv, tv);
    sumsq += tv * tv;
  }
  const double m_term =
      n_samples * std::ldexp(1.0, -std::min(precision_exponent, kMaxPrecisionExponent));
  KhBound b;
  b.linf = max_tv * cert.bound + m_term;
  b.l2 = std::sqrt(sumsq) * cert.bound + m_term * static_cast<double>(cell_count);
  return b;
}

double tv_estimate_on_cell(const Sampler& f, std::span<const double> cell_lo, double h,
                           int dim, int samples_per_axis) {
  if (dim > 2) throw std::invalid_argument("tv estimate implemented for d <= 2");
  const int n = samples_per_axis;
  std::vector<double> x(dim);
  auto at = [&](int i, int j) {
    x[0] = cell_lo[0] + h * i / (n - 1);
    if (dim == 2) x[1] = cell_lo[1] + h * j / (n - 1);
    return f(x, kMaxPrecisionExponent);
  };
  double tv = 0.0;
  if (dim == 1) {
    cplx prev = at(0, 0);
    for (int i = 1; i < n; ++i) {
      cplx v = at(i, 0);
      tv += std::abs(v - prev);
      prev = v;
    }
  } else {
    // Vitali variation plus the two edge variations (Hardy-Krause form).
    std::vector<cplx> row(n), prev_row(n);
    for (int j = 0; j < n; ++j) prev_row[j] = at(0, j);
    for (int j = 1; j < n; ++j) tv += std::abs(prev_row[j] - prev_row[j - 1]);
    for (int i = 1; i < n; ++i) {
      for (int j = 0; j < n; ++j) row[j] = at(i, j);
      tv += std::abs(row[0] - prev_row[0]);
      for (int j = 1; j < n; ++j) {
        tv += std::abs(row[j] - row[j - 1] - prev_row[j] + prev_row[j - 1]);
      }
      std::swap(row, prev_row);
    }
  }
  return 2.0 * tv;
}

}  // namespace epsolve::qmc
