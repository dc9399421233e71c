#include <doctest.h>

#include <cmath>
#include <random>

#include "epsolve/lattice.hpp"

using namespace epsolve;
using lattice::LatticeState;

namespace {

LatticeState gaussian_lattice(int n, double width, double s = 2.0, double a = 0.0) {
  LatticeState v(n, 1, s, a);
  for (int k = -n; k <= n; ++k) {
    int idx[1] = {k};
    v[v.flatten(idx)] = std::exp(-k * k / (2.0 * width * width));
  }
  return v;
}

}  // namespace

TEST_CASE("lattice laplacian stencil") {
  LatticeState v(4, 1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0;
  auto lap = lattice::lattice_laplacian(v);
  for (int k = -3; k <= 3; ++k) {
    int idx[1] = {k};
    CHECK(std::abs(lap[lap.flatten(idx)]) <= 1e-15);  // interior, constant
  }

  LatticeState spike(4, 1);
  int origin[1] = {0};
  spike[spike.flatten(origin)] = 1.0;
  auto ls = lattice::lattice_laplacian(spike);
  int prev[1] = {-1}, next[1] = {1};
  CHECK(ls[ls.flatten(prev)] == cplx{1.0, 0.0});
  CHECK(ls[ls.flatten(origin)] == cplx{-2.0, 0.0});
  CHECK(ls[ls.flatten(next)] == cplx{1.0, 0.0});
}

TEST_CASE("lattice laplacian is symmetric and bounded by 4d") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int d : {1, 2}) {
    LatticeState f(3, d), g(3, d);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = {dist(rng), dist(rng)};
      g[i] = {dist(rng), dist(rng)};
    }
    auto lf = lattice::lattice_laplacian(f);
    auto lg = lattice::lattice_laplacian(g);
    cplx lhs{}, rhs{};
    for (std::size_t i = 0; i < f.size(); ++i) {
      lhs += std::conj(lf[i]) * g[i];
      rhs += std::conj(f[i]) * lg[i];
    }
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));

    // power iteration for the operator norm
    LatticeState v(3, d);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {dist(rng), dist(rng)};
    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
      auto w = lattice::lattice_laplacian(v);
      lambda = w.l2_norm() / v.l2_norm();
      const double nw = w.l2_norm();
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
    }
    CHECK(lambda <= 4.0 * d + 1e-9);
  }
}

TEST_CASE("choose_lattice_radius examples and monotonicity") {
  CHECK(lattice::choose_lattice_radius(1.0, 4.0, 0.1) == 16);  // <n> >= 10
  int prev = 1 << 26;
  for (double share : {0.4, 0.2, 0.1, 0.05}) {
    const int n = lattice::choose_lattice_radius(1.0, 4.0, share);
    CHECK(n <= prev);
    prev = n;
  }
  CHECK(lattice::choose_lattice_radius(1.0, 8.0, 0.1) <=
        lattice::choose_lattice_radius(1.0, 4.0, 0.1));
}

TEST_CASE("lattice state certificate is checked") {
  auto v = gaussian_lattice(8, 2.0, 2.0, 1e-6);
  CHECK_THROWS_AS(v.check_certificate(), std::invalid_argument);
  auto ok = gaussian_lattice(8, 2.0, 2.0, 100.0);
  CHECK_NOTHROW(ok.check_certificate());
}

TEST_CASE("lattice strang: zero state, single-site phase") {
  LatticeState zero(8, 1);
  auto traj = lattice::lattice_strang(zero, +1, 3, 0.01, 10, 6);
  CHECK(traj.final.l2_norm() == 0.0);
}

TEST_CASE("lattice strang conserves the l2 norm for both signs") {
  for (int nu : {+1, -1}) {
    auto v0 = gaussian_lattice(32, 3.0);
    const double n0 = v0.l2_norm();
    auto traj = lattice::lattice_strang(v0, nu, 3, 0.01, 1000, 8);
    for (double n : traj.l2_norms) {
      CHECK(std::abs(n - n0) / n0 <= 1e-8);
    }
  }
}

TEST_CASE("lattice strang d=2 conserves the l2 norm") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  LatticeState v0(6, 2);
  for (std::size_t i = 0; i < v0.size(); ++i) v0[i] = {dist(rng), dist(rng)};
  const double n0 = v0.l2_norm();
  auto traj = lattice::lattice_strang(v0, +1, 3, 0.02, 50, 8);
  for (double n : traj.l2_norms) {
    CHECK(std::abs(n - n0) / n0 <= 1e-9);
  }
}

TEST_CASE("focusing/defocusing conjugation time-reversal") {
  // Conjugation flips both nu and the direction of time for this scheme:
  // evolving conj(v(T)) with -nu for the same number of steps returns
  // conj(v0) up to solve tolerance.
  auto v0 = gaussian_lattice(16, 2.0);
  for (std::size_t i = 0; i < v0.size(); ++i) {
    v0[i] *= std::exp(cplx{0.0, 0.3 * static_cast<double>(i % 7)});
  }
  auto fwd = lattice::lattice_strang(v0, +1, 3, 0.01, 50, 12);
  LatticeState back(16, 1);
  for (std::size_t i = 0; i < v0.size(); ++i) back[i] = std::conj(fwd.final[i]);
  auto bwd = lattice::lattice_strang(back, -1, 3, 0.01, 50, 12);
  double err = 0.0;
  for (std::size_t i = 0; i < v0.size(); ++i) {
    err = std::max(err, std::abs(bwd.final[i] - std::conj(v0[i])));
  }
  CHECK(err <= 1e-9);
}

TEST_CASE("operation count depends only on the shape parameters") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uint64_t expected = 0;
  for (int trial = 0; trial < 10; ++trial) {
    LatticeState v0(16, 1);
    for (std::size_t i = 0; i < v0.size(); ++i) v0[i] = {dist(rng), dist(rng)};
    auto traj = lattice::lattice_strang(v0, trial % 2 ? +1 : -1, 3, 0.01, 20, 6);
    if (trial == 0) {
      expected = traj.ops.total();
      CHECK(expected > 0);
    } else {
      CHECK(traj.ops.total() == expected);
    }
  }
}

TEST_CASE("truncation study: compact support, monotone errors") {
  // v0 supported in I_4; radii much larger than support plus steps
  LatticeState v0(64, 1, 2.0, 0.0);
  for (int k = -4; k <= 4; ++k) {
    int idx[1] = {k};
    v0[v0.flatten(idx)] = std::exp(-0.5 * k * k);
  }
  auto study = lattice::truncation_study(v0, {8, 16, 32, 64}, +1, 3, 0.01, 40, 8);
  CHECK(study.monotone);
  CHECK(study.errors.back() <= 1e-12);  // the largest radius is the reference

  // gaussian-decay data: decay exponent is reported
  auto wide = gaussian_lattice(64, 6.0, 2.0, 0.0);
  auto study2 = lattice::truncation_study(wide, {8, 16, 32, 64}, +1, 3, 0.01, 40, 8);
  CHECK(study2.monotone);
  CHECK(std::isfinite(study2.decay_exponent));
}
