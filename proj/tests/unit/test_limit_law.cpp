#include <doctest.h>

#include <cmath>

#include "rmg/limit_law.hpp"

using namespace rmg;

namespace {
const GaussianSpec& zero() {
  static const GaussianSpec s = gaussian_spec({0, 0, 0});
  return s;
}
const GaussianSpec& real_line() {
  static const GaussianSpec s = gaussian_spec({1, 0, 0});
  return s;
}
const GaussianSpec& iso() {
  static const GaussianSpec s = gaussian_spec({0.5, 0, 0.5});
  return s;
}
}  // namespace

TEST_CASE("h on the imaginary axis") {
  CHECK(solve_h(0.0, 1.0, zero()) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-12));
  const double h100 = solve_h(0.0, 100.0, zero());
  CHECK(h100 > 0.0099);
  CHECK(h100 < 0.0101);
  // scipy oracle
  CHECK(solve_h({1, 1}, 0.1, real_line()) == doctest::Approx(0.10271719737966864).epsilon(1e-8));
}

TEST_CASE("fixed point: semicircle and symmetry") {
  for (cplx eta : {cplx(0, 0.5), cplx(0, 1), cplx(0, 2), cplx(1, 1)}) {
    cplx r = std::sqrt(eta * eta - 4.0);
    cplx expect = (-eta + r) / 2.0;
    if (expect.imag() <= 0) expect = (-eta - r) / 2.0;
    CHECK(std::abs(stieltjes_fixed_point(0.0, eta, zero()) - expect) < 1e-9);
  }
  CHECK(std::abs(stieltjes_fixed_point(0.0, {0, 2}, zero()) - cplx(0, std::sqrt(2.0) - 1)) < 1e-12);
  const cplx far = stieltjes_fixed_point(3.0, {0, 1}, zero());
  CHECK(far.imag() > 0);
  CHECK(std::isfinite(far.real()));
  for (const GaussianSpec* s : {&zero(), &real_line(), &iso()}) {
    const cplx v = stieltjes_fixed_point({0.7, 0.4}, {0, 0.3}, *s);
    CHECK(std::abs(v.real()) < 1e-12);
    CHECK(v.imag() > 0);
  }
}

TEST_CASE("nu_z density: quarter circle, mass and second moment") {
  const auto grid = default_s_grid(0.0, zero(), 2001);
  const auto d = nu_z_density(0.0, {1e-4, 1.0}, 1e-3, zero());
  CHECK(d[0] == doctest::Approx(2.0 / kPi).epsilon(0.01));
  CHECK(d[1] == doctest::Approx(std::sqrt(3.0) / kPi).epsilon(0.01));
  for (cplx z : {cplx(0, 0), cplx(1, 0), cplx(1, 1)}) {
    const auto s = default_s_grid(z, real_line(), 2001);
    const auto dz = nu_z_density(z, s, 1e-3, real_line());
    double m0 = 0, m2 = 0;
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double h = s[k] - s[k - 1];
      m0 += 0.5 * h * (dz[k] + dz[k - 1]);
      m2 += 0.5 * h * (dz[k] * s[k] * s[k] + dz[k - 1] * s[k - 1] * s[k - 1]);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m2 == doctest::Approx(1.0 + 1.0 + std::norm(z)).epsilon(0.01));
  }
}

TEST_CASE("support indicator") {
  CHECK_FALSE(support_indicator(2.0, zero()));
  CHECK(support_indicator(0.5, zero()));
  CHECK(support_indicator({3.0, 3.0}, iso()));
  CHECK(support_indicator(5.0, real_line()));
}

TEST_CASE("f and the Brown density") {
  CHECK(solve_f(0.6, zero()) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(solve_f({1.2, 0.3}, zero()) == 0.0);
  for (cplx z : {cplx(0, 0), cplx(0.5, 0.3), cplx(-0.2, 0.85)}) {
    CHECK(brown_density(z, zero()) == doctest::Approx(1.0 / kPi).epsilon(1e-8));
    CHECK(solve_f(z, zero()) == doctest::Approx(std::sqrt(1.0 - std::norm(z))).epsilon(1e-8));
  }
  CHECK(brown_density({1.1, 0.5}, zero()) == 0.0);
  // scipy oracles
  CHECK(solve_f({0, 0.5}, real_line()) == doctest::Approx(0.561418290226703).epsilon(1e-8));
  CHECK(brown_density(0.0, real_line()) == doctest::Approx(0.2283570248611667).epsilon(1e-8));
  CHECK(brown_density({0.5, 0.5}, real_line()) == doctest::Approx(0.2248093083591658).epsilon(1e-8));
  // rotation invariance for K = I/2
  CHECK(brown_density(1.0, iso()) == doctest::Approx(brown_density({0, 1}, iso())).epsilon(1e-8));
  // far from the origin f underflows but log f stays finite
  const FSolution far = solve_f_detailed({9.0, 0.0}, iso());
  CHECK(far.in_support);
  CHECK(std::isfinite(far.log_f));
}

TEST_CASE("log potential") {
  CHECK(log_potential(0.0, zero()) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(log_potential(5.0, zero()) == doctest::Approx(-std::log(5.0)).epsilon(1e-6));
  CHECK(log_potential(0.0, zero()) == doctest::Approx(log_potential_density_route(0.0, zero())).epsilon(0.01));
  // continuity across the unit circle
  double prev = log_potential(0.9, zero());
  for (int k = 1; k <= 20; ++k) {
    const double u = log_potential(0.9 + 0.01 * k, zero());
    CHECK(std::abs(u - prev) < 0.02);
    prev = u;
  }
}

TEST_CASE("Laplacian route, circular law") {
  const GaussianSpec& s = zero();
  const GridSpec g = GridSpec::square(-2.0, 2.0, 81);
  const LaplacianDensity lap = density_via_laplacian(g, s);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(g.node(k)) < 0.9) CHECK(lap.density[k] == doctest::Approx(1.0 / kPi).epsilon(0.02 * kPi));
  }
}

TEST_CASE("Laplacian route agrees with the closed form, K = diag(1,0)") {
  const GridSpec g = GridSpec::square(-4.2, 4.2, 85);
  const LaplacianDensity lap = density_via_laplacian(g, real_line());
  std::vector<double> brown(g.size());
  std::vector<char> support(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    brown[k] = brown_density(g.node(k), real_line());
    support[k] = support_indicator(g.node(k), real_line());
  }
  const RouteComparison cmp = compare_density_routes(lap, brown, support, 4.0);
  CHECK(cmp.max_abs_diff <= 0.05);
  CHECK(cmp.mass == doctest::Approx(1.0).epsilon(0.05));
}
