#include <doctest.h>

#include <cmath>

#include "rmg/gauss_expect.hpp"

using namespace rmg;

TEST_CASE("Gaussian expectations of polynomials") {
  CHECK(std::abs(expect(gaussian_spec({0, 0, 0}), [](cplx w) { return w; }).value) == 0.0);
  const auto sq = expect(gaussian_spec({1, 0, 0}), [](cplx w) { return w * w; });
  CHECK(sq.value.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(sq.value.imag()) < 1e-14);
  const auto a2 = expect(gaussian_spec({0.5, 0, 0.5}), [](cplx w) { return std::norm(w); });
  CHECK(a2.value.real() == doctest::Approx(1.0).epsilon(1e-12));
  const auto cross = expect(gaussian_spec({0.7, 0.2, 0.3}), [](cplx w) { return w.real() * w.imag(); });
  CHECK(cross.value.real() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("Monte Carlo agrees with quadrature") {
  const GaussianSpec s = gaussian_spec({0.6, -0.1, 0.4});
  const auto h = [](cplx w) { return std::exp(-std::norm(w - cplx(0.3, 0.1))); };
  const auto q = expect(s, h);
  const auto mc = expect(s, h, Accuracy::monte_carlo(400000, 5));
  CHECK(std::abs(q.value - mc.value) < 5.0 * mc.error_estimate + 1e-12);
  CHECK(q.error_estimate < 1e-10);
}

TEST_CASE("gaussian_spec rank and factor") {
  CHECK(gaussian_spec({0, 0, 0}).rank == 0);
  CHECK(gaussian_spec({1, 0, 0}).rank == 1);
  CHECK(gaussian_spec({0.5, 0.5, 0.5}).rank == 1);
  const GaussianSpec s = gaussian_spec({0.7, 0.2, 0.3});
  CHECK(s.rank == 2);
  const Eigen::Matrix2d K = s.factor * s.factor.transpose();
  CHECK(K(0, 0) == doctest::Approx(0.7));
  CHECK(K(0, 1) == doctest::Approx(0.2));
  CHECK(K(1, 1) == doctest::Approx(0.3));
  CHECK_THROWS(gaussian_spec({1, 2, 1}));
}

TEST_CASE("Hermite rule integrates moments") {
  const HermiteRule& r = hermite_rule(20);
  double m0 = 0, m2 = 0, m4 = 0;
  for (std::size_t k = 0; k < r.nodes.size(); ++k) {
    m0 += r.weights[k];
    m2 += r.weights[k] * std::pow(r.nodes[k], 2);
    m4 += r.weights[k] * std::pow(r.nodes[k], 4);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("expect_inv_abs2") {
  CHECK(expect_inv_abs2(gaussian_spec({0, 0, 0}), 2.0) == doctest::Approx(0.25));
  CHECK(std::isinf(expect_inv_abs2(gaussian_spec({0.5, 0, 0.5}), {0.3, 7.0})));
  // scipy oracle (tests/oracles/limit_oracles.py)
  CHECK(expect_inv_abs2(gaussian_spec({1, 0, 0}), {0.0, 2.0}) == doctest::Approx(0.21068461464402727).epsilon(1e-9));
  bool on_line = false;
  CHECK(std::isinf(expect_inv_abs2(gaussian_spec({1, 0, 0}), 0.7, &on_line)));
  CHECK(on_line);
  // Monte Carlo cross-check at 10^7 draws, three significant digits.
  const auto mc = expect(gaussian_spec({1, 0, 0}), [](cplx w) { return 1.0 / std::norm(w - cplx(0, 2)); },
                         Accuracy::monte_carlo(10000000, 77));
  CHECK(mc.value.real() == doctest::Approx(0.2106846).epsilon(1e-3));
}

TEST_CASE("DeltaLaw rule reproduces moments of G - z") {
  for (const CovK& K : {CovK{1, 0, 0}, CovK{0.5, 0.2, 0.5}, CovK{0.25, 0.25, 0.25}}) {
    const GaussianSpec s = gaussian_spec(K);
    const cplx z(0.4, -0.3);
    const DeltaLaw law(s, z);
    double m0 = 0, m1 = 0;
    cplx mom = 0;
    for (const DeltaNode& d : law.rule({})) {
      m0 += d.weight;
      m1 += d.weight * d.abs2;
      mom += d.moment;
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m1 == doctest::Approx(K.trace() + std::norm(z)).epsilon(1e-9));
    CHECK(std::abs(mom + z) < 1e-9);
  }
}
