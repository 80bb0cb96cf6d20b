#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rmg/quaternionic.hpp"
#include "rmg/spectra.hpp"

using namespace rmg;

namespace {
CMatrix random_matrix(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix A(n, n);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = {g(rng), g(rng)};
  return A;
}
}  // namespace

TEST_CASE("eigenvalues") {
  auto e = eigenvalues(CMatrix::Identity(3, 3));
  for (const cplx& l : e) CHECK(std::abs(l - 1.0) < 1e-14);

  CMatrix A = CMatrix::Constant(4, 4, 1.0);
  A.diagonal().array() -= 4.0;
  e = eigenvalues(A);
  std::sort(e.begin(), e.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
  CHECK(std::abs(e[0]) < 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(e[k] + 4.0) < 1e-12);

  const CMatrix R = random_matrix(8, 5);
  cplx sum = 0.0;
  for (const cplx& l : eigenvalues(R)) sum += l;
  CHECK(std::abs(sum - R.trace()) < 1e-8);
}

TEST_CASE("singular values") {
  for (double s : singular_values(CMatrix::Identity(5, 5))) CHECK(s == doctest::Approx(1.0));
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = -3.0;
  for (double s : singular_values(D)) CHECK(s == doctest::Approx(3.0));
  for (double s : singular_values(CMatrix::Zero(4, 4), {1.0, 1.0})) CHECK(s == doctest::Approx(std::sqrt(2.0)));
  const auto sv = singular_values(random_matrix(10, 2));
  CHECK(std::is_sorted(sv.rbegin(), sv.rend()));
}

TEST_CASE("hermitization Stieltjes transform") {
  const cplx eta(0.0, 1.0);
  CHECK(std::abs(hermitization_stieltjes(CMatrix::Zero(6, 6), 0.0, eta) - cplx(0.0, 1.0)) < 1e-14);
  for (unsigned seed = 0; seed < 10; ++seed) {
    const CMatrix A = random_matrix(16, seed) / 4.0;
    const cplx z(0.3, -0.2), e(0.1, 0.4);
    const cplx direct = hermitization_stieltjes_direct(A, z, e);
    const cplx via = hermitization_stieltjes_from_sv(singular_values(A, z), e);
    CHECK(std::abs(direct - via) < 1e-9);
  }
}

TEST_CASE("esd_summary") {
  const GridSpec g = GridSpec::square(-1.0, 1.0, 5);
  const std::vector<cplx> point(100, cplx(0.5, 0.0));
  const EsdSummary s = esd_summary(point, g);
  CHECK(s.histogram[g.index(3, 2)] == doctest::Approx(1.0));
  CHECK(s.outside_mass == 0.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.25, 1.25);
  std::vector<cplx> flat(200000);
  for (auto& v : flat) v = {u(rng), u(rng)};
  const EsdSummary f = esd_summary(flat, g);
  for (double m : f.histogram) CHECK(m == doctest::Approx(1.0 / 25.0).epsilon(0.05));
  double kde_mass = 0.0;
  for (double d : f.kde) kde_mass += d;
  CHECK(f.bandwidth_re > 0.0);
  CHECK(kde_mass * 0.25 == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("ks_distance") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(10000);
  for (auto& v : x) v = u(rng);
  std::sort(x.begin(), x.end());
  const auto uniform = [](double s) { return std::clamp(s, 0.0, 1.0); };
  CHECK(ks_distance(x, uniform) <= 0.03);
  const std::vector<double> zeros(50, 0.0);
  CHECK(ks_distance(zeros, [](double s) { return s >= 0.0 ? 1.0 : 0.0; }) == 0.0);
  CHECK(ks_distance(zeros, uniform) == doctest::Approx(1.0));
}
