#include <doctest.h>

#include <cmath>

#include "rmg/diagnostics.hpp"
#include "rmg/ensemble.hpp"

using namespace rmg;

TEST_CASE("edge report") {
  const EntryLaw c = law::Constant{{1.0, 0.0}};
  const EdgeReport r = edge_report(sample_generator(c, 10, 1.0, 1), law_stats(c, 10));
  CHECK(r.max_abs_re_centered == 0.0);
  CHECK(r.max_abs_im_centered == 0.0);
  CHECK(r.within(EdgeSlack{}));

  const EntryLaw se = law::ShiftedExponential{1.0, -1.0};
  CHECK_THROWS_AS(edge_report(sample_generator(se, 10, 1.0, 1), law_stats(se, 10)), ConfigError);

  const EntryLaw e = law::ShiftedExponential{1.0, 0.0};
  const EdgeReport s = edge_report(sample_generator(e, 300, 1.0, 5), law_stats(e, 300));
  CHECK(s.envelope_re == doctest::Approx(std::sqrt(2.0 * 300 * std::log(300.0))));
  CHECK(s.envelope_im == doctest::Approx(2.0 * std::sqrt(300.0)));
  CHECK(s.margin_re > 0.0);
}

TEST_CASE("spectral gap") {
  const EntryLaw c = law::Constant{{1.0, 0.0}};
  CHECK(spectral_gap(sample_generator(c, 10, 1.0, 1)).kappa == doctest::Approx(10.0));

  CMatrix X = CMatrix::Zero(4, 4);
  X(0, 1) = X(1, 0) = 1.0;
  X(2, 3) = X(3, 2) = 2.0;
  const GapResult g = spectral_gap(generator_from_matrix(X));
  CHECK(g.reducible_suspect);
  CHECK(g.zero_count == 2);

  const EntryLaw e = law::ShiftedExponential{1.0, 0.0};
  int ok = 0;
  const double n = 1000;
  for (int r = 0; r < 20; ++r) {
    const GapResult gr = spectral_gap(sample_generator(e, 1000, 1.0, 100 + r));
    ok += gr.kappa >= n - std::sqrt(2.0 * n * std::log(n)) * 1.1;
  }
  CHECK(ok >= 19);
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible(sample_generator(law::ShiftedExponential{1.0, 0.0}, 20, 1.0, 1).L));
  CMatrix X = CMatrix::Zero(4, 4);
  X(0, 1) = X(1, 0) = X(2, 3) = X(3, 2) = 1.0;
  CHECK_FALSE(is_irreducible(generator_from_matrix(X).L));

  const std::size_t n = 500;
  const EntryLaw sparse = law::Bernoulli{ProbSchedule::log_power(3.0, 1.0)};
  int connected = 0;
  for (int r = 0; r < 100; ++r) connected += is_irreducible(sample_generator(sparse, n, 1.0, r).L);
  CHECK(connected >= 95);
}

TEST_CASE("invariant measure") {
  const EntryLaw c = law::Constant{{2.0, 0.0}};
  const auto s = sample_generator(c, 7, 1.0, 1);
  for (double p : invariant_measure(s.L)) CHECK(p == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
  const PerturbativeResult pr = invariant_perturbative(s, law_stats(c, 7));
  CHECK(tv_uniform(pr.pi_hat) < 1e-15);
  CHECK(pr.gap < 1e-15);

  CMatrix X = CMatrix::Zero(2, 2);
  X(0, 1) = 1.0;  // rate a: 0 -> 1
  X(1, 0) = 3.0;  // rate b: 1 -> 0
  const auto pi = invariant_measure(generator_from_matrix(X).L);
  CHECK(pi[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(0.25).epsilon(1e-12));

  const EntryLaw e = law::ShiftedExponential{1.0, 0.0};
  const auto t = sample_generator(e, 500, 1.0, 9);
  CHECK(invariant_perturbative(t, law_stats(e, 500)).gap <= 1e-10);
}

TEST_CASE("total variation to uniform") {
  CHECK(tv_uniform({0.25, 0.25, 0.25, 0.25}) == 0.0);
  CHECK(tv_uniform({1.0, 0.0, 0.0, 0.0}) == doctest::Approx(0.75));
  CHECK(tv_uniform({0.5, 0.5, 0.0, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("smallest singular values") {
  const EntryLaw se = law::ShiftedExponential{1.0, -1.0};
  const SmallSvReport at0 = small_sv_report(se, 60, 0.0, 3, 1);
  for (double s : at0.sn) CHECK(s == 0.0);
  CHECK(at0.frac_quasi == 0.0);

  const SmallSvReport r = small_sv_report(se, 200, {1.0, 1.0}, 5, 2);
  CHECK(r.frac_quasi == 1.0);
  CHECK(r.frac_moderate >= 0.99);
}

TEST_CASE("concentration function") {
  const std::vector<cplx> ones{1.0, 1.0};
  const auto rad = concentration_fn(ones, law::Rademacher{}, 0.1, 40000, 4.0, 3);
  CHECK(rad.value == doctest::Approx(0.5).epsilon(0.03));
  const auto exact = concentration_fn(ones, law::Rademacher{}, 0.0, 40000, 4.0, 3);
  CHECK(exact.value == doctest::Approx(0.5).epsilon(0.03));

  std::vector<cplx> x(30);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = {std::cos(0.3 * k), std::sin(0.7 * k)};
  const EntryLaw l = law::ShiftedExponential{1.0, -1.0};
  for (double gamma : {0.5, 2.0, 4.0}) {
    std::vector<cplx> gx(x);
    for (auto& v : gx) v *= gamma;
    CHECK(concentration_fn(gx, l, gamma * 0.5, 5000, 4.0, 17).value ==
          concentration_fn(x, l, 0.5, 5000, 4.0, 17).value);
  }
}

TEST_CASE("compressible vectors") {
  std::vector<cplx> x(100, 0.0);
  x[3] = 1.0;
  CHECK(dist_to_sparse(x, 0.05) == 0.0);
  CHECK(is_compressible(x, 0.05, 0.1));
  const std::vector<cplx> flat(100, 0.1);
  CHECK(dist_to_sparse(flat, 0.1) == doctest::Approx(std::sqrt(90.0) * 0.1));
  CHECK_FALSE(is_compressible(flat, 0.1, 0.5));
}
