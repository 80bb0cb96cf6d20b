#include "rmg/ensemble.hpp"

#include <ostream>

#include "rmg/format.hpp"

namespace rmg {

namespace {

// Neumaier summation of one row.
cplx compensated_row_sum(const CMatrix& X, Eigen::Index row) {
  double s_re = 0.0, c_re = 0.0, s_im = 0.0, c_im = 0.0;
  auto add = [](double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  };
  for (Eigen::Index k = 0; k < X.cols(); ++k) {
    add(s_re, c_re, X(row, k).real());
    add(s_im, c_im, X(row, k).imag());
  }
  return {s_re + c_re, s_im + c_im};
}

void fill_generator(GeneratorSample& s) {
  const auto n = static_cast<Eigen::Index>(s.n);
  s.D.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) s.D(i) = compensated_row_sum(s.X, i);
  s.L = s.X;
  s.L.diagonal() -= s.delta * s.D;
}

}  // namespace

GeneratorSample sample_generator(const EntryLaw& law, std::size_t n, double delta,
                                 std::uint64_t seed) {
  if (n < 2) throw ConfigError("sample_generator requires n >= 2");
  const LawStats stats = law_stats(law, n);
  if (stats.degenerate && !std::holds_alternative<law::Constant>(law)) {
    throw ConfigError("degenerate law '" + law_name(law) + "' (zero variance) at n = " +
                      std::to_string(n));
  }
  GeneratorSample s;
  s.n = n;
  s.delta = delta;
  s.seed = seed;
  s.law = law;
  const auto nn = static_cast<Eigen::Index>(n);
  s.X.resize(nn, nn);
  RandomStream rng(seed);
  EntrySampler sampler(law, n);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) s.X(i, j) = sampler(rng);
  }
  fill_generator(s);
  return s;
}

GeneratorSample generator_from_matrix(const CMatrix& X, double delta) {
  if (X.rows() != X.cols() || X.rows() < 2) {
    throw ConfigError("generator_from_matrix requires a square matrix with n >= 2");
  }
  GeneratorSample s;
  s.n = static_cast<std::size_t>(X.rows());
  s.X = X;
  s.delta = delta;
  s.law = law::Constant{};
  fill_generator(s);
  return s;
}

CMatrix rescale(const GeneratorSample& sample, const LawStats& stats) {
  if (stats.degenerate || !(stats.sigma2 > 0.0)) {
    throw ConfigError("rescale: degenerate law (sigma^2 = 0)");
  }
  const double nn = static_cast<double>(sample.n);
  CMatrix M = sample.L;
  M.diagonal().array() += sample.delta * nn * stats.mean;
  M /= std::sqrt(stats.sigma2 * nn);
  return M;
}

Centered center(const GeneratorSample& sample, const LawStats& stats) {
  const double nn = static_cast<double>(sample.n);
  Centered c;
  c.X = sample.X.array() - stats.mean;
  c.D = sample.D.array() - nn * stats.mean;
  c.L = c.X;
  c.L.diagonal() -= sample.delta * c.D;
  return c;
}

void write_matrix_csv(std::ostream& out, const CMatrix& A) {
  out << "row,col,re,im\n";
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out << i << ',' << j << ',' << format_double(A(i, j).real()) << ','
          << format_double(A(i, j).imag()) << '\n';
    }
  }
}

}  // namespace rmg
