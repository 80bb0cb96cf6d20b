#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "rmg/common.hpp"
#include "rmg/rng.hpp"

namespace rmg {

// Covariance of (Re x, Im x). When produced by `law_stats` it is normalized
// by the variance and has unit trace.
struct CovK {
  double k11 = 0.0;
  double k12 = 0.0;
  double k22 = 0.0;

  double trace() const noexcept { return k11 + k22; }
  double det() const noexcept { return k11 * k22 - k12 * k12; }
  bool is_psd(double tol = 1e-12) const noexcept {
    return k11 >= -tol && k22 >= -tol && det() >= -tol;
  }
  CovK scaled(double s) const noexcept { return {k11 * s, k12 * s, k22 * s}; }
  bool operator==(const CovK&) const = default;
};

// Edge probability as a function of n: either constant, or
// min(1, coef * (log n)^power / n).
struct ProbSchedule {
  enum class Kind { Constant, LogPower };
  Kind kind = Kind::Constant;
  double value = 0.5;
  double coef = 1.0;
  double power = 1.0;

  static ProbSchedule constant(double p) { return {Kind::Constant, p, 1.0, 1.0}; }
  static ProbSchedule log_power(double coef, double power) {
    return {Kind::LogPower, 0.0, coef, power};
  }
  double operator()(std::uint64_t n) const;
  bool operator==(const ProbSchedule&) const = default;
};

// Bounded real law for the magnitude factor y in the sparse model x = eps(n) * y.
struct BoundedY {
  enum class Kind { Constant, Uniform, Rademacher };
  Kind kind = Kind::Constant;
  double a = 1.0;  // constant value, or lower end of the uniform law
  double b = 1.0;  // upper end of the uniform law

  double mean() const;
  double second_moment() const;
  double diameter() const;
  bool operator==(const BoundedY&) const = default;
};

namespace law {

// Exp(rate) + shift.
struct ShiftedExponential {
  double rate = 1.0;
  double shift = 0.0;
  bool operator==(const ShiftedExponential&) const = default;
};
struct RealGaussian {
  double mean = 0.0;
  double var = 1.0;
  bool operator==(const RealGaussian&) const = default;
};
// Complex Gaussian with absolute covariance (c11, c12, c22) of (Re, Im).
struct ComplexGaussian {
  cplx mean{0.0, 0.0};
  double c11 = 0.5;
  double c12 = 0.0;
  double c22 = 0.5;
  bool operator==(const ComplexGaussian&) const = default;
};
struct Bernoulli {
  ProbSchedule p = ProbSchedule::constant(0.5);
  bool operator==(const Bernoulli&) const = default;
};
struct SparseBernoulliTimesY {
  ProbSchedule p = ProbSchedule::log_power(1.0, 7.0);
  BoundedY y;
  bool operator==(const SparseBernoulliTimesY&) const = default;
};
// Degenerate law; admitted for tests of the trivial generator mJ - mnI.
struct Constant {
  cplx m{1.0, 0.0};
  bool operator==(const Constant&) const = default;
};
struct Rademacher {
  bool operator==(const Rademacher&) const = default;
};

}  // namespace law

using EntryLaw = std::variant<law::ShiftedExponential, law::RealGaussian, law::ComplexGaussian,
                              law::Bernoulli, law::SparseBernoulliTimesY, law::Constant,
                              law::Rademacher>;

struct LawStats {
  cplx mean{0.0, 0.0};
  double sigma2 = 0.0;
  CovK K;
  bool degenerate = false;  // sigma2 == 0; K is then reported as zero

  double sigma() const { return std::sqrt(sigma2); }
};

// Closed-form mean, variance and normalized covariance of the law at size n.
LawStats law_stats(const EntryLaw& law, std::uint64_t n);

// Draws i.i.d. entries of one law at a fixed n. Holds the distribution
// objects so repeated draws do not rebuild them.
class EntrySampler {
 public:
  EntrySampler(const EntryLaw& law, std::uint64_t n);
  cplx operator()(RandomStream& rng);

 private:
  EntryLaw law_;
  double p_ = 0.0;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  Eigen::Matrix2d factor_ = Eigen::Matrix2d::Zero();
};

cplx sample_entry(const EntryLaw& law, std::uint64_t n, RandomStream& rng);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of sigma^-2 E[|x-m|^2 1{|x-m|^2 >= eps n sigma^2}].
MonteCarloEstimate lindeberg_diagnostic(const EntryLaw& law, std::uint64_t n, double eps,
                                        std::size_t trials, RandomStream& rng);

// n sigma^2(n) / (log n)^6, which should grow without bound.
double variance_growth_ratio(const EntryLaw& law, std::uint64_t n);

bool is_real_law(const EntryLaw& law);
// Support contained in [0, inf): the entries define a Markov generator.
bool is_nonnegative_law(const EntryLaw& law);
// Diameter of the support; infinite for unbounded laws.
double support_diameter(const EntryLaw& law);

std::string law_name(const EntryLaw& law);
// Flat key/value description, e.g. {"kind": "shifted_exponential", "rate": "1", ...}.
std::map<std::string, std::string> describe(const EntryLaw& law);
// Inverse of `describe`; throws ConfigError on unknown kinds or keys.
EntryLaw law_from_description(const std::map<std::string, std::string>& desc);

}  // namespace rmg
