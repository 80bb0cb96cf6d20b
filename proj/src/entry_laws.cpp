#include "rmg/entry_laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>

#include "rmg/format.hpp"

namespace rmg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr CovK kRealAxis{1.0, 0.0, 0.0};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

Eigen::Matrix2d symmetric_sqrt(double c11, double c12, double c22) {
  Eigen::Matrix2d C;
  C << c11, c12, c12, c22;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
  const Eigen::Vector2d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double ProbSchedule::operator()(std::uint64_t n) const {
  double p = value;
  if (kind == Kind::LogPower) {
    const double nn = static_cast<double>(n);
    p = n < 2 ? 0.0 : std::min(1.0, coef * std::pow(std::log(nn), power) / nn);
  }
  require(p >= 0.0 && p <= 1.0, "probability schedule out of [0,1]: " + format_double(p));
  return p;
}

double BoundedY::mean() const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return 0.5 * (a + b);
    case Kind::Rademacher: return 0.0;
  }
  return 0.0;
}

double BoundedY::second_moment() const {
  switch (kind) {
    case Kind::Constant: return a * a;
    case Kind::Uniform: return (a * a + a * b + b * b) / 3.0;
    case Kind::Rademacher: return 1.0;
  }
  return 0.0;
}

double BoundedY::diameter() const {
  switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Uniform: return b - a;
    case Kind::Rademacher: return 2.0;
  }
  return 0.0;
}

LawStats law_stats(const EntryLaw& law, std::uint64_t n) {
  require(n >= 1, "law_stats requires n >= 1");
  LawStats s = std::visit(
      overloaded{
          [](const law::ShiftedExponential& l) {
            require(l.rate > 0.0, "shifted_exponential: rate must be positive");
            return LawStats{{1.0 / l.rate + l.shift, 0.0}, 1.0 / (l.rate * l.rate), kRealAxis};
          },
          [](const law::RealGaussian& l) {
            require(l.var >= 0.0, "real_gaussian: variance must be nonnegative");
            return LawStats{{l.mean, 0.0}, l.var, kRealAxis};
          },
          [](const law::ComplexGaussian& l) {
            const CovK c{l.c11, l.c12, l.c22};
            require(c.is_psd(), "complex_gaussian: covariance is not positive semidefinite");
            const double s2 = c.trace();
            return LawStats{l.mean, s2, s2 > 0.0 ? c.scaled(1.0 / s2) : CovK{}};
          },
          [n](const law::Bernoulli& l) {
            const double p = l.p(n);
            return LawStats{{p, 0.0}, p * (1.0 - p), kRealAxis};
          },
          [n](const law::SparseBernoulliTimesY& l) {
            const double p = l.p(n);
            const double ey = l.y.mean();
            return LawStats{{p * ey, 0.0}, p * l.y.second_moment() - p * p * ey * ey, kRealAxis};
          },
          [](const law::Constant& l) { return LawStats{l.m, 0.0, CovK{}}; },
          [](const law::Rademacher&) { return LawStats{{0.0, 0.0}, 1.0, kRealAxis}; },
      },
      law);
  if (!(s.sigma2 > 0.0)) {
    s.sigma2 = 0.0;
    s.K = CovK{};
    s.degenerate = true;
  }
  return s;
}

EntrySampler::EntrySampler(const EntryLaw& law, std::uint64_t n) : law_(law) {
  if (const auto* b = std::get_if<law::Bernoulli>(&law_)) p_ = b->p(n);
  if (const auto* b = std::get_if<law::SparseBernoulliTimesY>(&law_)) p_ = b->p(n);
  if (const auto* g = std::get_if<law::ComplexGaussian>(&law_)) {
    require(CovK{g->c11, g->c12, g->c22}.is_psd(),
            "complex_gaussian: covariance is not positive semidefinite");
    factor_ = symmetric_sqrt(g->c11, g->c12, g->c22);
  }
  if (const auto* e = std::get_if<law::ShiftedExponential>(&law_)) {
    require(e->rate > 0.0, "shifted_exponential: rate must be positive");
  }
}

cplx EntrySampler::operator()(RandomStream& rng) {
  return std::visit(
      overloaded{
          [&](const law::ShiftedExponential& l) {
            return cplx{-std::log1p(-uniform_(rng)) / l.rate + l.shift, 0.0};
          },
          [&](const law::RealGaussian& l) {
            return cplx{l.mean + std::sqrt(l.var) * normal_(rng), 0.0};
          },
          [&](const law::ComplexGaussian& l) {
            const Eigen::Vector2d g(normal_(rng), normal_(rng));
            const Eigen::Vector2d w = factor_ * g;
            return l.mean + cplx{w(0), w(1)};
          },
          [&](const law::Bernoulli&) { return cplx{uniform_(rng) < p_ ? 1.0 : 0.0, 0.0}; },
          [&](const law::SparseBernoulliTimesY& l) {
            if (!(uniform_(rng) < p_)) return cplx{0.0, 0.0};
            switch (l.y.kind) {
              case BoundedY::Kind::Constant: return cplx{l.y.a, 0.0};
              case BoundedY::Kind::Uniform:
                return cplx{l.y.a + (l.y.b - l.y.a) * uniform_(rng), 0.0};
              case BoundedY::Kind::Rademacher:
                return cplx{uniform_(rng) < 0.5 ? -1.0 : 1.0, 0.0};
            }
            return cplx{0.0, 0.0};
          },
          [](const law::Constant& l) { return l.m; },
          [&](const law::Rademacher&) { return cplx{uniform_(rng) < 0.5 ? -1.0 : 1.0, 0.0}; },
      },
      law_);
}

cplx sample_entry(const EntryLaw& law, std::uint64_t n, RandomStream& rng) {
  EntrySampler sampler(law, n);
  return sampler(rng);
}

MonteCarloEstimate lindeberg_diagnostic(const EntryLaw& law, std::uint64_t n, double eps,
                                        std::size_t trials, RandomStream& rng) {
  require(eps > 0.0, "lindeberg_diagnostic: eps must be positive");
  require(trials >= 2, "lindeberg_diagnostic: need at least two trials");
  const LawStats st = law_stats(law, n);
  if (st.degenerate) return {0.0, 0.0};
  const double threshold = eps * static_cast<double>(n) * st.sigma2;
  EntrySampler sampler(law, n);
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const double dev = std::norm(sampler(rng) - st.mean);
    const double v = dev >= threshold ? dev / st.sigma2 : 0.0;
    sum += v;
    sum2 += v * v;
  }
  const double nt = static_cast<double>(trials);
  const double mean = sum / nt;
  const double var = std::max(0.0, (sum2 - nt * mean * mean) / (nt - 1.0));
  return {mean, std::sqrt(var / nt)};
}

double variance_growth_ratio(const EntryLaw& law, std::uint64_t n) {
  require(n >= 2, "variance_growth_ratio requires n >= 2");
  const double nn = static_cast<double>(n);
  return nn * law_stats(law, n).sigma2 / std::pow(std::log(nn), 6.0);
}

bool is_real_law(const EntryLaw& law) {
  return std::visit(overloaded{
                        [](const law::ComplexGaussian& l) {
                          return l.mean.imag() == 0.0 && l.c22 == 0.0 && l.c12 == 0.0;
                        },
                        [](const law::Constant& l) { return l.m.imag() == 0.0; },
                        [](const auto&) { return true; },
                    },
                    law);
}

bool is_nonnegative_law(const EntryLaw& law) {
  return std::visit(overloaded{
                        [](const law::ShiftedExponential& l) { return l.shift >= 0.0; },
                        [](const law::RealGaussian& l) { return l.var == 0.0 && l.mean >= 0.0; },
                        [](const law::ComplexGaussian&) { return false; },
                        [](const law::Bernoulli&) { return true; },
                        [](const law::SparseBernoulliTimesY& l) {
                          switch (l.y.kind) {
                            case BoundedY::Kind::Constant: return l.y.a >= 0.0;
                            case BoundedY::Kind::Uniform: return l.y.a >= 0.0;
                            case BoundedY::Kind::Rademacher: return false;
                          }
                          return false;
                        },
                        [](const law::Constant& l) {
                          return l.m.imag() == 0.0 && l.m.real() >= 0.0;
                        },
                        [](const law::Rademacher&) { return false; },
                    },
                    law);
}

double support_diameter(const EntryLaw& law) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(overloaded{
                        [](const law::ShiftedExponential&) { return inf; },
                        [](const law::RealGaussian& l) { return l.var > 0.0 ? inf : 0.0; },
                        [](const law::ComplexGaussian&) { return inf; },
                        [](const law::Bernoulli&) { return 1.0; },
                        [](const law::SparseBernoulliTimesY& l) {
                          double lo = 0.0;
                          double hi = 0.0;
                          switch (l.y.kind) {
                            case BoundedY::Kind::Constant:
                              lo = std::min(lo, l.y.a);
                              hi = std::max(hi, l.y.a);
                              break;
                            case BoundedY::Kind::Uniform:
                              lo = std::min(lo, l.y.a);
                              hi = std::max(hi, l.y.b);
                              break;
                            case BoundedY::Kind::Rademacher:
                              lo = -1.0;
                              hi = 1.0;
                              break;
                          }
                          return hi - lo;
                        },
                        [](const law::Constant&) { return 0.0; },
                        [](const law::Rademacher&) { return 2.0; },
                    },
                    law);
}

std::string law_name(const EntryLaw& law) {
  return std::visit(overloaded{
                        [](const law::ShiftedExponential&) { return "shifted_exponential"; },
                        [](const law::RealGaussian&) { return "real_gaussian"; },
                        [](const law::ComplexGaussian&) { return "complex_gaussian"; },
                        [](const law::Bernoulli&) { return "bernoulli"; },
                        [](const law::SparseBernoulliTimesY&) { return "sparse_bernoulli"; },
                        [](const law::Constant&) { return "constant"; },
                        [](const law::Rademacher&) { return "rademacher"; },
                    },
                    law);
}

namespace {

void describe_schedule(const ProbSchedule& p, std::map<std::string, std::string>& out) {
  if (p.kind == ProbSchedule::Kind::Constant) {
    out["p"] = format_double(p.value);
  } else {
    out["p_schedule"] = "log_power";
    out["p_coef"] = format_double(p.coef);
    out["p_power"] = format_double(p.power);
  }
}

const char* y_kind_name(BoundedY::Kind k) {
  switch (k) {
    case BoundedY::Kind::Constant: return "constant";
    case BoundedY::Kind::Uniform: return "uniform";
    case BoundedY::Kind::Rademacher: return "rademacher";
  }
  return "constant";
}

// Tracks which keys were read so leftovers can be reported.
class KeyReader {
 public:
  explicit KeyReader(const std::map<std::string, std::string>& d) : d_(d) {}

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = d_.find(key);
    return it == d_.end() ? fallback : parse_double(it->second, "law parameter '" + key + "'");
  }
  cplx complex(const std::string& key, cplx fallback) {
    used_.insert(key);
    auto it = d_.find(key);
    return it == d_.end() ? fallback : parse_complex(it->second, "law parameter '" + key + "'");
  }
  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = d_.find(key);
    return it == d_.end() ? fallback : it->second;
  }
  ProbSchedule schedule() {
    const std::string kind = text("p_schedule", "constant");
    if (kind == "constant") return ProbSchedule::constant(number("p", 0.5));
    if (kind == "log_power") {
      return ProbSchedule::log_power(number("p_coef", 1.0), number("p_power", 1.0));
    }
    throw ConfigError("unknown p_schedule '" + kind + "'");
  }
  void finish() const {
    for (const auto& [k, v] : d_) {
      if (k != "kind" && !used_.count(k)) throw ConfigError("unknown law key '" + k + "'");
    }
  }

 private:
  const std::map<std::string, std::string>& d_;
  std::set<std::string> used_;
};

}  // namespace

std::map<std::string, std::string> describe(const EntryLaw& law) {
  std::map<std::string, std::string> out;
  out["kind"] = law_name(law);
  std::visit(overloaded{
                 [&](const law::ShiftedExponential& l) {
                   out["rate"] = format_double(l.rate);
                   out["shift"] = format_double(l.shift);
                 },
                 [&](const law::RealGaussian& l) {
                   out["mean"] = format_double(l.mean);
                   out["var"] = format_double(l.var);
                 },
                 [&](const law::ComplexGaussian& l) {
                   out["mean"] = format_complex(l.mean);
                   out["c11"] = format_double(l.c11);
                   out["c12"] = format_double(l.c12);
                   out["c22"] = format_double(l.c22);
                 },
                 [&](const law::Bernoulli& l) { describe_schedule(l.p, out); },
                 [&](const law::SparseBernoulliTimesY& l) {
                   describe_schedule(l.p, out);
                   out["y_kind"] = y_kind_name(l.y.kind);
                   out["y_a"] = format_double(l.y.a);
                   out["y_b"] = format_double(l.y.b);
                 },
                 [&](const law::Constant& l) { out["m"] = format_complex(l.m); },
                 [](const law::Rademacher&) {},
             },
             law);
  return out;
}

EntryLaw law_from_description(const std::map<std::string, std::string>& desc) {
  auto it = desc.find("kind");
  if (it == desc.end()) throw ConfigError("law description lacks 'kind'");
  const std::string& kind = it->second;
  KeyReader r(desc);
  EntryLaw out;
  if (kind == "shifted_exponential" || kind == "exponential") {
    out = law::ShiftedExponential{r.number("rate", 1.0), r.number("shift", 0.0)};
  } else if (kind == "real_gaussian") {
    out = law::RealGaussian{r.number("mean", 0.0), r.number("var", 1.0)};
  } else if (kind == "complex_gaussian") {
    out = law::ComplexGaussian{r.complex("mean", {0.0, 0.0}), r.number("c11", 0.5),
                               r.number("c12", 0.0), r.number("c22", 0.5)};
  } else if (kind == "bernoulli") {
    out = law::Bernoulli{r.schedule()};
  } else if (kind == "sparse_bernoulli") {
    law::SparseBernoulliTimesY s;
    s.p = r.schedule();
    const std::string yk = r.text("y_kind", "constant");
    if (yk == "constant") {
      s.y.kind = BoundedY::Kind::Constant;
    } else if (yk == "uniform") {
      s.y.kind = BoundedY::Kind::Uniform;
    } else if (yk == "rademacher") {
      s.y.kind = BoundedY::Kind::Rademacher;
    } else {
      throw ConfigError("unknown y_kind '" + yk + "'");
    }
    s.y.a = r.number("y_a", 1.0);
    s.y.b = r.number("y_b", s.y.a);
    if (s.y.kind == BoundedY::Kind::Uniform && !(s.y.b > s.y.a)) {
      throw ConfigError("sparse_bernoulli: uniform y requires y_b > y_a");
    }
    out = s;
  } else if (kind == "constant") {
    out = law::Constant{r.complex("m", {1.0, 0.0})};
  } else if (kind == "rademacher") {
    out = law::Rademacher{};
  } else {
    throw ConfigError("unknown law kind '" + kind + "'");
  }
  r.finish();
  return out;
}

}  // namespace rmg
