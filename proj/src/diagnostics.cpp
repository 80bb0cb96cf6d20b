#include "rmg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "rmg/parallel.hpp"
#include "rmg/spectra.hpp"

namespace rmg {

namespace {

double ratio(double observed, double envelope, double roundoff) {
  if (observed <= roundoff) return 0.0;
  return envelope > 0.0 ? observed / envelope : std::numeric_limits<double>::infinity();
}

RMatrix real_generator(const CMatrix& L, const char* what) {
  if (!(L.imag().array() == 0.0).all()) {
    throw ConfigError(std::string(what) + ": generator must be real");
  }
  return L.real();
}

}  // namespace

EdgeReport edge_report(const GeneratorSample& sample, const LawStats& stats) {
  if (sample.delta != 1.0) throw ConfigError("edge_report requires delta = 1");
  const bool constant = std::holds_alternative<law::Constant>(sample.law);
  if (!constant && (!is_nonnegative_law(sample.law) || !(stats.mean.real() > 0.0))) {
    throw ConfigError("edge_report: the Markov case needs a nonnegative law with m > 0");
  }
  EdgeReport r;
  const double n = static_cast<double>(sample.n);
  const double sigma = stats.sigma();
  const double logn = std::log(n);
  r.sparse_model = std::holds_alternative<law::SparseBernoulliTimesY>(sample.law);
  if (r.sparse_model) {
    const double extra = std::sqrt(sigma) * std::pow(n, 0.25) * logn;
    r.envelope_re = 2.0 * sigma * std::sqrt(n * logn) + extra;
    r.envelope_im = 2.0 * sigma * std::sqrt(n) + extra;
  } else {
    r.envelope_re = sigma * std::sqrt(2.0 * n * logn);
    r.envelope_im = 2.0 * sigma * std::sqrt(n);
  }
  const Centered c = center(sample, stats);
  for (const cplx& l : eigenvalues(c.L, sample.seed)) {
    r.max_abs_re_centered = std::max(r.max_abs_re_centered, std::abs(l.real()));
    r.max_abs_im_centered = std::max(r.max_abs_im_centered, std::abs(l.imag()));
  }
  std::vector<cplx> eigs = eigenvalues(sample.L, sample.seed);
  const auto perron = std::min_element(eigs.begin(), eigs.end(), [](cplx a, cplx b) {
    return std::abs(a) < std::abs(b);
  });
  const double mn = stats.mean.real() * n;
  for (auto it = eigs.begin(); it != eigs.end(); ++it) {
    if (it == perron) continue;
    r.max_abs_re_shifted = std::max(r.max_abs_re_shifted, std::abs(it->real() + mn));
  }
  const double roundoff = 64.0 * n * std::numeric_limits<double>::epsilon() * sample.L.cwiseAbs().maxCoeff();
  r.margin_re = ratio(r.max_abs_re_centered, r.envelope_re, roundoff);
  r.margin_im = ratio(r.max_abs_im_centered, r.envelope_im, roundoff);
  r.margin_shifted = ratio(r.max_abs_re_shifted, r.envelope_re, roundoff);
  return r;
}

GapResult spectral_gap(const std::vector<cplx>& eigs, double scale, std::size_t n) {
  GapResult g;
  const double threshold = static_cast<double>(n) * 1e-10 * scale;
  g.kappa = std::numeric_limits<double>::infinity();
  for (const cplx& l : eigs) {
    if (std::abs(l) <= threshold) {
      ++g.zero_count;
    } else {
      g.kappa = std::min(g.kappa, std::abs(l.real()));
    }
  }
  g.reducible_suspect = g.zero_count != 1;
  return g;
}

GapResult spectral_gap(const GeneratorSample& sample) {
  if (!is_nonnegative_law(sample.law) && !std::holds_alternative<law::Constant>(sample.law)) {
    throw ConfigError("spectral_gap: the Markov case needs a nonnegative law");
  }
  return spectral_gap(eigenvalues(sample.L, sample.seed), sample.L.cwiseAbs().maxCoeff(), sample.n);
}

bool is_irreducible(const CMatrix& L) {
  const Eigen::Index n = L.rows();
  if (n <= 1) return true;
  auto reach_all = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const Eigen::Index j = stack.back();
      stack.pop_back();
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == j || seen[static_cast<std::size_t>(k)]) continue;
        const cplx e = forward ? L(j, k) : L(k, j);
        if (std::abs(e) > 0.0) {
          seen[static_cast<std::size_t>(k)] = 1;
          ++count;
          stack.push_back(k);
        }
      }
    }
    return count == static_cast<std::size_t>(n);
  };
  return reach_all(true) && reach_all(false);
}

std::vector<double> invariant_measure(const CMatrix& Lc) {
  const RMatrix L = real_generator(Lc, "invariant_measure");
  if (!is_irreducible(Lc)) throw NumericalError("invariant_measure: generator is not irreducible");
  const Eigen::Index n = L.rows();
  const double scale = L.cwiseAbs().maxCoeff();
  RMatrix A = L.transpose();
  A.diagonal().array() += 1e-9 * scale;
  const Eigen::PartialPivLU<RMatrix> lu(A);
  RVector x = RVector::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 3; ++it) {
    x = lu.solve(x);
    x /= x.sum();
  }
  std::vector<double> pi(x.data(), x.data() + n);
  for (double v : pi) {
    if (v < -1e-10) throw NumericalError("invariant_measure: not a generator (negative mass)", v);
  }
  return pi;
}

PerturbativeResult invariant_perturbative(const GeneratorSample& sample, const LawStats& stats) {
  const double mn = stats.mean.real() * static_cast<double>(sample.n);
  if (stats.mean.imag() != 0.0 || !(mn > 0.0)) {
    throw ConfigError("invariant_perturbative: requires a real mean m > 0");
  }
  const Centered c = center(sample, stats);
  const Eigen::Index n = static_cast<Eigen::Index>(sample.n);
  RMatrix B = -real_generator(c.L, "invariant_perturbative") / mn;
  B.diagonal().array() += 1.0;
  const Eigen::PartialPivLU<RMatrix> lu(B.transpose());
  PerturbativeResult out;
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e-13)) {
    throw NumericalError("invariant_perturbative: I - Lbar/(mn) is ill-conditioned (rcond " +
                             std::to_string(out.rcond) + ")",
                         out.rcond);
  }
  const RVector u = lu.solve(RVector::Ones(n));
  const double total = u.sum();
  out.pi_hat.resize(sample.n);
  for (Eigen::Index i = 0; i < n; ++i) out.pi_hat[static_cast<std::size_t>(i)] = u(i) / total;
  const std::vector<double> pi = invariant_measure(sample.L);
  for (std::size_t i = 0; i < pi.size(); ++i) out.gap = std::max(out.gap, std::abs(out.pi_hat[i] - pi[i]));
  return out;
}

double tv_uniform(const std::vector<double>& pi) {
  if (pi.empty()) return 0.0;
  const double u = 1.0 / static_cast<double>(pi.size());
  double s = 0.0;
  for (double v : pi) s += std::abs(v - u);
  return 0.5 * s;
}

SmallSvReport small_sv_report(const EntryLaw& law, std::size_t n, cplx z, std::size_t replicas,
                              std::uint64_t seed, unsigned jobs) {
  if (n < 2) throw ConfigError("small_sv_report requires n >= 2");
  const LawStats stats = law_stats(law, n);
  const double nn = static_cast<double>(n);
  const double logn = std::log(nn);
  const double quasi = std::exp(-logn * logn);
  const double c0 = 1.0 / (4.0 * std::sqrt(2.0));
  const std::size_t i0 = std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(nn / std::pow(logn, 5.0))));
  SmallSvReport rep;
  rep.replicas = replicas;
  rep.sn.assign(replicas, 0.0);
  std::vector<std::size_t> good(replicas, 0), pairs(replicas, 0);
  parallel_for(replicas, jobs, [&](std::size_t r) {
    const GeneratorSample s = sample_generator(law, n, 1.0, derive_seed(seed, r));
    const std::vector<double> sv = singular_values(rescale(s, stats), z, s.seed);
    rep.sn[r] = sv.back();
    for (std::size_t i = i0; i + 1 <= n - 1; ++i) {
      ++pairs[r];
      if (sv[n - i - 1] >= c0 * static_cast<double>(i) / nn) ++good[r];
    }
  });
  std::size_t ok = 0, g = 0;
  for (std::size_t r = 0; r < replicas; ++r) {
    if (rep.sn[r] >= quasi) ++ok;
    g += good[r];
    rep.pairs += pairs[r];
  }
  if (replicas > 0) {
    rep.frac_quasi = static_cast<double>(ok) / static_cast<double>(replicas);
    rep.min_sn = *std::min_element(rep.sn.begin(), rep.sn.end());
  }
  rep.frac_moderate = rep.pairs ? static_cast<double>(g) / static_cast<double>(rep.pairs) : 1.0;
  return rep;
}

namespace {

struct CellKey {
  std::int64_t i, j;
  bool operator==(const CellKey&) const = default;
};
struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return std::hash<std::int64_t>()(k.i * 0x9e3779b97f4a7c15LL ^ k.j);
  }
};

CellKey cell_of(cplx s, double side) {
  return {static_cast<std::int64_t>(std::floor(s.real() / side)),
          static_cast<std::int64_t>(std::floor(s.imag() / side))};
}

}  // namespace

ConcentrationResult concentration_fn(const std::vector<cplx>& x, const EntryLaw& law, double t,
                                     std::size_t trials, double resolution, std::uint64_t seed) {
  if (!(t >= 0.0)) throw ConfigError("concentration_fn: t must be nonnegative");
  if (trials == 0) throw ConfigError("concentration_fn: need at least one trial");
  if (!(resolution >= 1.0)) throw ConfigError("concentration_fn: resolution must be >= 1");
  for (const cplx& v : x) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ConfigError("concentration_fn: x must be finite");
  }
  RandomStream rng(seed);
  EntrySampler sampler(law, std::max<std::size_t>(x.size(), 1));
  std::vector<cplx> S(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    cplx s{0.0, 0.0};
    for (const cplx& xi : x) s += sampler(rng) * xi;
    S[k] = s;
  }
  ConcentrationResult out;
  std::size_t best = 0;
  if (t == 0.0) {
    std::vector<cplx> sorted = S;
    std::sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    for (std::size_t k = 0; k < sorted.size();) {
      std::size_t j = k;
      while (j < sorted.size() && sorted[j] == sorted[k]) ++j;
      best = std::max(best, j - k);
      ++out.centers;
      k = j;
    }
  } else {
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> buckets;
    for (std::size_t k = 0; k < trials; ++k) buckets[cell_of(S[k], t)].push_back(k);
    std::unordered_map<CellKey, std::size_t, CellHash> thinned;
    const double side = t / resolution;
    for (std::size_t k = 0; k < trials; ++k) thinned.try_emplace(cell_of(S[k], side), k);
    std::vector<std::size_t> centers;
    centers.reserve(thinned.size());
    for (const auto& kv : thinned) centers.push_back(kv.second);
    std::sort(centers.begin(), centers.end());
    out.centers = centers.size();
    const double t2 = t * t;
    for (std::size_t c : centers) {
      const cplx w = S[c];
      const CellKey home = cell_of(w, t);
      std::size_t hits = 0;
      for (std::int64_t di = -1; di <= 1; ++di) {
        for (std::int64_t dj = -1; dj <= 1; ++dj) {
          auto it = buckets.find({home.i + di, home.j + dj});
          if (it == buckets.end()) continue;
          for (std::size_t k : it->second) {
            const double dr = S[k].real() - w.real();
            const double di2 = S[k].imag() - w.imag();
            if (dr * dr + di2 * di2 <= t2) ++hits;
          }
        }
      }
      best = std::max(best, hits);
    }
  }
  const double nt = static_cast<double>(trials);
  out.value = static_cast<double>(best) / nt;
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / nt);
  return out;
}

double dist_to_sparse(const std::vector<cplx>& x, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("dist_to_sparse: delta must lie in (0, 1]");
  double norm2 = 0.0;
  std::vector<double> m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m[i] = std::norm(x[i]);
    norm2 += m[i];
  }
  if (std::abs(norm2 - 1.0) > 1e-10) throw ConfigError("dist_to_sparse: x must be a unit vector");
  std::sort(m.begin(), m.end(), std::greater<>());
  const auto drop = static_cast<std::size_t>(std::floor(delta * static_cast<double>(x.size())));
  double rest = 0.0;
  for (std::size_t i = std::min(drop, m.size()); i < m.size(); ++i) rest += m[i];
  return std::sqrt(rest);
}

}  // namespace rmg
