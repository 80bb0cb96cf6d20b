#include "rmg/gauss_expect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include <Eigen/Eigenvalues>

#include "rmg/format.hpp"

namespace rmg {

namespace {

constexpr double kRankThreshold = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Golub-Welsch for a symmetric tridiagonal Jacobi matrix with zero diagonal.
void golub_welsch(const std::vector<double>& offdiag, double mass, std::vector<double>& x,
                  std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(offdiag.size() + 1);
  RMatrix J = RMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    J(k, k + 1) = offdiag[static_cast<std::size_t>(k)];
    J(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
  x.resize(static_cast<std::size_t>(n));
  w.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    x[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = mass * v * v;
  }
}

struct LegendreRule {
  std::vector<double> x, w;  // on [-1, 1]
};

const LegendreRule& legendre16() {
  static const LegendreRule rule = [] {
    LegendreRule r;
    std::vector<double> off(15);
    for (std::size_t k = 1; k <= off.size(); ++k) {
      const double kk = static_cast<double>(k);
      off[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    golub_welsch(off, 2.0, r.x, r.w);
    return r;
  }();
  return rule;
}

// Breakpoints on [lo, hi]: uniform panels of width `panel`, refined
// geometrically toward each focus (centre, scale).
std::vector<double> graded_breaks(double lo, double hi, double panel,
                                  const std::vector<std::pair<double, double>>& foci) {
  std::vector<double> b;
  const int count = static_cast<int>(std::ceil((hi - lo) / panel));
  for (int k = 0; k <= count; ++k) b.push_back(std::min(hi, lo + k * panel));
  for (const auto& [c, s0] : foci) {
    if (c < lo - panel || c > hi + panel) continue;
    const double floor = 1e-14 * std::max(1.0, std::abs(c));
    double s = std::max(s0, floor);
    if (c >= lo && c <= hi) b.push_back(c);
    for (; s < panel; s *= 2.0) {
      b.push_back(c - s);
      b.push_back(c + s);
    }
  }
  std::vector<double> out;
  for (double v : b) {
    if (v >= lo && v <= hi) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

template <class F>
void for_each_gl_node(const std::vector<double>& breaks, F&& f) {
  const LegendreRule& gl = legendre16();
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double mid = 0.5 * (breaks[p] + breaks[p + 1]);
    const double half = 0.5 * (breaks[p + 1] - breaks[p]);
    if (!(half > 0.0)) continue;
    for (std::size_t k = 0; k < gl.x.size(); ++k) f(mid + half * gl.x[k], half * gl.w[k]);
  }
}

constexpr int kChebPoints = 16;

double cheb_node(int j) { return std::cos(kPi * (j + 0.5) / kChebPoints); }

void check_finite(cplx v, cplx node) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw NumericalError("expect: integrand is not finite at node " + format_complex(node));
  }
}

}  // namespace

GaussianSpec gaussian_spec(const CovK& K) {
  if (!K.is_psd()) throw ConfigError("gaussian_spec: covariance is not positive semidefinite");
  GaussianSpec g;
  g.K = K;
  Eigen::Matrix2d C;
  C << K.k11, K.k12, K.k12, K.k22;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
  g.eigenvalues = es.eigenvalues().cwiseMax(0.0);
  g.eigenvectors = es.eigenvectors();
  for (int k = 0; k < 2; ++k) {
    if (g.eigenvalues(k) < kRankThreshold) g.eigenvalues(k) = 0.0;
  }
  g.rank = (g.eigenvalues(0) > 0.0) + (g.eigenvalues(1) > 0.0);
  g.factor = g.eigenvectors * g.eigenvalues.cwiseSqrt().asDiagonal() * g.eigenvectors.transpose();
  return g;
}

double GaussianSpec::density(cplx w) const {
  if (rank != 2) throw ConfigError("GaussianSpec::density requires a rank-2 covariance");
  const double det = eigenvalues(0) * eigenvalues(1);
  const Eigen::Vector2d v(w.real(), w.imag());
  const Eigen::Vector2d y = eigenvectors.transpose() * v;
  const double q = y(0) * y(0) / eigenvalues(0) + y(1) * y(1) / eigenvalues(1);
  return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det));
}

cplx GaussianSpec::direction() const {
  const Eigen::Vector2d v = eigenvectors.col(1);
  return {v(0), v(1)};
}

const HermiteRule& hermite_rule(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, HermiteRule> cache;
  if (n < 1) throw ConfigError("hermite_rule: need at least one node");
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    HermiteRule r;
    std::vector<double> off(n - 1);
    for (std::size_t k = 1; k < n; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
    golub_welsch(off, 1.0, r.nodes, r.weights);
    it = cache.emplace(n, std::move(r)).first;
  }
  return it->second;
}

namespace {

cplx gauss_hermite(const GaussianSpec& spec, const std::function<cplx(cplx)>& h, std::size_t n) {
  const HermiteRule& r = hermite_rule(n);
  cplx sum{0.0, 0.0};
  if (spec.rank == 1) {
    const cplx dir = spec.direction() * std::sqrt(spec.eigenvalues(1));
    for (std::size_t k = 0; k < n; ++k) {
      const cplx w = dir * r.nodes[k];
      const cplx v = h(w);
      check_finite(v, w);
      sum += r.weights[k] * v;
    }
    return sum;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const Eigen::Vector2d g = spec.factor * Eigen::Vector2d(r.nodes[a], r.nodes[b]);
      const cplx w{g(0), g(1)};
      const cplx v = h(w);
      check_finite(v, w);
      sum += r.weights[a] * r.weights[b] * v;
    }
  }
  return sum;
}

}  // namespace

Expectation expect(const GaussianSpec& spec, const std::function<cplx(cplx)>& h,
                   const Accuracy& accuracy) {
  if (spec.rank == 0) {
    const cplx v = h({0.0, 0.0});
    check_finite(v, {0.0, 0.0});
    return {v, 0.0};
  }
  if (accuracy.mode == Accuracy::Mode::MonteCarlo) {
    if (accuracy.trials < 2) throw ConfigError("expect: Monte Carlo needs at least two trials");
    RandomStream rng(accuracy.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    cplx sum{0.0, 0.0};
    double sum2 = 0.0;
    for (std::size_t k = 0; k < accuracy.trials; ++k) {
      const Eigen::Vector2d g = spec.factor * Eigen::Vector2d(normal(rng), normal(rng));
      const cplx w{g(0), g(1)};
      const cplx v = h(w);
      check_finite(v, w);
      sum += v;
      sum2 += std::norm(v);
    }
    const double nt = static_cast<double>(accuracy.trials);
    const cplx mean = sum / nt;
    const double var = std::max(0.0, (sum2 - nt * std::norm(mean)) / (nt - 1.0));
    return {mean, std::sqrt(var / nt)};
  }
  const std::size_t n = std::max<std::size_t>(accuracy.nodes, 2);
  const cplx full = gauss_hermite(spec, h, n);
  const cplx half = gauss_hermite(spec, h, n / 2);
  return {full, std::abs(full - half)};
}

double expect_inv_abs2(const GaussianSpec& spec, cplx z, bool* on_line) {
  if (on_line) *on_line = false;
  if (spec.rank == 2) return kInf;
  if (spec.rank == 0) return std::norm(z) > 0.0 ? 1.0 / std::norm(z) : kInf;
  const double d = (z * std::conj(spec.direction())).imag();
  if (d == 0.0) {
    if (on_line) *on_line = true;
    return kInf;
  }
  const DeltaLaw law(spec, z);
  double sum = 0.0;
  for (const DeltaNode& node : law.rule({{0.0, 0.0}})) sum += node.weight / node.abs2;
  return sum;
}

DeltaLaw::DeltaLaw(const GaussianSpec& spec, cplx z) : spec_(spec), z_(z) {
  if (spec_.rank == 1) {
    a_ = std::sqrt(spec_.eigenvalues(1));
    u_ = spec_.direction();
    const cplx zu = z_ * std::conj(u_);
    xi0_ = zu.real() / a_;
    d_ = zu.imag();
  } else if (spec_.rank == 2) {
    p0_ = spec_.density(z_);
    build_profile();
  }
}

void DeltaLaw::build_profile() {
  const double smin = std::sqrt(spec_.eigenvalues(0));
  const double smax = std::sqrt(spec_.eigenvalues(1));
  radius_ = std::abs(z_) + 12.0 * smax;
  panel_ = 0.5 * smin;
  const int panels = static_cast<int>(std::ceil(radius_ / panel_));
  const int n_theta = static_cast<int>(std::clamp(16.0 * radius_ / smin, 64.0, 2048.0));
  std::vector<cplx> rot(static_cast<std::size_t>(n_theta));
  for (int k = 0; k < n_theta; ++k) rot[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * kPi * k / n_theta);
  prof_mean_.assign(static_cast<std::size_t>(panels * kChebPoints), 0.0);
  prof_first_.assign(prof_mean_.size(), {0.0, 0.0});
  for (int p = 0; p < panels; ++p) {
    for (int j = 0; j < kChebPoints; ++j) {
      const double r = panel_ * (p + 0.5 + 0.5 * cheb_node(j));
      double mean = 0.0;
      cplx first{0.0, 0.0};
      for (const cplx& e : rot) {
        const double g = spec_.density(z_ + r * e);
        mean += g;
        first += g * e;
      }
      const auto idx = static_cast<std::size_t>(p * kChebPoints + j);
      prof_mean_[idx] = mean / n_theta;
      prof_first_[idx] = first / static_cast<double>(n_theta);
    }
  }
}

void DeltaLaw::profile_at(double r, double& mean, cplx& first) const {
  const int panels = static_cast<int>(prof_mean_.size()) / kChebPoints;
  int p = static_cast<int>(std::floor(r / panel_));
  if (p >= panels) {
    mean = 0.0;
    first = {0.0, 0.0};
    return;
  }
  p = std::max(p, 0);
  const double x = 2.0 * (r / panel_ - p - 0.5);
  // Barycentric interpolation at Chebyshev points of the first kind.
  double num_m = 0.0, den = 0.0;
  cplx num_f{0.0, 0.0};
  for (int j = 0; j < kChebPoints; ++j) {
    const double xj = cheb_node(j);
    const auto idx = static_cast<std::size_t>(p * kChebPoints + j);
    const double wj = ((j % 2) ? -1.0 : 1.0) * std::sin(kPi * (j + 0.5) / kChebPoints);
    if (x == xj) {
      mean = prof_mean_[idx];
      first = prof_first_[idx];
      return;
    }
    const double c = wj / (x - xj);
    num_m += c * prof_mean_[idx];
    num_f += c * prof_first_[idx];
    den += c;
  }
  mean = num_m / den;
  first = num_f / den;
}

std::vector<DeltaNode> DeltaLaw::rule(const std::vector<cplx>& poles) const {
  std::vector<DeltaNode> nodes;
  if (spec_.rank == 0) {
    nodes.push_back({std::norm(z_), 1.0, -z_});
    return nodes;
  }
  std::vector<std::pair<double, double>> foci;
  if (spec_.rank == 1) {
    for (const cplx& rho : poles) {
      const cplx q = std::sqrt(rho - d_ * d_) / a_;
      foci.emplace_back(xi0_ + q.real(), std::abs(q.imag()));
      foci.emplace_back(xi0_ - q.real(), std::abs(q.imag()));
    }
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    for_each_gl_node(graded_breaks(-10.0, 10.0, 1.0, foci), [&](double xi, double w) {
      const double weight = w * norm * std::exp(-0.5 * xi * xi);
      const double t = a_ * (xi - xi0_);
      nodes.push_back({t * t + d_ * d_, weight, weight * (a_ * xi * u_ - z_)});
    });
    return nodes;
  }
  for (const cplx& rho : poles) {
    const cplx r = std::sqrt(rho);
    foci.emplace_back(std::abs(r.real()), std::abs(r.imag()));
  }
  for_each_gl_node(graded_breaks(0.0, radius_, panel_, foci), [&](double r, double w) {
    double mean = 0.0;
    cplx first{0.0, 0.0};
    profile_at(r, mean, first);
    nodes.push_back({r * r, w * 2.0 * kPi * r * mean, w * 2.0 * kPi * r * r * first});
  });
  return nodes;
}

}  // namespace rmg
