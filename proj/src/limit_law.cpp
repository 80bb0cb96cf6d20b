#include "rmg/limit_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "rmg/format.hpp"
#include "rmg/parallel.hpp"

namespace rmg {

namespace {

using Nodes = std::vector<DeltaNode>;

constexpr double kTMin = 1e-9;
constexpr double kFloorRank2 = 1e-7;

std::string at(cplx z) { return " at z = " + format_complex(z); }

// g(h) = E[(1 + t/h)/(A + (h+t)^2)] - 1 and its derivative.
void h_equation(const Nodes& nodes, double t, double h, double& g, double& dg) {
  const double ht = h + t;
  const double c = 1.0 + t / h;
  double s = 0.0, ds = 0.0;
  for (const DeltaNode& n : nodes) {
    const double q = 1.0 / (n.abs2 + ht * ht);
    s += n.weight * c * q;
    ds -= n.weight * ((t / (h * h)) * q + 2.0 * ht * c * q * q);
  }
  g = s - 1.0;
  dg = ds;
}

// Root of a strictly decreasing g on (0, inf) with g(0+) > 0 > g(inf).
template <class G>
double decreasing_root(G&& g, double guess, double tol, const char* what, cplx z) {
  double lo = guess, hi = guess;
  double glo = 0.0, ghi = 0.0, d = 0.0;
  g(hi, ghi, d);
  glo = ghi;
  int expand = 0;
  while (ghi > 0.0) {
    lo = hi;
    glo = ghi;
    hi *= 2.0;
    g(hi, ghi, d);
    if (++expand > 200) throw NumericalError(std::string(what) + ": no upper bracket" + at(z), ghi);
  }
  while (glo < 0.0) {
    hi = lo;
    ghi = glo;
    lo *= 0.5;
    g(lo, glo, d);
    if (++expand > 400) throw NumericalError(std::string(what) + ": no lower bracket" + at(z), glo);
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  double x = (lo == guess || hi == guess) ? guess : std::sqrt(lo * hi);
  double gx = 0.0, dx = 0.0;
  for (int it = 0; it < 300; ++it) {
    g(x, gx, dx);
    if (std::abs(gx) <= tol) return x;
    if (gx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
    double next = x - gx / dx;
    if (!(dx < 0.0) || !(next > lo && next < hi)) {
      next = (hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    x = next;
  }
  if (std::abs(gx) <= 1e-10) return x;
  throw NumericalError(std::string(what) + ": bisection did not converge" + at(z), gx);
}

double solve_h_on(const Nodes& nodes, cplx z, double t, double guess) {
  return decreasing_root(
      [&](double h, double& g, double& dg) { h_equation(nodes, t, h, g, dg); }, guess, 1e-13,
      "solve_h", z);
}

double default_h_guess(double t) { return 2.0 / (t + std::sqrt(t * t + 4.0)); }

// F(S) = E[w / (A - w^2)], w = S + eta, and F'(S) = E[(A + w^2)/(A - w^2)^2].
void fixed_point_map(const DeltaLaw& law, cplx eta, cplx S, cplx& F, cplx& dF) {
  const cplx w = S + eta;
  const cplx w2 = w * w;
  F = dF = {0.0, 0.0};
  for (const DeltaNode& n : law.rule({w2})) {
    const cplx q = 1.0 / (n.abs2 - w2);
    F += n.weight * w * q;
    dF += n.weight * (n.abs2 + w2) * q * q;
  }
}

struct NewtonResult {
  cplx S;
  double residual;
  bool ok;
};

NewtonResult newton(const DeltaLaw& law, cplx eta, cplx S, int max_it) {
  cplx F, dF;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_it; ++it) {
    fixed_point_map(law, eta, S, F, dF);
    res = std::abs(S - F);
    if (!std::isfinite(res)) return {S, res, false};
    if (res <= 1e-13 * std::max(1.0, std::abs(S))) return {S, res, true};
    cplx next = S - (S - F) / (1.0 - dF);
    double step = 1.0;
    while (!(next.imag() > 0.0) && step > 1e-6) {
      step *= 0.5;
      next = S - step * (S - F) / (1.0 - dF);
    }
    if (!(next.imag() > 0.0)) return {S, res, false};
    S = next;
  }
  fixed_point_map(law, eta, S, F, dF);
  res = std::abs(S - F);
  return {S, res, res <= 1e-10};
}

NewtonResult damped_picard(const DeltaLaw& law, cplx eta, cplx S, int max_it) {
  double damping = 0.5;
  double prev = std::numeric_limits<double>::infinity();
  cplx F, dF;
  for (int it = 0; it < max_it; ++it) {
    fixed_point_map(law, eta, S, F, dF);
    const double res = std::abs(S - F);
    if (res <= 1e-13) return {S, res, true};
    if (res > prev) damping = std::max(damping * 0.5, 1e-3);
    prev = res;
    cplx next = S + damping * (F - S);
    if (!(next.imag() > 0.0)) next = {next.real(), 0.5 * S.imag()};
    S = next;
  }
  return {S, prev, prev <= 1e-9};
}

cplx fixed_point_on(const DeltaLaw& law, cplx eta, std::optional<cplx> guess) {
  const cplx z = law.z();
  if (!(eta.imag() > 0.0)) throw ConfigError("stieltjes_fixed_point: Im(eta) must be positive");
  if (eta.real() == 0.0) {
    const double t = eta.imag();
    const Nodes nodes = law.rule({{-t * t, 0.0}});
    const double h0 = guess && guess->imag() > 0.0 ? guess->imag() : default_h_guess(t);
    return {0.0, solve_h_on(nodes, z, t, h0)};
  }
  const cplx start = guess && guess->imag() > 0.0 ? *guess : -1.0 / eta;
  NewtonResult r = newton(law, eta, start, 40);
  if (r.ok && r.residual <= 1e-9) return r.S;
  r = damped_picard(law, eta, -1.0 / eta, 200);
  if (r.S.imag() > 0.0) {
    NewtonResult polished = newton(law, eta, r.S, 60);
    if (polished.ok && polished.residual <= 1e-9) return polished.S;
  }
  // Continuation in Im(eta) from a well-conditioned height.
  double height = std::max(2.0, eta.imag());
  cplx S = -1.0 / cplx(eta.real(), height);
  double residual = r.residual;
  for (int step = 0; step < 200; ++step) {
    const cplx e(eta.real(), height);
    NewtonResult c = newton(law, e, S, 60);
    if (!c.ok) c = damped_picard(law, e, S, 2000);
    if (!(c.S.imag() > 0.0)) break;
    S = c.S;
    residual = c.residual;
    if (height == eta.imag()) {
      if (c.ok && residual <= 1e-9) return S;
      break;
    }
    height = std::max(eta.imag(), height * 0.6);
  }
  throw NumericalError("stieltjes_fixed_point: no convergence" + at(z) + " eta = " +
                           format_complex(eta),
                       residual);
}

}  // namespace

double solve_h(cplx z, double t, const GaussianSpec& spec) {
  if (!(t > 0.0)) throw ConfigError("solve_h: t must be positive");
  const DeltaLaw law(spec, z);
  return solve_h_on(law.rule({{-t * t, 0.0}}), z, t, default_h_guess(t));
}

cplx stieltjes_fixed_point(cplx z, cplx eta, const GaussianSpec& spec, std::optional<cplx> guess) {
  const DeltaLaw law(spec, z);
  return fixed_point_on(law, eta, guess);
}

std::vector<double> default_s_grid(cplx z, const GaussianSpec& spec, std::size_t points) {
  if (points < 3) throw ConfigError("default_s_grid: need at least 3 points");
  const double smax = 2.0 + std::abs(z) + 8.0 * std::sqrt(spec.K.trace());
  std::vector<double> s(points);
  for (std::size_t k = 0; k < points; ++k) s[k] = smax * static_cast<double>(k) / static_cast<double>(points - 1);
  return s;
}

std::vector<double> nu_z_density(cplx z, const std::vector<double>& s_grid, double eps,
                                 const GaussianSpec& spec) {
  if (!(eps > 0.0 && eps <= 0.1)) throw ConfigError("nu_z_density: eps must lie in (0, 0.1]");
  const DeltaLaw law(spec, z);
  std::vector<double> out(s_grid.size());
  std::optional<cplx> g1, g2;
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    const double s = s_grid[k];
    if (s < 0.0) throw ConfigError("nu_z_density: grid values must be nonnegative");
    const cplx S1 = fixed_point_on(law, {s, eps}, g1);
    const cplx S2 = fixed_point_on(law, {s, 0.5 * eps}, g2);
    g1 = S1;
    g2 = S2;
    const double d1 = 2.0 / kPi * S1.imag();
    const double d2 = 2.0 / kPi * S2.imag();
    out[k] = std::max(0.0, 2.0 * d2 - d1);
  }
  return out;
}

std::vector<double> cumulative(const std::vector<double>& s, const std::vector<double>& density) {
  if (s.size() != density.size() || s.empty()) throw ConfigError("cumulative: size mismatch");
  std::vector<double> F(s.size(), 0.0);
  for (std::size_t k = 1; k < s.size(); ++k) {
    F[k] = F[k - 1] + 0.5 * (density[k] + density[k - 1]) * (s[k] - s[k - 1]);
  }
  const double total = F.back();
  if (total > 0.0) {
    for (double& v : F) v /= total;
  }
  return F;
}

bool support_indicator(cplx z, const GaussianSpec& spec) {
  return expect_inv_abs2(spec, z) >= 1.0;
}

namespace {

double f_residual(const Nodes& nodes, double f, double& dg) {
  const double f2 = f * f;
  double s = 0.0, ds = 0.0;
  for (const DeltaNode& n : nodes) {
    const double q = 1.0 / (n.abs2 + f2);
    s += n.weight * q;
    ds -= 2.0 * f * n.weight * q * q;
  }
  dg = ds;
  return s - 1.0;
}

double f_root(const Nodes& nodes, cplx z, double lo_bound) {
  double d = 0.0;
  const double g_lo = f_residual(nodes, lo_bound, d);
  if (!(g_lo > 0.0)) return lo_bound;
  const double f = decreasing_root(
      [&](double x, double& g, double& dg) { g = f_residual(nodes, std::max(x, lo_bound), dg); },
      std::max(1.0, lo_bound), 1e-14, "solve_f", z);
  // Sign change across the final bracket.
  const double up = f * (1.0 + 1e-9) + 1e-300;
  if (f_residual(nodes, up, d) > 1e-10) {
    throw NumericalError("solve_f: lost the sign change" + at(z), f_residual(nodes, up, d));
  }
  return f;
}

}  // namespace

FSolution solve_f_detailed(cplx z, const GaussianSpec& spec) {
  FSolution out;
  out.in_support = support_indicator(z, spec);
  if (!out.in_support) return out;
  if (spec.rank == 0) {
    out.f = std::sqrt(std::max(0.0, 1.0 - std::norm(z)));
    out.log_f = std::log(out.f);
    return out;
  }
  const DeltaLaw law(spec, z);
  if (spec.rank == 1) {
    if (expect_inv_abs2(spec, z) == 1.0) return out;
    constexpr double fmin = 1e-12;
    const Nodes nodes = law.rule({{-fmin * fmin, 0.0}});
    out.f = f_root(nodes, z, 0.0);
    out.log_f = std::log(out.f);
    return out;
  }
  const Nodes nodes = law.rule({{-kFloorRank2 * kFloorRank2, 0.0}});
  double d = 0.0;
  const double g0 = f_residual(nodes, kFloorRank2, d);
  if (g0 >= 0.0) {
    out.f = f_root(nodes, z, kFloorRank2);
    out.log_f = std::log(out.f);
    return out;
  }
  // Below the floor E[1/(|Delta|^2 + f^2)] ~ const - 2 pi p(z) log f.
  const double p = law.density_at_origin();
  out.log_f = std::log(kFloorRank2) + g0 / (2.0 * kPi * p);
  out.f = std::exp(out.log_f);
  return out;
}

double solve_f(cplx z, const GaussianSpec& spec) { return solve_f_detailed(z, spec).f; }

double brown_density(cplx z, const GaussianSpec& spec) {
  const FSolution fs = solve_f_detailed(z, spec);
  if (!fs.in_support) return 0.0;
  const DeltaLaw law(spec, z);
  if (spec.rank == 2 && fs.log_f < std::log(1e-13)) return law.density_at_origin();
  const double f = fs.f;
  const double f2 = f * f;
  const double floor = spec.rank == 1 ? 1e-12 : f;
  double ephi = 0.0;
  cplx edphi{0.0, 0.0};
  for (const DeltaNode& n : law.rule({{-std::max(f, floor) * std::max(f, floor), 0.0}})) {
    const double q = 1.0 / (n.abs2 + f2);
    ephi += n.weight * q * q;
    edphi += n.moment * (q * q);
  }
  if (!(ephi > 0.0) || !std::isfinite(ephi)) {
    throw NumericalError("brown_density: E[Phi] is not positive and finite" + at(z), ephi);
  }
  return std::max(0.0, (f2 * ephi + std::norm(edphi) / ephi) / kPi);
}

namespace {

struct LegendreTable {
  std::vector<double> x, w;
};

const LegendreTable& gl16() {
  static const LegendreTable table = [] {
    // 16-point Gauss-Legendre on [-1, 1] via Golub-Welsch.
    const int n = 16;
    RMatrix J = RMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double v = k / std::sqrt(4.0 * k * k - 1.0);
      J(k - 1, k) = v;
      J(k, k - 1) = v;
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    LegendreTable t;
    for (int k = 0; k < n; ++k) {
      t.x.push_back(es.eigenvalues()(k));
      t.w.push_back(2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
    }
    return t;
  }();
  return table;
}

}  // namespace

double log_potential(cplx z, const GaussianSpec& spec) {
  const DeltaLaw law(spec, z);
  const Nodes nodes = law.rule({{-kTMin * kTMin, 0.0}});
  const LegendreTable& gl = gl16();
  double total = 0.0;
  double guess = default_h_guess(1.0);
  // int_0^1 h(t) dt on panels [10^-(k+1), 10^-k], walked from t = 1 downward.
  for (int k = 0; k < 9; ++k) {
    const double b = std::pow(10.0, -k);
    const double a = b / 10.0;
    for (std::size_t j = gl.x.size(); j-- > 0;) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[j];
      guess = solve_h_on(nodes, z, t, guess);
      total += 0.5 * (b - a) * gl.w[j] * guess;
    }
  }
  total += kTMin * guess;  // [0, 1e-9]
  // int_1^inf (h(t) - 1/t) dt = int_0^1 (h(1/u) - u)/u^2 du.
  guess = default_h_guess(1.0);
  for (const auto& [a, b] : {std::pair{0.5, 1.0}, std::pair{0.0, 0.5}}) {
    for (std::size_t j = gl.x.size(); j-- > 0;) {
      const double u = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[j];
      guess = solve_h_on(nodes, z, 1.0 / u, guess);
      total += 0.5 * (b - a) * gl.w[j] * (guess - u) / (u * u);
    }
  }
  return total;
}

double log_potential_density_route(cplx z, const GaussianSpec& spec) {
  const double smax = 2.0 + std::abs(z) + 8.0 * std::sqrt(spec.K.trace());
  const LegendreTable& gl = gl16();
  std::vector<double> breaks{0.0};
  for (int k = 6; k >= 1; --k) breaks.push_back(std::pow(10.0, -k));
  for (double b = 0.1; b < smax; b += 0.05) breaks.push_back(b);
  breaks.push_back(smax);
  std::vector<double> s, w;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    for (std::size_t j = 0; j < gl.x.size(); ++j) {
      s.push_back(0.5 * (a + b) + 0.5 * (b - a) * gl.x[j]);
      w.push_back(0.5 * (b - a) * gl.w[j]);
    }
  }
  const std::vector<double> dens = nu_z_density(z, s, 1e-3, spec);
  double mass = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    mass += w[k] * dens[k];
    acc -= w[k] * std::log(s[k]) * dens[k];
  }
  return acc / mass;
}

LaplacianDensity density_via_laplacian(const GridSpec& grid, const GaussianSpec& spec,
                                       unsigned jobs) {
  grid.validate();
  if (grid.step_re() > 0.1 + 1e-12 || grid.step_im() > 0.1 + 1e-12) {
    throw ConfigError("density_via_laplacian: grid spacing must be at most 0.1");
  }
  LaplacianDensity out;
  out.grid = grid;
  out.potential.assign(grid.size(), 0.0);
  parallel_for(grid.size(), jobs, [&](std::size_t k) {
    out.potential[k] = log_potential(grid.node(k), spec);
  });
  out.raw.assign(grid.size(), 0.0);
  out.density.assign(grid.size(), 0.0);
  out.interior.assign(grid.size(), 0);
  const double hr = grid.step_re(), hi = grid.step_im();
  for (std::size_t j = 1; j + 1 < grid.nodes_im; ++j) {
    for (std::size_t i = 1; i + 1 < grid.nodes_re; ++i) {
      const std::size_t k = grid.index(i, j);
      const double U = out.potential[k];
      const double lap =
          (out.potential[grid.index(i + 1, j)] + out.potential[grid.index(i - 1, j)] - 2.0 * U) /
              (hr * hr) +
          (out.potential[grid.index(i, j + 1)] + out.potential[grid.index(i, j - 1)] - 2.0 * U) /
              (hi * hi);
      const double mu = -lap / (2.0 * kPi);
      out.raw[k] = mu;
      out.interior[k] = 1;
      if (mu < 0.0) {
        out.clipped_max = std::max(out.clipped_max, -mu);
        out.clipped_mass += -mu * hr * hi;
      } else {
        out.density[k] = mu;
      }
    }
  }
  return out;
}

std::vector<char> boundary_ring(const GridSpec& grid, const std::vector<char>& in_support) {
  std::vector<char> ring(grid.size(), 0);
  for (std::size_t j = 0; j < grid.nodes_im; ++j) {
    for (std::size_t i = 0; i < grid.nodes_re; ++i) {
      bool any_in = false, any_out = false;
      for (std::size_t b = (j ? j - 1 : 0); b <= std::min(j + 1, grid.nodes_im - 1); ++b) {
        for (std::size_t a = (i ? i - 1 : 0); a <= std::min(i + 1, grid.nodes_re - 1); ++a) {
          (in_support[grid.index(a, b)] ? any_in : any_out) = true;
        }
      }
      ring[grid.index(i, j)] = any_in && any_out;
    }
  }
  return ring;
}

RouteComparison compare_density_routes(const LaplacianDensity& lap, const std::vector<double>& brown,
                                       const std::vector<char>& in_support, double mass_radius) {
  const GridSpec& g = lap.grid;
  if (brown.size() != g.size() || in_support.size() != g.size()) {
    throw ConfigError("compare_density_routes: grid size mismatch");
  }
  const std::vector<char> ring = boundary_ring(g, in_support);
  RouteComparison out;
  const double cell = g.step_re() * g.step_im();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!lap.interior[k]) continue;
    if (std::abs(g.node(k)) <= mass_radius) out.mass += lap.raw[k] * cell;
    if (ring[k]) continue;
    out.max_abs_diff = std::max(out.max_abs_diff, std::abs(lap.density[k] - brown[k]));
    ++out.compared;
  }
  return out;
}

LimitLaw limit_law_at(cplx z, const GaussianSpec& spec) {
  LimitLaw l;
  l.z = z;
  const FSolution fs = solve_f_detailed(z, spec);
  l.f = fs.f;
  l.log_f = fs.log_f;
  l.in_support = fs.in_support;
  l.density = brown_density(z, spec);
  l.U = log_potential(z, spec);
  return l;
}

}  // namespace rmg
