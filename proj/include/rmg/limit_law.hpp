#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "rmg/common.hpp"
#include "rmg/gauss_expect.hpp"
#include "rmg/grid.hpp"

namespace rmg {

// Unique h > 0 with 1 = E[(1 + t/h) / (|G - z|^2 + (h + t)^2)]; equals Im S(it).
double solve_h(cplx z, double t, const GaussianSpec& spec);

// S with Im S > 0 solving S = E[(S + eta) / (|G - z|^2 - (eta + S)^2)]: the
// Stieltjes transform of the symmetrized singular-value law of c + g - z.
// `guess` seeds the iteration (defaults to -1/eta).
cplx stieltjes_fixed_point(cplx z, cplx eta, const GaussianSpec& spec,
                           std::optional<cplx> guess = {});

// Density of nu_z at each s >= 0 from (2/pi) Im S(s + i eps), Richardson-combined
// over eps and eps/2 and clipped at 0.
std::vector<double> nu_z_density(cplx z, const std::vector<double>& s_grid, double eps,
                                 const GaussianSpec& spec);
// Uniform grid on [0, 2 + |z| + 8 sqrt(tr K)].
std::vector<double> default_s_grid(cplx z, const GaussianSpec& spec, std::size_t points = 2001);
// Trapezoid CDF of a density sampled on an ascending grid, normalized to end at 1.
std::vector<double> cumulative(const std::vector<double>& s_grid, const std::vector<double>& density);

bool support_indicator(cplx z, const GaussianSpec& spec);

struct FSolution {
  double f = 0.0;
  double log_f = -std::numeric_limits<double>::infinity();
  bool in_support = false;
};
// Root f of E[1/(|G - z|^2 + f^2)] = 1 inside the support, 0 outside. For rank-2
// K far from the origin f can underflow; log_f stays finite there.
FSolution solve_f_detailed(cplx z, const GaussianSpec& spec);
double solve_f(cplx z, const GaussianSpec& spec);

double brown_density(cplx z, const GaussianSpec& spec);

// -int log(s) d nu_z(s), integrated along the imaginary axis through h(z, t).
double log_potential(cplx z, const GaussianSpec& spec);
// Same quantity from the sampled nu_z density (slower, less accurate near s = 0).
double log_potential_density_route(cplx z, const GaussianSpec& spec);

struct LaplacianDensity {
  GridSpec grid;
  std::vector<double> potential;  // U at every node
  std::vector<double> raw;        // -(1/2pi) * discrete Laplacian; 0 on edge nodes
  std::vector<double> density;    // raw clipped at 0
  std::vector<char> interior;
  double clipped_max = 0.0;  // largest negative value removed by clipping
  double clipped_mass = 0.0;
};
LaplacianDensity density_via_laplacian(const GridSpec& grid, const GaussianSpec& spec,
                                       unsigned jobs = 1);

// Nodes whose 3x3 neighbourhood contains both support and non-support nodes.
std::vector<char> boundary_ring(const GridSpec& grid, const std::vector<char>& in_support);

struct RouteComparison {
  double max_abs_diff = 0.0;  // over interior nodes off the boundary ring
  std::size_t compared = 0;
  double mass = 0.0;  // unclipped cell sum of the Laplacian route within mass_radius
};
RouteComparison compare_density_routes(const LaplacianDensity& lap, const std::vector<double>& brown,
                                       const std::vector<char>& in_support, double mass_radius);

struct LimitLaw {
  cplx z;
  double f = 0.0;
  double log_f = 0.0;
  bool in_support = false;
  double density = 0.0;
  double U = 0.0;
};
LimitLaw limit_law_at(cplx z, const GaussianSpec& spec);

}  // namespace rmg
