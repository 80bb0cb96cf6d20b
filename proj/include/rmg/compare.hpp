#pragma once

#include <vector>

#include "rmg/common.hpp"
#include "rmg/gauss_expect.hpp"
#include "rmg/grid.hpp"

namespace rmg {

// CDF of nu_z tabulated on the default s-grid, linear in between.
class NuCdf {
 public:
  NuCdf(cplx z, const GaussianSpec& spec, std::size_t points = 2001, double eps = 1e-3);
  double operator()(double s) const;
  const std::vector<double>& grid() const { return s_; }
  const std::vector<double>& density() const { return density_; }
  double mass() const { return mass_; }

 private:
  std::vector<double> s_, density_, F_;
  double mass_ = 0.0;
};

// Limit mass of each grid cell (cells centred on nodes), from the Brown density
// at 2x2 Gauss points per cell.
std::vector<double> limit_cell_masses(const GridSpec& cells, const GaussianSpec& spec,
                                      unsigned jobs = 1);

// Sum over cells of |empirical - limit| plus the mismatch of the mass outside the window.
double l1_distance(const std::vector<double>& empirical, double empirical_outside,
                   const std::vector<double>& limit);

}  // namespace rmg
