#include "rmg/compare.hpp"

#include <algorithm>
#include <cmath>

#include "rmg/limit_law.hpp"
#include "rmg/parallel.hpp"

namespace rmg {

NuCdf::NuCdf(cplx z, const GaussianSpec& spec, std::size_t points, double eps)
    : s_(default_s_grid(z, spec, points)), density_(nu_z_density(z, s_, eps, spec)) {
  F_.assign(s_.size(), 0.0);
  for (std::size_t k = 1; k < s_.size(); ++k) {
    F_[k] = F_[k - 1] + 0.5 * (density_[k] + density_[k - 1]) * (s_[k] - s_[k - 1]);
  }
  mass_ = F_.back();
  if (mass_ > 0.0) {
    for (double& v : F_) v /= mass_;
  }
}

double NuCdf::operator()(double s) const {
  if (s <= s_.front()) return 0.0;
  if (s >= s_.back()) return 1.0;
  const auto it = std::upper_bound(s_.begin(), s_.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - s_.begin());
  const double w = (s - s_[k - 1]) / (s_[k] - s_[k - 1]);
  return F_[k - 1] + w * (F_[k] - F_[k - 1]);
}

std::vector<double> limit_cell_masses(const GridSpec& cells, const GaussianSpec& spec, unsigned jobs) {
  cells.validate();
  const double hr = cells.step_re(), hi = cells.step_im();
  const double off = 0.5 / std::sqrt(3.0);
  std::vector<double> mass(cells.size(), 0.0);
  parallel_for(cells.size(), jobs, [&](std::size_t k) {
    const cplx c = cells.node(k);
    double acc = 0.0;
    for (double a : {-off, off}) {
      for (double b : {-off, off}) acc += brown_density(c + cplx(a * hr, b * hi), spec);
    }
    mass[k] = 0.25 * acc * hr * hi;
  });
  return mass;
}

double l1_distance(const std::vector<double>& empirical, double empirical_outside,
                   const std::vector<double>& limit) {
  if (empirical.size() != limit.size()) throw ConfigError("l1_distance: grid size mismatch");
  double d = 0.0, inside = 0.0;
  for (std::size_t k = 0; k < limit.size(); ++k) {
    d += std::abs(empirical[k] - limit[k]);
    inside += limit[k];
  }
  return d + std::abs(empirical_outside - std::max(0.0, 1.0 - inside));
}

}  // namespace rmg
