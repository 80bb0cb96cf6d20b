#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rmg/common.hpp"
#include "rmg/grid.hpp"

namespace rmg {

// Eigenvalues of a dense square matrix (real routine when A is real).
// `seed` is only used to label a solver failure.
std::vector<cplx> eigenvalues(const CMatrix& A, std::optional<std::uint64_t> seed = {});

// Singular values of A - zI, descending. Values below n*eps*s_1 are set to 0.
std::vector<double> singular_values(const CMatrix& A, cplx z = {0.0, 0.0},
                                    std::optional<std::uint64_t> seed = {});

// (1/2n) Tr[(H(z) - eta)^-1] with H(z) = [[0, A-z], [(A-z)^*, 0]].
cplx hermitization_stieltjes_direct(const CMatrix& A, cplx z, cplx eta);
cplx hermitization_stieltjes_from_sv(const std::vector<double>& sv, cplx eta);
// Direct inverse for n <= 64, singular-value form otherwise.
cplx hermitization_stieltjes(const CMatrix& A, cplx z, cplx eta);

struct EsdSummary {
  GridSpec grid;
  // Cell masses (cells centred on grid nodes), normalized by the number of values.
  std::vector<double> histogram;
  // Gaussian product-kernel density evaluated at the nodes.
  std::vector<double> kde;
  double bandwidth_re = 0.0;
  double bandwidth_im = 0.0;
  double outside_mass = 0.0;  // fraction of values falling outside every cell
  std::size_t count = 0;
};

EsdSummary esd_summary(const std::vector<cplx>& values, const GridSpec& grid);
EsdSummary esd_summary(const std::vector<double>& values, const GridSpec& grid);

// sup over sample points of |F_emp - cdf|, both one-sided limits checked.
// `samples` must be sorted ascending.
double ks_distance(const std::vector<double>& samples, const std::function<double(double)>& cdf);

}  // namespace rmg
