#include "rmg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lapack.hpp"

namespace rmg {

namespace {

bool is_real(const CMatrix& A) { return (A.imag().array() == 0.0).all(); }

std::string failure_label(const char* routine, lapack_int info, std::optional<std::uint64_t> seed) {
  std::string msg = std::string(routine) + " failed (info = " + std::to_string(info) + ")";
  if (seed) msg += " for matrix seed " + std::to_string(*seed);
  return msg;
}

void require_square_finite(const CMatrix& A, const char* what) {
  if (A.rows() != A.cols()) throw ConfigError(std::string(what) + ": matrix must be square");
  if (!A.allFinite()) throw ConfigError(std::string(what) + ": matrix has non-finite entries");
}

}  // namespace

std::vector<cplx> eigenvalues(const CMatrix& A, std::optional<std::uint64_t> seed) {
  require_square_finite(A, "eigenvalues");
  const auto n = static_cast<lapack_int>(A.rows());
  std::vector<cplx> out(static_cast<std::size_t>(n));
  if (n == 0) return out;
  if (is_real(A)) {
    RMatrix a = A.real();
    std::vector<double> wr(out.size()), wi(out.size());
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(),
                                          wi.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError(failure_label("dgeev", info, seed));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {wr[k], wi[k]};
  } else {
    CMatrix a = A;
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, out.data(),
                                          nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError(failure_label("zgeev", info, seed));
  }
  return out;
}

std::vector<double> singular_values(const CMatrix& A, cplx z, std::optional<std::uint64_t> seed) {
  require_square_finite(A, "singular_values");
  const auto n = static_cast<lapack_int>(A.rows());
  std::vector<double> s(static_cast<std::size_t>(n));
  if (n == 0) return s;
  if (is_real(A) && z.imag() == 0.0) {
    RMatrix a = A.real();
    a.diagonal().array() -= z.real();
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(),
                                           nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError(failure_label("dgesdd", info, seed));
  } else {
    CMatrix a = A;
    a.diagonal().array() -= z;
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, a.data(), n, s.data(),
                                           nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError(failure_label("zgesdd", info, seed));
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * s.front();
  for (double& v : s) {
    if (v < cutoff) v = 0.0;
  }
  return s;
}

cplx hermitization_stieltjes_direct(const CMatrix& A, cplx z, cplx eta) {
  if (!(eta.imag() > 0.0)) throw ConfigError("hermitization_stieltjes: Im(eta) must be positive");
  const Eigen::Index n = A.rows();
  CMatrix H = CMatrix::Zero(2 * n, 2 * n);
  CMatrix Az = A;
  Az.diagonal().array() -= z;
  H.topRightCorner(n, n) = Az;
  H.bottomLeftCorner(n, n) = Az.adjoint();
  H.diagonal().array() -= eta;
  const CMatrix R = H.partialPivLu().inverse();
  return R.trace() / static_cast<double>(2 * n);
}

cplx hermitization_stieltjes_from_sv(const std::vector<double>& sv, cplx eta) {
  if (!(eta.imag() > 0.0)) throw ConfigError("hermitization_stieltjes: Im(eta) must be positive");
  if (sv.empty()) throw ConfigError("hermitization_stieltjes: no singular values");
  cplx sum{0.0, 0.0};
  for (double s : sv) sum += 1.0 / (s - eta) + 1.0 / (-s - eta);
  return sum / (2.0 * static_cast<double>(sv.size()));
}

cplx hermitization_stieltjes(const CMatrix& A, cplx z, cplx eta) {
  if (A.rows() <= 64) return hermitization_stieltjes_direct(A, z, eta);
  return hermitization_stieltjes_from_sv(singular_values(A, z), eta);
}

namespace {

double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// N x nodes matrix of Gaussian kernel values phi_bw(node - x).
RMatrix kernel_matrix(const std::vector<double>& x, double lo, double step, std::size_t nodes,
                      double bw) {
  RMatrix K(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(nodes));
  const double norm = 1.0 / (bw * std::sqrt(2.0 * kPi));
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (std::size_t a = 0; a < nodes; ++a) {
      const double u = (lo + static_cast<double>(a) * step - x[k]) / bw;
      K(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = norm * std::exp(-0.5 * u * u);
    }
  }
  return K;
}

}  // namespace

EsdSummary esd_summary(const std::vector<cplx>& values, const GridSpec& grid) {
  grid.validate();
  if (values.empty()) throw ConfigError("esd_summary: empty input");
  EsdSummary out;
  out.grid = grid;
  out.count = values.size();
  out.histogram.assign(grid.size(), 0.0);
  const double hr = grid.step_re();
  const double hi = grid.step_im();
  const double unit = 1.0 / static_cast<double>(values.size());
  std::size_t outside = 0;
  std::vector<double> re(values.size()), im(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    re[k] = values[k].real();
    im[k] = values[k].imag();
    const double fi = std::floor((re[k] - grid.re_min) / hr + 0.5);
    const double fj = std::floor((im[k] - grid.im_min) / hi + 0.5);
    if (fi < 0.0 || fj < 0.0 || fi >= static_cast<double>(grid.nodes_re) ||
        fj >= static_cast<double>(grid.nodes_im)) {
      ++outside;
      continue;
    }
    out.histogram[grid.index(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj))] += unit;
  }
  out.outside_mass = static_cast<double>(outside) * unit;

  // Silverman's rule in two dimensions: sd * N^(-1/6) per axis.
  const double shrink = std::pow(static_cast<double>(values.size()), -1.0 / 6.0);
  out.bandwidth_re = sample_sd(re) * shrink;
  out.bandwidth_im = sample_sd(im) * shrink;
  if (!(out.bandwidth_re > 0.0)) out.bandwidth_re = hr;
  if (!(out.bandwidth_im > 0.0)) out.bandwidth_im = hi;
  const RMatrix Kr = kernel_matrix(re, grid.re_min, hr, grid.nodes_re, out.bandwidth_re);
  const RMatrix Ki = kernel_matrix(im, grid.im_min, hi, grid.nodes_im, out.bandwidth_im);
  const RMatrix dens = (Kr.transpose() * Ki) * unit;  // nodes_re x nodes_im
  out.kde.resize(grid.size());
  for (std::size_t j = 0; j < grid.nodes_im; ++j) {
    for (std::size_t i = 0; i < grid.nodes_re; ++i) {
      out.kde[grid.index(i, j)] =
          dens(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

EsdSummary esd_summary(const std::vector<double>& values, const GridSpec& grid) {
  std::vector<cplx> c(values.begin(), values.end());
  return esd_summary(c, grid);
}

double ks_distance(const std::vector<double>& samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  const double N = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t k = 0;
  while (k < samples.size()) {
    const double x = samples[k];
    std::size_t j = k;
    while (j < samples.size() && samples[j] == x) ++j;
    const double below = static_cast<double>(k) / N;
    const double at = static_cast<double>(j) / N;
    d = std::max(d, std::abs(at - cdf(x)));
    d = std::max(d, std::abs(below - cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()))));
    k = j;
  }
  return std::min(1.0, d);
}

}  // namespace rmg
