#include "rmg/quaternionic.hpp"

#include <cmath>

#include "rmg/limit_law.hpp"
#include "rmg/parallel.hpp"
#include "rmg/rng.hpp"

namespace rmg {

namespace {

void require_upper(const QPoint& q) {
  if (!(q.eta.imag() > 0.0)) throw ConfigError("quaternionic transform: Im(eta) must be positive");
}

}  // namespace

double distance(const Gamma& a, const Gamma& b) {
  return std::sqrt(2.0 * std::norm(a.alpha - b.alpha) + 2.0 * std::norm(a.beta - b.beta));
}

Gamma gamma_matrix_direct(const CMatrix& A, const QPoint& q) {
  require_upper(q);
  const Eigen::Index n = A.rows();
  // Interleaved ordering: block i holds rows (2i, 2i+1) of bip(A) - q (x) I.
  CMatrix B = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    B(2 * i, 2 * i) = -q.eta;
    B(2 * i + 1, 2 * i + 1) = -q.eta;
    B(2 * i, 2 * i + 1) -= q.z;
    B(2 * i + 1, 2 * i) -= std::conj(q.z);
    for (Eigen::Index j = 0; j < n; ++j) {
      B(2 * i, 2 * j + 1) += A(i, j);
      B(2 * i + 1, 2 * j) += std::conj(A(j, i));
    }
  }
  const CMatrix R = B.partialPivLu().inverse();
  cplx r11{0.0, 0.0}, r12{0.0, 0.0}, r22{0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    r11 += R(2 * i, 2 * i);
    r12 += R(2 * i, 2 * i + 1);
    r22 += R(2 * i + 1, 2 * i + 1);
  }
  const double nn = static_cast<double>(n);
  return {0.5 * (r11 + r22) / nn, r12 / nn};
}

Gamma gamma_matrix_schur(const CMatrix& A, const QPoint& q) {
  require_upper(q);
  const Eigen::Index n = A.rows();
  CMatrix Az = A;
  Az.diagonal().array() -= q.z;
  CMatrix B = -(Az.adjoint() * Az);
  B.diagonal().array() += q.eta * q.eta;
  const CMatrix X = B.partialPivLu().inverse();
  const double nn = static_cast<double>(n);
  const cplx alpha = -q.eta * X.trace() / nn;
  const cplx beta = -(Az.transpose().array() * X.array()).sum() / nn;
  return {alpha, beta};
}

Gamma gamma_matrix(const CMatrix& A, const QPoint& q) {
  if (A.rows() != A.cols() || A.rows() == 0) throw ConfigError("gamma_matrix: square matrix required");
  return A.rows() <= 64 ? gamma_matrix_direct(A, q) : gamma_matrix_schur(A, q);
}

Gamma gamma_normal(const std::vector<cplx>& lambda, const QPoint& q) {
  require_upper(q);
  if (lambda.empty()) throw ConfigError("gamma_normal: empty spectrum");
  cplx a{0.0, 0.0}, b{0.0, 0.0};
  const cplx e2 = q.eta * q.eta;
  for (const cplx& l : lambda) {
    const cplx w = q.z - l;
    const cplx den = e2 - std::norm(w);
    a += -q.eta / den;
    b += w / den;
  }
  const double n = static_cast<double>(lambda.size());
  return {a / n, b / n};
}

Gamma gamma_limit(cplx z, cplx eta, const GaussianSpec& spec) {
  require_upper({z, eta});
  const cplx alpha = stieltjes_fixed_point(z, eta, spec);
  const cplx w = alpha + eta;
  const cplx w2 = w * w;
  cplx beta{0.0, 0.0};
  const DeltaLaw law(spec, z);
  for (const DeltaNode& node : law.rule({w2})) beta += node.moment / (node.abs2 - w2);
  return {alpha, beta};
}

CMatrix ginibre(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const auto nn = static_cast<Eigen::Index>(n);
  CMatrix Y(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      const double re = normal(rng);
      Y(i, j) = {re, normal(rng)};
    }
  }
  return Y / std::sqrt(static_cast<double>(n));
}

double subordination_residual(const std::vector<cplx>& lambda, std::size_t n, const QPoint& q,
                              std::size_t replicas, std::uint64_t seed, unsigned jobs) {
  require_upper(q);
  if (lambda.size() != n) throw ConfigError("subordination_residual: need exactly n spectral samples");
  if (replicas == 0) throw ConfigError("subordination_residual: need at least one replica");
  std::vector<double> res(replicas, 0.0);
  parallel_for(replicas, jobs, [&](std::size_t r) {
    CMatrix A = ginibre(n, derive_seed(seed, r));
    for (std::size_t i = 0; i < n; ++i) {
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += lambda[i];
    }
    const Gamma hat = gamma_matrix(A, q);
    const Gamma sub = gamma_normal(lambda, {q.z, q.eta + hat.alpha});
    res[r] = distance(hat, sub);
  });
  double sum = 0.0;
  for (double v : res) sum += v;
  return sum / static_cast<double>(replicas);
}

}  // namespace rmg
