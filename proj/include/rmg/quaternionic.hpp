#pragma once

#include <cstdint>
#include <vector>

#include "rmg/common.hpp"
#include "rmg/gauss_expect.hpp"

namespace rmg {

// q(z, eta) = [[eta, z], [conj(z), eta]] with Im(eta) > 0.
struct QPoint {
  cplx z;
  cplx eta;
};

// [[alpha, beta], [conj(beta), alpha]].
struct Gamma {
  cplx alpha;
  cplx beta;
};

// Frobenius norm of the difference of the 2x2 matrices.
double distance(const Gamma& a, const Gamma& b);

// tau_2 of the resolvent of the bipartization of A at q. Direct 2n x 2n inverse
// for n <= 64, Schur complement otherwise.
Gamma gamma_matrix(const CMatrix& A, const QPoint& q);
Gamma gamma_matrix_direct(const CMatrix& A, const QPoint& q);
Gamma gamma_matrix_schur(const CMatrix& A, const QPoint& q);

// Exact transform of the normal matrix diag(lambda).
Gamma gamma_normal(const std::vector<cplx>& lambda, const QPoint& q);

// Limit transform of c + g: alpha from the fixed point, beta = E[(G-z)/(|G-z|^2 - (alpha+eta)^2)].
Gamma gamma_limit(cplx z, cplx eta, const GaussianSpec& spec);

// Mean over replicas of || Gamma_hat - Gamma_A(q + diag Gamma_hat) ||, where
// Gamma_hat = gamma_matrix(diag(lambda) + Y) and Y has i.i.d. N(0, I_2/(2n)) entries.
double subordination_residual(const std::vector<cplx>& lambda, std::size_t n, const QPoint& q,
                              std::size_t replicas, std::uint64_t seed, unsigned jobs = 1);

// Ginibre matrix with i.i.d. complex entries N(0, I_2/2) scaled by 1/sqrt(n).
CMatrix ginibre(std::size_t n, std::uint64_t seed);

}  // namespace rmg
