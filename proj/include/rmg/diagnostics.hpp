#pragma once

#include <cstdint>
#include <vector>

#include "rmg/common.hpp"
#include "rmg/ensemble.hpp"
#include "rmg/entry_laws.hpp"

namespace rmg {

struct EdgeSlack {
  double re = 1.2;
  double im = 1.1;
};

struct EdgeReport {
  double max_abs_re_centered = 0.0;
  double max_abs_im_centered = 0.0;
  double max_abs_re_shifted = 0.0;  // max over lambda != Perron root of |Re lambda + mn|
  // sigma sqrt(2 n log n) and 2 sigma sqrt(n); for sparse laws
  // 2 sigma sqrt(n log n) + r and 2 sigma sqrt(n) + r with r = sqrt(sigma) n^(1/4) log n.
  double envelope_re = 0.0;
  double envelope_im = 0.0;
  bool sparse_model = false;  // envelopes below use the sparse (model B) form
  double margin_re = 0.0;           // observed / envelope
  double margin_im = 0.0;
  double margin_shifted = 0.0;
  bool within(const EdgeSlack& s) const {
    return margin_re <= s.re && margin_im <= s.im && margin_shifted <= s.re;
  }
};

// Requires delta = 1 and a real nonnegative law with m > 0 (Markov case); a
// Constant law is accepted and gives an all-zero report.
EdgeReport edge_report(const GeneratorSample& sample, const LawStats& stats);

struct GapResult {
  double kappa = 0.0;
  std::size_t zero_count = 0;  // eigenvalues inside the zero threshold
  bool reducible_suspect = false;
};
GapResult spectral_gap(const GeneratorSample& sample);
GapResult spectral_gap(const std::vector<cplx>& eigs, double scale, std::size_t n);

// Strong connectivity of the pattern |L_jk| > 0, j != k.
bool is_irreducible(const CMatrix& L);

// Probability vector pi with L^T pi = 0, by inverse iteration on L^T near 0.
std::vector<double> invariant_measure(const CMatrix& L);

struct PerturbativeResult {
  std::vector<double> pi_hat;
  double gap = 0.0;    // max |pi_hat - pi| against invariant_measure
  double rcond = 0.0;  // reciprocal condition estimate of I - Lbar/(mn)
};
PerturbativeResult invariant_perturbative(const GeneratorSample& sample, const LawStats& stats);

double tv_uniform(const std::vector<double>& pi);

struct SmallSvReport {
  double frac_quasi = 0.0;
  double frac_moderate = 0.0;
  double min_sn = 0.0;
  std::size_t replicas = 0;
  std::size_t pairs = 0;
  std::vector<double> sn;  // s_n per replica
};
// c0 = 1/(4 sqrt 2); u(n) = n/(log n)^5 floored at 10.
SmallSvReport small_sv_report(const EntryLaw& law, std::size_t n, cplx z, std::size_t replicas,
                              std::uint64_t seed, unsigned jobs = 1);

struct ConcentrationResult {
  double value = 0.0;
  double std_error = 0.0;  // binomial error of the winning disk; the max adds upward bias
  std::size_t centers = 0;
};
// Estimates max_w P(|sum X_i x_i - w| <= t) from `trials` draws. Candidate centres
// are sample points thinned to one per cell of side t/resolution.
ConcentrationResult concentration_fn(const std::vector<cplx>& x, const EntryLaw& law, double t,
                                     std::size_t trials, double resolution, std::uint64_t seed);

// l2 norm of x without its floor(delta n) largest coordinates.
double dist_to_sparse(const std::vector<cplx>& x, double delta);
// Membership in Comp(delta, rho); the complement is Incomp(delta, rho).
inline bool is_compressible(const std::vector<cplx>& x, double delta, double rho) {
  return dist_to_sparse(x, delta) <= rho;
}

}  // namespace rmg
