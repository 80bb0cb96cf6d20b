#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rmg/common.hpp"
#include "rmg/entry_laws.hpp"

namespace rmg {

// Centered Gaussian on R^2 = C with absolute covariance K.
struct GaussianSpec {
  CovK K;
  int rank = 0;
  Eigen::Matrix2d factor = Eigen::Matrix2d::Zero();  // factor * factor^T = K
  Eigen::Vector2d eigenvalues = Eigen::Vector2d::Zero();  // ascending
  Eigen::Matrix2d eigenvectors = Eigen::Matrix2d::Identity();

  // Probability density at w (rank 2 only).
  double density(cplx w) const;
  // Unit direction of the support line (rank 1) as a complex number.
  cplx direction() const;
};

// Eigenvalues below 1e-12 count as zero. The factor is the symmetric square root.
GaussianSpec gaussian_spec(const CovK& K);

struct Expectation {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
};

struct Accuracy {
  enum class Mode { Quadrature, MonteCarlo };
  Mode mode = Mode::Quadrature;
  std::size_t nodes = 200;     // Gauss-Hermite nodes per axis
  std::size_t trials = 100000;  // Monte Carlo draws
  std::uint64_t seed = 0;

  static Accuracy quadrature(std::size_t nodes = 200) { return {Mode::Quadrature, nodes, 0, 0}; }
  static Accuracy monte_carlo(std::size_t trials, std::uint64_t seed) {
    return {Mode::MonteCarlo, 0, trials, seed};
  }
};

// E[h(G)]. Quadrature: tensor Gauss-Hermite through spec.factor, with the error
// estimated against the half-size rule. Monte Carlo: mean and standard error.
Expectation expect(const GaussianSpec& spec, const std::function<cplx(cplx)>& h,
                   const Accuracy& accuracy = {});

// Probabilists' Gauss-Hermite rule (weight exp(-x^2/2)/sqrt(2 pi)), cached.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& hermite_rule(std::size_t n);

// E[1/|G - z|^2]. +inf for rank 2, and for rank 1 when z lies on the support
// line (then *on_line is set when given).
double expect_inv_abs2(const GaussianSpec& spec, cplx z, bool* on_line = nullptr);

// Quadrature nodes for the law of Delta = G - z, built so that
//   E[F(|Delta|^2)]        ~ sum weight * F(abs2)
//   E[Delta F(|Delta|^2)]  ~ sum moment * F(abs2)
// stay accurate when F has poles at |Delta|^2 = rho for each listed rho.
struct DeltaNode {
  double abs2;
  double weight;
  cplx moment;
};

class DeltaLaw {
 public:
  DeltaLaw(const GaussianSpec& spec, cplx z);

  std::vector<DeltaNode> rule(const std::vector<cplx>& poles) const;

  const GaussianSpec& spec() const { return spec_; }
  cplx z() const { return z_; }
  // Density of G at z (rank 2), i.e. the density of Delta at 0.
  double density_at_origin() const { return p0_; }

 private:
  void build_profile();
  void profile_at(double r, double& mean, cplx& first) const;

  GaussianSpec spec_;
  cplx z_;
  double p0_ = 0.0;
  // rank 1
  double a_ = 0.0, xi0_ = 0.0, d_ = 0.0;
  cplx u_{1.0, 0.0};
  // rank 2 angular profile on Chebyshev panels of width panel_
  double radius_ = 0.0, panel_ = 0.0;
  std::vector<double> prof_mean_;
  std::vector<cplx> prof_first_;
};

}  // namespace rmg
