#pragma once

#include <cstdint>
#include <iosfwd>

#include "rmg/common.hpp"
#include "rmg/entry_laws.hpp"

namespace rmg {

struct GeneratorSample {
  std::size_t n = 0;
  CMatrix X;
  CVector D;  // row sums of X
  CMatrix L;  // X - delta * diag(D)
  double delta = 1.0;
  std::uint64_t seed = 0;
  EntryLaw law;
};

// Entries of X are drawn row by row from one stream seeded with `seed`.
// Degenerate laws are rejected unless the law is Constant.
GeneratorSample sample_generator(const EntryLaw& law, std::size_t n, double delta,
                                 std::uint64_t seed);
// Builds D and L from an explicit X (tests, hand-made chains).
GeneratorSample generator_from_matrix(const CMatrix& X, double delta = 1.0);

// (L + delta*n*m*I) / (sigma*sqrt(n)); equals (L + n m I)/(sigma sqrt n) at delta = 1.
CMatrix rescale(const GeneratorSample& sample, const LawStats& stats);

struct Centered {
  CMatrix X;
  CVector D;
  CMatrix L;
};
// X - mJ, D - nm, X_c - delta * D_c.
Centered center(const GeneratorSample& sample, const LawStats& stats);

// Debug dump: header "row,col,re,im".
void write_matrix_csv(std::ostream& out, const CMatrix& A);

}  // namespace rmg
