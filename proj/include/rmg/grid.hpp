#pragma once

#include <cstddef>

#include "rmg/common.hpp"

namespace rmg {

// Rectangular grid of nodes in the complex plane, nodes_re x nodes_im,
// endpoints included. Node (i, j) sits at re_min + i*step_re(), im_min + j*step_im().
struct GridSpec {
  double re_min = -2.0;
  double re_max = 2.0;
  double im_min = -2.0;
  double im_max = 2.0;
  std::size_t nodes_re = 41;
  std::size_t nodes_im = 41;

  static GridSpec square(double lo, double hi, std::size_t nodes) {
    return {lo, hi, lo, hi, nodes, nodes};
  }
  void validate() const;
  std::size_t size() const { return nodes_re * nodes_im; }
  double step_re() const { return (re_max - re_min) / static_cast<double>(nodes_re - 1); }
  double step_im() const { return (im_max - im_min) / static_cast<double>(nodes_im - 1); }
  double re(std::size_t i) const { return re_min + static_cast<double>(i) * step_re(); }
  double im(std::size_t j) const { return im_min + static_cast<double>(j) * step_im(); }
  // Flat index, real axis fastest.
  std::size_t index(std::size_t i, std::size_t j) const { return j * nodes_re + i; }
  cplx node(std::size_t k) const { return {re(k % nodes_re), im(k / nodes_re)}; }
  bool operator==(const GridSpec&) const = default;
};

}  // namespace rmg
