#pragma once

#include <string>

#include "npk/matrix.hpp"

namespace npk {

struct Signature {
  int p = 0, q = 0;
  int dim() const { return p + q; }
  std::string str() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
  friend bool operator==(const Signature& a, const Signature& b) { return a.p == b.p && a.q == b.q; }
};

// Orthonormal frame data: eps[i] = g(e_i, e_i). An adapted frame of real
// dimension 2n is ordered e_1..e_n, Je_1..Je_n.
struct PseudoFrame {
  std::vector<int> eps;
  bool adapted = false;
  int dim() const { return static_cast<int>(eps.size()); }
  int complex_dim() const { return dim() / 2; }
  Signature signature() const;
};

template <class F>
Mat<F> frame_metric(const PseudoFrame& f) {
  Mat<F> g(f.dim(), f.dim());
  for (int i = 0; i < f.dim(); ++i) g(i, i) = F(f.eps[i]);
  return g;
}

// J e_i = e_{i+n}, J e_{i+n} = -e_i.
template <class F>
Mat<F> standard_J(int n) {
  Mat<F> J(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    J(n + i, i) = F(1);
    J(i, n + i) = F(-1);
  }
  return J;
}

// Symmetric and nondegenerate; returns the signature. Throws DegenerateMetric.
template <class F>
Signature gram_check(const Mat<F>& g, double tol = 1e-12);

struct ComplexCheck {
  double square_residual = 0;  // |J^2 + 1|
  double compat_residual = 0;  // |g(J., J.) - g|
  bool ok = false;
};

template <class F>
ComplexCheck check_complex_structure(const Mat<F>& J, const Mat<F>& g, double tol = 1e-12);

template <class F>
struct AdaptedFrame {
  PseudoFrame frame;
  Mat<F> basis;  // columns are the frame vectors in input coordinates
};

// Gram-Schmidt adapted to J. The exact backend needs |g(v,v)| to be a
// rational square at each pivot and throws IrrationalValue otherwise.
template <class F>
AdaptedFrame<F> adapt_frame(const Mat<F>& g, const Mat<F>& J, double tol = 1e-12);

}  // namespace npk
