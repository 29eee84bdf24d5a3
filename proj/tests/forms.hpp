#pragma once

// Three-form generators shared by the unit and acceptance tests.
#include "npk/threeform.hpp"
#include "support.hpp"

namespace npk::testing {

inline PseudoFrame adapted(const std::vector<int>& half) {
  PseudoFrame f;
  f.adapted = true;
  f.eps = half;
  f.eps.insert(f.eps.end(), half.begin(), half.end());
  return f;
}

template <class F>
ThreeForm<F> empty_form(const PseudoFrame& f) {
  ThreeForm<F> t;
  t.frame = f;
  t.g = frame_metric<F>(f);
  t.J = standard_J<F>(f.complex_dim());
  t.eta = Tensor<F>(3, f.dim(), SymmetryClass::Alternating);
  return t;
}

// eta(u,v,w) for vectors in frame coordinates.
template <class F>
F eval(const Tensor<F>& eta, const Vec<F>& u, const Vec<F>& v, const Vec<F>& w) {
  const int n = eta.dim();
  F s(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (u[a] != 0 && v[b] != 0 && w[c] != 0) s += u[a] * v[b] * w[c] * eta(a, b, c);
  return s;
}

// Random alternating form projected onto the forms with
// eta(JX,JY,Z) = -eta(X,Y,Z).
inline ThreeForm<Rational> random_type_form(Rng& rng, const PseudoFrame& f) {
  const int n = f.dim();
  auto t = empty_form<Rational>(f);
  Tensor<Rational> raw(3, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        Rational v = rng.integer(0, 2) ? rng.rational(4, 3) : Rational(0);
        raw(a, b, c) = raw(b, c, a) = raw(c, a, b) = v;
        raw(b, a, c) = raw(a, c, b) = raw(c, b, a) = -v;
      }
  const auto& J = t.J;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        auto ea = unit<Rational>(n, a), eb = unit<Rational>(n, b), ec = unit<Rational>(n, c);
        auto ja = J * ea, jb = J * eb, jc = J * ec;
        t.eta(a, b, c) = (raw(a, b, c) - eval(raw, ja, jb, ec) - eval(raw, ja, eb, jc) - eval(raw, ea, jb, jc)) / 4;
      }
  return t;
}

// The same form written in the frame given by the columns of P.
inline ThreeForm<Rational> transformed(const ThreeForm<Rational>& t, const Mat<Rational>& P) {
  ThreeForm<Rational> out = t;
  out.eta = change_basis(t.eta, P);
  return out;
}

}  // namespace npk::testing
