#include "npk/frame.hpp"

#include <Eigen/Dense>

namespace npk {

Signature PseudoFrame::signature() const {
  Signature s;
  for (int e : eps) (e > 0 ? s.p : s.q)++;
  return s;
}

namespace {

template <class F>
Signature exact_signature(const Mat<F>& g) {
  // Symmetric elimination (congruence) keeps the inertia.
  Mat<F> a = g;
  const int n = a.rows();
  Signature s;
  std::vector<char> done(n, 0);
  for (int step = 0; step < n; ++step) {
    int piv = -1;
    for (int i = 0; i < n; ++i)
      if (!done[i] && a(i, i) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) {
      // all remaining diagonal entries vanish: mix in an off-diagonal partner
      int pi = -1, pj = -1;
      for (int i = 0; i < n && pi < 0; ++i)
        for (int j = i + 1; j < n; ++j)
          if (!done[i] && !done[j] && a(i, j) != 0) {
            pi = i, pj = j;
            break;
          }
      if (pi < 0) throw Error(ErrorKind::DegenerateMetric, "metric is degenerate");
      for (int k = 0; k < n; ++k) a(pi, k) += a(pj, k);
      for (int k = 0; k < n; ++k) a(k, pi) += a(k, pj);
      piv = pi;
    }
    F d = a(piv, piv);
    (sgn(d) > 0 ? s.p : s.q)++;
    done[piv] = 1;
    for (int i = 0; i < n; ++i) {
      if (done[i] || a(i, piv) == 0) continue;
      F f = a(i, piv) / d;
      for (int k = 0; k < n; ++k) a(i, k) -= f * a(piv, k);
      for (int k = 0; k < n; ++k) a(k, i) -= f * a(k, piv);
    }
  }
  return s;
}

}  // namespace

template <class F>
Signature gram_check(const Mat<F>& g, double tol) {
  if (!g.square()) throw Error(ErrorKind::ShapeMismatch, "metric is not square");
  const int n = g.rows();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!is_zero(F(g(i, j) - g(j, i)), tol * std::max(1.0, max_abs(g))))
        throw Error(ErrorKind::ShapeMismatch, "metric is not symmetric");
  if constexpr (FieldTraits<F>::exact) {
    return exact_signature(g);
  } else {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = g(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    Signature s;
    for (int i = 0; i < n; ++i) {
      double ev = es.eigenvalues()(i);
      if (std::abs(ev) <= tol * scale) throw Error(ErrorKind::DegenerateMetric, "metric is degenerate");
      (ev > 0 ? s.p : s.q)++;
    }
    return s;
  }
}

template <class F>
ComplexCheck check_complex_structure(const Mat<F>& J, const Mat<F>& g, double tol) {
  if (!J.square() || J.rows() != g.rows()) throw Error(ErrorKind::ShapeMismatch, "J shape");
  ComplexCheck c;
  const int n = J.rows();
  c.square_residual = max_abs(Mat<F>(J * J + Mat<F>::identity(n)));
  c.compat_residual = max_abs(Mat<F>(J.transpose() * g * J - g));
  if constexpr (FieldTraits<F>::exact) c.ok = c.square_residual == 0 && c.compat_residual == 0;
  else c.ok = c.square_residual <= tol && c.compat_residual <= tol * std::max(1.0, max_abs(g));
  return c;
}

template <class F>
AdaptedFrame<F> adapt_frame(const Mat<F>& g, const Mat<F>& J, double tol) {
  gram_check(g, tol);
  auto cc = check_complex_structure(J, g, tol);
  if (!cc.ok) throw Error(ErrorKind::PreconditionFailed, "J is not a g-compatible complex structure");
  const int dim = g.rows();
  if (dim % 2) throw Error(ErrorKind::ShapeMismatch, "odd dimension");
  const int n = dim / 2;
  const double scale = std::max(1.0, max_abs(g));

  std::vector<Vec<F>> work;
  for (int i = 0; i < dim; ++i) work.push_back(unit<F>(dim, i));

  std::vector<Vec<F>> first, second;
  std::vector<int> eps;
  for (int step = 0; step < n; ++step) {
    // Pivot: largest |g(v,v)|; exact mode prefers norms with a rational root.
    int best = -1;
    double best_abs = 0;
    bool best_square = false;
    for (size_t i = 0; i < work.size(); ++i) {
      F nv = bilinear(g, work[i], work[i]);
      if (is_zero(nv, tol * scale)) continue;
      double a = std::abs(to_double(nv));
      bool square = true;
      if constexpr (FieldTraits<F>::exact) square = FieldTraits<F>::sqrt(F(abs(nv))).has_value();
      if (best < 0 || (square && !best_square) || (square == best_square && a > best_abs * (1 + 1e-12))) {
        best = static_cast<int>(i), best_abs = a, best_square = square;
      }
    }
    Vec<F> v;
    if (best >= 0) {
      v = work[best];
    } else {
      for (size_t i = 0; i < work.size() && v.empty(); ++i)
        for (size_t j = i + 1; j < work.size(); ++j)
          if (!is_zero(bilinear(g, work[i], work[j]), tol * scale)) {
            v = work[i];
            for (int k = 0; k < dim; ++k) v[k] += work[j][k];
            break;
          }
      if (v.empty()) throw Error(ErrorKind::NullPivotExhausted, "remaining subspace is totally null");
    }
    F nv = bilinear(g, v, v);
    int e = sign_of(nv, tol * scale);
    auto root = FieldTraits<F>::sqrt(e > 0 ? nv : F(-nv));
    if (!root) throw Error(ErrorKind::IrrationalValue, "normalization needs an irrational square root");
    for (auto& x : v) x /= *root;
    Vec<F> jv = J * v;
    first.push_back(v);
    second.push_back(jv);
    eps.push_back(e);

    std::vector<Vec<F>> next;
    for (auto w : work) {
      F a = bilinear(g, w, v), b = bilinear(g, w, jv);
      for (int k = 0; k < dim; ++k) w[k] -= F(e) * (a * v[k] + b * jv[k]);
      if (max_abs(w) <= tol) continue;
      next.push_back(w);
      if (span_rank(next, dim, tol) < static_cast<int>(next.size())) next.pop_back();
    }
    work = std::move(next);
  }

  AdaptedFrame<F> out;
  out.frame.adapted = true;
  out.frame.eps = eps;
  out.frame.eps.insert(out.frame.eps.end(), eps.begin(), eps.end());
  std::vector<Vec<F>> cols = first;
  cols.insert(cols.end(), second.begin(), second.end());
  out.basis = Mat<F>::from_columns(cols, dim);
  return out;
}

template Signature gram_check(const Mat<double>&, double);
template Signature gram_check(const Mat<Rational>&, double);
template ComplexCheck check_complex_structure(const Mat<double>&, const Mat<double>&, double);
template ComplexCheck check_complex_structure(const Mat<Rational>&, const Mat<Rational>&, double);
template AdaptedFrame<double> adapt_frame(const Mat<double>&, const Mat<double>&, double);
template AdaptedFrame<Rational> adapt_frame(const Mat<Rational>&, const Mat<Rational>&, double);

}  // namespace npk
