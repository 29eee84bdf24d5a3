#include "npk/curvature.hpp"

#include <random>

namespace npk {

namespace {

template <class F>
F frac(long p, long q) { return from_rational<F>(Rational(p, q)); }

template <class F>
Tensor<F> lincomb(const std::vector<std::pair<F, const Tensor<F>*>>& terms) {
  Tensor<F> out(terms.front().second->rank(), terms.front().second->dim());
  for (const auto& [c, t] : terms)
    for (size_t i = 0; i < out.size(); ++i) out.flat(i) += c * t->flat(i);
  return out;
}

template <class F>
std::vector<int> witness_of(const Tensor<F>& t, size_t pos) {
  auto idx = t.index_of(pos);
  return std::vector<int>(idx.begin(), idx.begin() + t.rank());
}

template <class F>
IdentityReport zero_report(const Tensor<F>& d, double scale, const std::string& name, const std::string& anchor,
                           double tol) {
  Residual<F> res(scale);
  for (size_t i = 0; i < d.size(); ++i)
    if (!is_zero(d.flat(i), 0.0)) res.add(d.flat(i), witness_of(d, i));
  return res.report(name, anchor, tol);
}

template <class F>
IdentityReport zero_report(const Mat<F>& d, double scale, const std::string& name, const std::string& anchor,
                           double tol) {
  Residual<F> res(scale);
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (!is_zero(d(i, j), 0.0)) res.add(d(i, j), {i, j});
  return res.report(name, anchor, tol);
}

template <class F>
Mat<F> as_matrix(const Tensor<F>& t) {
  Mat<F> m(t.dim(), t.dim());
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) m(i, j) = t(i, j);
  return m;
}

// Endomorphism E with g(E X, Y) = b(X, Y).
template <class F>
Mat<F> raise(const Mat<F>& b, const Mat<F>& ginv) { return ginv * b.transpose(); }

// Residuals are divided by the largest input magnitude so that pass/fail does
// not depend on an overall rescaling of the metric.
template <class F>
double point_scale(const CurvaturePoint<F>& cp) {
  double dj = 0;
  for (const auto& m : cp.DJ) dj = std::max(dj, max_abs(m));
  double s = std::max(max_abs(cp.R), dj * dj * max_abs(cp.g));
  return s > 0 ? s : 1.0;
}

template <class F>
Mat<F> inverse_metric(const CurvaturePoint<F>& cp) {
  if (!cp.frame.eps.empty()) return frame_metric<F>(cp.frame);
  return inverse(cp.g);
}

}  // namespace

template <class F>
Tensor<F> permute_slots(const Tensor<F>& t, const std::array<int, 4>& p) {
  Tensor<F> out(4, t.dim());
  for (size_t pos = 0; pos < out.size(); ++pos) {
    auto i = out.index_of(pos);
    out.flat(pos) = t(i[p[0]], i[p[1]], i[p[2]], i[p[3]]);
  }
  return out;
}

template <class F>
Tensor<F> apply_j(const Tensor<F>& t, const Mat<F>& J, std::initializer_list<int> slots) {
  const int n = t.dim();
  Tensor<F> cur = t;
  for (int s : slots) {
    Tensor<F> next(t.rank(), n);
    for (size_t pos = 0; pos < next.size(); ++pos) {
      auto idx = next.index_of(pos);
      const int x = idx[s];
      F sum(0);
      for (int a = 0; a < n; ++a) {
        if (J(a, x) == 0) continue;
        idx[s] = a;
        sum += J(a, x) * cur.at(idx);
      }
      next.flat(pos) = sum;
    }
    cur = std::move(next);
  }
  return cur;
}

template <class F>
Tensor<F> cyclic_123(const Tensor<F>& t) {
  Tensor<F> a = permute_slots(t, {0, 2, 3, 1});
  Tensor<F> b = permute_slots(t, {0, 3, 1, 2});
  return lincomb<F>({{F(1), &t}, {F(1), &a}, {F(1), &b}});
}

template <class F>
void require_complete(const CurvaturePoint<F>& cp) {
  const int n = cp.g.rows();
  if (n == 0) throw Error(ErrorKind::MissingField, "metric");
  if (cp.J.rows() == 0) throw Error(ErrorKind::MissingField, "J");
  if (cp.DJ.empty()) throw Error(ErrorKind::MissingField, "nabla J");
  if (cp.R.rank() == 0) throw Error(ErrorKind::MissingField, "curvature");
  if (!cp.g.square() || cp.J.rows() != n || cp.J.cols() != n)
    throw Error(ErrorKind::ShapeMismatch, "metric and J must be n x n");
  if (static_cast<int>(cp.DJ.size()) != n) throw Error(ErrorKind::ShapeMismatch, "nabla J needs n matrices");
  for (const auto& m : cp.DJ)
    if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::ShapeMismatch, "nabla J matrix shape");
  if (cp.R.rank() != 4 || cp.R.dim() != n) throw Error(ErrorKind::ShapeMismatch, "curvature must be a 4-tensor");
  if (cp.D2J) {
    if (static_cast<int>(cp.D2J->size()) != n) throw Error(ErrorKind::ShapeMismatch, "second derivative rows");
    for (const auto& row : *cp.D2J) {
      if (static_cast<int>(row.size()) != n) throw Error(ErrorKind::ShapeMismatch, "second derivative columns");
      for (const auto& m : row)
        if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::ShapeMismatch, "second derivative shape");
    }
  }
  if (!cp.frame.eps.empty() && cp.frame.dim() != n) throw Error(ErrorKind::ShapeMismatch, "frame length");
}

template <class F>
std::vector<IdentityReport> point_invariants(const CurvaturePoint<F>& cp, double tol) {
  require_complete(cp);
  const int n = cp.dim();
  const double scale = point_scale(cp);
  std::vector<IdentityReport> out;

  auto cc = check_complex_structure(cp.J, cp.g, tol);
  {
    IdentityReport r;
    r.name = "almost Hermitian";
    r.anchor = "J^2 = -1 and g(JX,JY) = g(X,Y)";
    r.residual = std::max(cc.square_residual, cc.compat_residual);
    r.tol = tol;
    r.pass = cc.ok;
    out.push_back(r);
  }

  const Tensor<F>& R = cp.R;
  Tensor<F> swap01 = permute_slots(R, {1, 0, 2, 3});
  Tensor<F> swap23 = permute_slots(R, {0, 1, 3, 2});
  Tensor<F> pairs = permute_slots(R, {2, 3, 0, 1});
  Tensor<F> anti = lincomb<F>({{F(1), &R}, {F(1), &swap01}});
  Tensor<F> anti2 = lincomb<F>({{F(1), &R}, {F(1), &swap23}});
  for (size_t i = 0; i < anti.size(); ++i)
    if (is_zero(anti.flat(i), 0.0)) anti.flat(i) = anti2.flat(i);
  out.push_back(zero_report(anti, scale, "curvature skew pairs", "R(W,X,Y,Z) = -R(X,W,Y,Z) = -R(W,X,Z,Y)", tol));
  out.push_back(zero_report(lincomb<F>({{F(1), &R}, {F(-1), &pairs}}), scale, "curvature pair symmetry",
                            "R(W,X,Y,Z) = R(Y,Z,W,X)", tol));
  Tensor<F> b1 = permute_slots(R, {1, 2, 0, 3});
  Tensor<F> b2 = permute_slots(R, {2, 0, 1, 3});
  out.push_back(zero_report(lincomb<F>({{F(1), &R}, {F(1), &b1}, {F(1), &b2}}), scale, "first Bianchi",
                            "cyclic sum over W,X,Y of R(W,X,Y,Z) vanishes", tol));

  const double djs = std::max(1e-300, std::sqrt(scale / std::max(1e-300, max_abs(cp.g))));
  Residual<F> nk_d(djs), skew_d(djs * max_abs(cp.g)), aj_d(djs);
  for (int x = 0; x < n; ++x) {
    Mat<F> gd = cp.g * cp.DJ[x];
    Mat<F> ac = cp.DJ[x] * cp.J + cp.J * cp.DJ[x];
    for (int a = 0; a < n; ++a)
      for (int y = 0; y < n; ++y) {
        nk_d.add(F(cp.DJ[x](a, y) + cp.DJ[y](a, x)), {x, y, a});
        skew_d.add(F(gd(a, y) + gd(y, a)), {x, a, y});
        aj_d.add(ac(a, y), {x, a, y});
      }
  }
  out.push_back(nk_d.report("nearly Kaehler", "(nabla_X J)Y = -(nabla_Y J)X", tol));
  out.push_back(skew_d.report("nabla J skew", "g((nabla_X J)Y,Z) = -g(Y,(nabla_X J)Z)", tol));
  out.push_back(aj_d.report("nabla J anti-commutes", "(nabla_X J)J = -J(nabla_X J)", tol));
  return out;
}

template <class F>
Tensor<F> identity_curvature(const CurvaturePoint<F>& cp, Convention conv) {
  if (conv == Convention::Standard) return cp.R;
  Tensor<F> out = cp.R;
  for (size_t i = 0; i < out.size(); ++i) out.flat(i) = -out.flat(i);
  return out;
}

template <class F>
Tensor<F> nabla_j_pairing(const CurvaturePoint<F>& cp) {
  const int n = cp.dim();
  std::vector<Mat<F>> gd;
  for (const auto& m : cp.DJ) gd.push_back(cp.g * m);
  Tensor<F> P(4, n);
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) {
          F s(0);
          for (int a = 0; a < n; ++a)
            if (cp.DJ[w](a, x) != 0) s += cp.DJ[w](a, x) * gd[y](a, z);
          P(w, x, y, z) = s;
        }
  return P;
}

template <class F>
std::vector<IdentityReport> gray_identities(const CurvaturePoint<F>& cp, Convention conv, double tol) {
  require_complete(cp);
  const double scale = point_scale(cp);
  Tensor<F> Rp = identity_curvature(cp, conv);
  Tensor<F> P = nabla_j_pairing(cp);
  std::vector<IdentityReport> out;

  Tensor<F> rjj = apply_j(Rp, cp.J, {2, 3});
  out.push_back(zero_report(lincomb<F>({{F(1), &Rp}, {F(-1), &rjj}, {F(-1), &P}}), scale, "gray identity 1",
                            "R(W,X,Y,Z) - R(W,X,JY,JZ) = g((nabla_W J)X,(nabla_Y J)Z)", tol));

  // The second identity has W in two slots; it is checked in polarized form,
  // symmetrized over the two copies of W.
  Tensor<F> rj13 = apply_j(Rp, cp.J, {1, 3});
  Tensor<F> t1 = permute_slots(Rp, {0, 2, 1, 3});
  Tensor<F> t2 = permute_slots(rj13, {0, 2, 1, 3});
  Tensor<F> p2 = permute_slots(P, {0, 2, 1, 3});
  Tensor<F> q = lincomb<F>({{F(1), &t1}, {F(1), &t2}, {F(-1), &rj13}, {F(-2), &p2}});
  Tensor<F> qs = permute_slots(q, {1, 0, 2, 3});
  out.push_back(zero_report(lincomb<F>({{F(1), &q}, {F(1), &qs}}), scale, "gray identity 2",
                            "R(W,X,W,Z) + R(W,JX,W,JZ) - R(W,JW,X,JZ) = 2 g((nabla_W J)X,(nabla_W J)Z)", tol));

  Tensor<F> rjjjj = apply_j(Rp, cp.J, {0, 1, 2, 3});
  out.push_back(zero_report(lincomb<F>({{F(1), &Rp}, {F(-1), &rjjjj}}), scale, "gray identity 3",
                            "R(W,X,Y,Z) = R(JW,JX,JY,JZ)", tol));
  for (auto& r : out) r.values["convention"] = to_string(conv);
  return out;
}

template <class F>
RicciPair<F> ricci_pair(const CurvaturePoint<F>& cp, Convention conv, double tol) {
  require_complete(cp);
  const double scale = point_scale(cp);
  const Mat<F> ginv = inverse_metric(cp);
  Tensor<F> Rp = identity_curvature(cp, conv);
  Tensor<F> P = nabla_j_pairing(cp);

  RicciPair<F> out;
  out.ric_cov = as_matrix(contract(Rp, 1, 3, ginv));
  out.ric_star_cov = frac<F>(1, 2) * as_matrix(contract(apply_j(Rp, cp.J, {1, 3}), 2, 3, ginv));
  out.r_cov = out.ric_cov - out.ric_star_cov;
  out.r_nabla_cov = as_matrix(contract(P, 1, 3, ginv));
  out.ric = raise(out.ric_cov, ginv);
  out.ric_star = raise(out.ric_star_cov, ginv);
  out.r = raise(out.r_cov, ginv);
  out.routes = zero_report(out.r_cov - out.r_nabla_cov, scale, "r routes",
                           "Ric - Ric* equals the trace of g((nabla_X J).,(nabla_Y J).)", tol);
  Mat<F> c1 = commutator(cp.J, out.ric), c2 = commutator(cp.J, out.ric_star);
  Mat<F> both(c1.rows(), 2 * c1.cols());
  for (int i = 0; i < c1.rows(); ++i)
    for (int j = 0; j < c1.cols(); ++j) both(i, j) = c1(i, j), both(i, j + c1.cols()) = c2(i, j);
  out.j_commuting = zero_report(both, scale, "Ricci J-commuting", "Ric and Ric* commute with J", tol);
  return out;
}

template <class F>
CanonicalCurvature<F> canonical_curvature(const CurvaturePoint<F>& cp, Convention conv, double tol) {
  require_complete(cp);
  const double scale = point_scale(cp);
  Tensor<F> Rp = identity_curvature(cp, conv);
  Tensor<F> P = nabla_j_pairing(cp);

  CanonicalCurvature<F> out;
  Tensor<F> pa = permute_slots(P, {0, 2, 1, 3});
  Tensor<F> pb = permute_slots(P, {0, 3, 1, 2});
  out.rbar = lincomb<F>({{F(1), &Rp}, {frac<F>(-1, 2), &P}, {frac<F>(1, 4), &pa}, {frac<F>(-1, 4), &pb}});
  const Tensor<F>& rb = out.rbar;

  Tensor<F> rjj = apply_j(Rp, cp.J, {2, 3});
  Tensor<F> cyc = cyclic_123(rjj);
  Tensor<F> rb2 = lincomb<F>({{frac<F>(3, 4), &Rp}, {frac<F>(1, 4), &rjj}, {frac<F>(1, 4), &cyc}});
  out.reports.push_back(zero_report(lincomb<F>({{F(1), &rb}, {F(-1), &rb2}}), scale, "canonical curvature routes",
                                    "the nabla J expression equals (3R + R(.,.,J,J) + cyclic sum)/4", tol));

  // 4 Rbar(W,JW,Y,JZ) = 5 R(W,JW,Y,JZ) - R(W,Y,W,Z) - R(W,JY,W,JZ), polarized in W.
  Tensor<F> rbj = apply_j(rb, cp.J, {1, 3});
  Tensor<F> rj = apply_j(Rp, cp.J, {1, 3});
  Tensor<F> t1 = permute_slots(Rp, {0, 2, 1, 3});
  Tensor<F> t2 = permute_slots(rj, {0, 2, 1, 3});
  Tensor<F> s = lincomb<F>({{F(4), &rbj}, {F(-5), &rj}, {F(1), &t1}, {F(1), &t2}});
  Tensor<F> ss = permute_slots(s, {1, 0, 2, 3});
  out.reports.push_back(zero_report(lincomb<F>({{F(1), &s}, {F(1), &ss}}), scale, "canonical curvature on J-pairs",
                                    "4Rbar(W,JW,Y,JZ) = 5R(W,JW,Y,JZ) - R(W,Y,W,Z) - R(W,JY,W,JZ)", tol));

  Tensor<F> pair = permute_slots(rb, {2, 3, 0, 1});
  out.reports.push_back(zero_report(lincomb<F>({{F(1), &rb}, {F(-1), &pair}}), scale,
                                    "canonical curvature pair symmetry", "Rbar(W,X,Y,Z) = Rbar(Y,Z,W,X)", tol));

  Tensor<F> j01 = apply_j(rb, cp.J, {0, 1});
  Tensor<F> j23 = apply_j(rb, cp.J, {2, 3});
  Tensor<F> d1 = lincomb<F>({{F(1), &rb}, {F(-1), &j01}});
  Tensor<F> d2 = lincomb<F>({{F(1), &rb}, {F(-1), &j23}});
  for (size_t i = 0; i < d1.size(); ++i)
    if (is_zero(d1.flat(i), 0.0)) d1.flat(i) = d2.flat(i);
  out.reports.push_back(zero_report(d1, scale, "canonical curvature J-invariance",
                                    "Rbar(JW,JX,Y,Z) = Rbar(W,X,JY,JZ) = Rbar(W,X,Y,Z)", tol));

  Tensor<F> cr = cyclic_123(rb);
  Tensor<F> cp_ = cyclic_123(P);
  out.reports.push_back(zero_report(lincomb<F>({{F(1), &cr}, {F(1), &cp_}}), scale, "Bianchi with torsion",
                                    "cyclic sum of Rbar equals minus the cyclic sum of g((nabla J).,(nabla J).)",
                                    tol));
  for (auto& r : out.reports) r.values["convention"] = to_string(conv);
  return out;
}

template <class F>
IdentityReport thm_curv_identity(const CurvaturePoint<F>& cp, Convention conv, double tol) {
  require_complete(cp);
  const Mat<F> ginv = inverse_metric(cp);
  Tensor<F> Rp = identity_curvature(cp, conv);
  Tensor<F> P = nabla_j_pairing(cp);
  Mat<F> r_cov = as_matrix(contract(P, 1, 3, ginv));
  Mat<F> rup = ginv * r_cov * ginv;

  Tensor<F> rj = apply_j(Rp, cp.J, {2, 3});
  Tensor<F> T = lincomb<F>({{F(1), &Rp}, {F(-5), &rj}});
  Tensor<F> S = contract(T, 1, 3, rup);
  double scale = point_scale(cp) * std::max(max_abs(rup), 1e-300);
  IdentityReport rep = zero_report(S, scale, "r-curvature trace",
                                   "sum r^{ij} [R(W,e_i,X,e_j) - 5R(W,e_i,JX,Je_j)] = 0", tol);
  rep.values["convention"] = to_string(conv);
  return rep;
}

template <class F>
std::vector<IdentityReport> second_derivative_identities(const CurvaturePoint<F>& cp, Convention conv, double tol) {
  require_complete(cp);
  std::vector<IdentityReport> out(2);
  out[0].name = "second derivative of J";
  out[0].anchor = "2g((nabla^2_{W,X} J)Y,Z) = -cyclic_{XYZ} g((nabla_W J)X,(nabla_Y J)JZ)";
  out[1].name = "trace of second derivative";
  out[1].anchor = "sum g^{ij} nabla^2_{e_i,e_j} J = -r J";
  if (!cp.D2J) {
    for (auto& r : out) {
      r.skipped = true;
      r.tol = tol;
      r.note = "second derivatives not supplied";
    }
    return out;
  }
  (void)conv;  // both relations are convention free
  const int n = cp.dim();
  const Mat<F> ginv = inverse_metric(cp);
  const auto& D2 = *cp.D2J;
  Tensor<F> P = nabla_j_pairing(cp);
  Tensor<F> q2 = apply_j(P, cp.J, {3});
  Tensor<F> cyc = cyclic_123(q2);
  Tensor<F> lhs(4, n);
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x) {
      Mat<F> gd = cp.g * D2[w][x];
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) lhs(w, x, y, z) = F(2) * gd(z, y);
    }
  double d2s = 0;
  for (const auto& row : D2)
    for (const auto& m : row) d2s = std::max(d2s, max_abs(m));
  const double scale = std::max(point_scale(cp), d2s * max_abs(cp.g));
  out[0] = zero_report(lincomb<F>({{F(1), &lhs}, {F(1), &cyc}}), scale, out[0].name, out[0].anchor, tol);

  Mat<F> tr(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (ginv(i, j) != 0) tr += ginv(i, j) * D2[i][j];
  Mat<F> r_endo = ginv * as_matrix(contract(P, 1, 3, ginv));
  out[1] = zero_report(tr + r_endo * cp.J, scale, out[1].name, out[1].anchor, tol);
  return out;
}

template <class F>
ConstantType<F> constant_type(const CurvaturePoint<F>& cp, double tol, unsigned seed) {
  require_complete(cp);
  const int n = cp.dim();
  const double scale = point_scale(cp);
  Tensor<F> P = nabla_j_pairing(cp);
  const Mat<F>& g = cp.g;
  const Mat<F> om = g * cp.J;  // om(a,b) = g(e_a, J e_b)
  Tensor<F> T(4, n);
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          T(w, x, y, z) = g(w, y) * g(x, z) - g(w, z) * g(x, y) - om(w, y) * om(x, z) + om(w, z) * om(x, y);

  ConstantType<F> out;
  if constexpr (FieldTraits<F>::exact) {
    for (size_t i = 0; i < T.size(); ++i)
      if (T.flat(i) != 0) {
        out.alpha = P.flat(i) / T.flat(i);
        break;
      }
  } else {
    double num = 0, den = 0;
    for (size_t i = 0; i < T.size(); ++i) num += P.flat(i) * T.flat(i), den += T.flat(i) * T.flat(i);
    out.alpha = den > 0 ? num / den : 0.0;
  }
  Tensor<F> aT = T;
  for (size_t i = 0; i < aT.size(); ++i) aT.flat(i) *= out.alpha;
  out.polarized = zero_report(lincomb<F>({{F(1), &P}, {F(-1), &aT}}), scale, "constant type",
                              "g((nabla_W J)X,(nabla_Y J)Z) = alpha times the polarized Hermitian form", tol);
  out.polarized.values["alpha"] = FieldTraits<F>::exact ? format_rational(Rational(out.alpha))
                                                        : std::to_string(to_double(out.alpha));

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(-4, 4);
  Residual<F> sres(scale);
  for (int trial = 0; trial < 32; ++trial) {
    Vec<F> X(n), Y(n);
    for (int i = 0; i < n; ++i) X[i] = F(pick(rng)), Y[i] = F(pick(rng));
    Mat<F> DX(n, n);
    for (int i = 0; i < n; ++i)
      if (X[i] != 0) DX += X[i] * cp.DJ[i];
    Vec<F> v = DX * Y;
    Vec<F> JY = cp.J * Y;
    F lhs = bilinear(g, v, v);
    F gxy = bilinear(g, X, Y), gxjy = bilinear(g, X, JY);
    F rhs = out.alpha * (bilinear(g, X, X) * bilinear(g, Y, Y) - gxy * gxy - gxjy * gxjy);
    const double mag = std::max(1.0, max_abs(X) * max_abs(X) * max_abs(Y) * max_abs(Y) * n * n);
    sres.add_double(std::abs(to_double(F(lhs - rhs))) / mag, {trial});
  }
  out.sampled = sres.report("constant type (sampled)", "|(nabla_X J)Y|^2 = alpha(|X|^2|Y|^2 - g(X,Y)^2 - g(X,JY)^2)",
                            tol);
  out.sampled.note = "seed " + std::to_string(seed);

  out.signature = gram_check(g, tol);
  const int sa = sign_of(out.alpha, tol * scale);
  const int pq = out.signature.p - out.signature.q;
  const int spq = (pq > 0) - (pq < 0);
  out.sign_rule.name = "constant type sign";
  out.sign_rule.anchor = "sign(alpha) = sign(p - q)";
  out.sign_rule.tol = tol;
  out.sign_rule.pass = sa == spq && sa != 0;
  out.sign_rule.residual = out.sign_rule.pass ? 0.0 : 1.0;
  out.sign_rule.values["alpha_sign"] = std::to_string(sa);
  out.sign_rule.values["signature"] = out.signature.str();

  if (!out.polarized.pass) {
    std::string w;
    for (int i : out.polarized.witness) w += std::to_string(i) + " ";
    throw Error(ErrorKind::NotConstantType, "residual " + std::to_string(out.polarized.residual) + " at " + w);
  }
  return out;
}

template <class F>
EinsteinResult<F> einstein_check(const CurvaturePoint<F>& cp, Convention conv, double tol) {
  require_complete(cp);
  const int n = cp.dim();
  const Mat<F> ginv = inverse_metric(cp);
  Mat<F> ric = raise(as_matrix(contract(identity_curvature(cp, conv), 1, 3, ginv)), ginv);
  EinsteinResult<F> out;
  F tr(0);
  for (int i = 0; i < n; ++i) tr += ric(i, i);
  out.lambda = tr / F(n);
  out.report = zero_report(ric - out.lambda * Mat<F>::identity(n), point_scale(cp), "Einstein", "Ric = lambda g",
                           tol);
  out.report.values["lambda"] = FieldTraits<F>::exact ? format_rational(Rational(out.lambda))
                                                      : std::to_string(to_double(out.lambda));
  return out;
}

template <class F>
CurvaturePoint<F> transform_point(const CurvaturePoint<F>& cp, const Mat<F>& B) {
  require_complete(cp);
  const int n = cp.dim();
  const Mat<F> Bi = inverse(B);
  CurvaturePoint<F> out;
  out.label = cp.label;
  out.g = B.transpose() * cp.g * B;
  out.J = Bi * cp.J * B;
  for (int x = 0; x < n; ++x) {
    Mat<F> s(n, n);
    for (int k = 0; k < n; ++k)
      if (B(k, x) != 0) s += B(k, x) * cp.DJ[k];
    out.DJ.push_back(Bi * s * B);
  }
  if (cp.D2J) {
    std::vector<std::vector<Mat<F>>> d2(n);
    for (int w = 0; w < n; ++w)
      for (int x = 0; x < n; ++x) {
        Mat<F> s(n, n);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            F c = B(k, w) * B(l, x);
            if (c != 0) s += c * (*cp.D2J)[k][l];
          }
        d2[w].push_back(Bi * s * B);
      }
    out.D2J = std::move(d2);
  }
  out.R = change_basis(cp.R, B);
  return out;
}

#define NPK_INSTANTIATE(F)                                                                                         \
  template void require_complete(const CurvaturePoint<F>&);                                                        \
  template std::vector<IdentityReport> point_invariants(const CurvaturePoint<F>&, double);                         \
  template Tensor<F> identity_curvature(const CurvaturePoint<F>&, Convention);                                     \
  template Tensor<F> nabla_j_pairing(const CurvaturePoint<F>&);                                                    \
  template std::vector<IdentityReport> gray_identities(const CurvaturePoint<F>&, Convention, double);              \
  template RicciPair<F> ricci_pair(const CurvaturePoint<F>&, Convention, double);                                  \
  template CanonicalCurvature<F> canonical_curvature(const CurvaturePoint<F>&, Convention, double);                \
  template IdentityReport thm_curv_identity(const CurvaturePoint<F>&, Convention, double);                         \
  template std::vector<IdentityReport> second_derivative_identities(const CurvaturePoint<F>&, Convention, double); \
  template ConstantType<F> constant_type(const CurvaturePoint<F>&, double, unsigned);                              \
  template EinsteinResult<F> einstein_check(const CurvaturePoint<F>&, Convention, double);                         \
  template CurvaturePoint<F> transform_point(const CurvaturePoint<F>&, const Mat<F>&);                             \
  template Tensor<F> permute_slots(const Tensor<F>&, const std::array<int, 4>&);                                   \
  template Tensor<F> apply_j(const Tensor<F>&, const Mat<F>&, std::initializer_list<int>);                         \
  template Tensor<F> cyclic_123(const Tensor<F>&);

NPK_INSTANTIATE(double)
NPK_INSTANTIATE(Rational)
#undef NPK_INSTANTIATE

}  // namespace npk
