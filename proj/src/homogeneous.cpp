#include "npk/homogeneous.hpp"

#include <set>

namespace npk {

namespace {

struct Finding {
  ErrorKind kind;
  IdentityReport report;
};

IdentityReport exact_report(const std::string& name, const std::string& anchor, const Rational& worst,
                            std::vector<int> witness) {
  IdentityReport r;
  r.name = name;
  r.anchor = anchor;
  r.residual = std::abs(worst.get_d());
  r.pass = sgn(worst) == 0;
  if (!r.pass) r.witness = std::move(witness);
  return r;
}

// Tracks the first nonzero entry of a family of exact differences.
struct ExactWorst {
  Rational worst = 0;
  std::vector<int> witness;
  void add(const Rational& d, std::vector<int> idx) {
    if (sgn(d) != 0 && abs(d) > abs(worst)) worst = d, witness = std::move(idx);
  }
};

std::vector<Finding> findings(const HomogeneousModel& md) {
  std::vector<Finding> out;
  const int N = md.dim_g();
  if (md.c.rank() != 3) throw Error(ErrorKind::ShapeMismatch, "structure constants must have three indices");
  if (!md.labels.empty() && static_cast<int>(md.labels.size()) != N)
    throw Error(ErrorKind::ShapeMismatch, "basis labels do not match the algebra dimension");
  std::vector<int> seen(N, 0);
  for (int i : md.h) {
    if (i < 0 || i >= N) throw Error(ErrorKind::ShapeMismatch, "h index out of range");
    ++seen[i];
  }
  for (int i : md.m) {
    if (i < 0 || i >= N) throw Error(ErrorKind::ShapeMismatch, "m index out of range");
    ++seen[i];
  }
  for (int i = 0; i < N; ++i)
    if (seen[i] != 1) throw Error(ErrorKind::ShapeMismatch, "h and m must partition the basis");
  const int n = md.dim_m();
  if (md.g.rows() != n || md.g.cols() != n || md.J.rows() != n || md.J.cols() != n)
    throw Error(ErrorKind::ShapeMismatch, "metric and J must be square on m");
  if (md.split) {
    std::vector<int> s(n, 0);
    for (int i : md.split->H) {
      if (i < 0 || i >= n) throw Error(ErrorKind::ShapeMismatch, "H index out of range");
      ++s[i];
    }
    for (int i : md.split->V) {
      if (i < 0 || i >= n) throw Error(ErrorKind::ShapeMismatch, "V index out of range");
      ++s[i];
    }
    for (int i = 0; i < n; ++i)
      if (s[i] != 1) throw Error(ErrorKind::ShapeMismatch, "H and V must partition m");
  }

  const auto& c = md.c;
  ExactWorst anti, jac;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) anti.add(Rational(c(i, j, k) + c(j, i, k)), {i, j, k});
  out.push_back({ErrorKind::JacobiViolation,
                 exact_report("bracket antisymmetry", "[X,Y] = -[Y,X]", anti.worst, anti.witness)});
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      for (int k = j + 1; k < N; ++k)
        for (int t = 0; t < N; ++t) {
          Rational s = 0;
          for (int l = 0; l < N; ++l) s += c(i, j, l) * c(l, k, t) + c(j, k, l) * c(l, i, t) + c(k, i, l) * c(l, j, t);
          jac.add(s, {i, j, k, t});
        }
  out.push_back({ErrorKind::JacobiViolation,
                 exact_report("Jacobi identity", "cyclic sum of [[X,Y],Z] vanishes", jac.worst, jac.witness)});

  std::set<int> hs(md.h.begin(), md.h.end());
  ExactWorst red;
  for (int a : md.h) {
    for (int b : md.h)
      for (int k = 0; k < N; ++k)
        if (!hs.count(k)) red.add(c(a, b, k), {a, b, k});
    for (int x : md.m)
      for (int k = 0; k < N; ++k)
        if (hs.count(k)) red.add(c(a, x, k), {a, x, k});
  }
  out.push_back({ErrorKind::ReductivityViolation,
                 exact_report("reductive split", "[h,h] in h and [h,m] in m", red.worst, red.witness)});

  gram_check(md.g);

  ExactWorst inv_g, inv_j, cx;
  auto R = reductive_data<Rational>(md);
  for (size_t k = 0; k < R.adh.size(); ++k) {
    Mat<Rational> dg = R.adh[k].transpose() * md.g + md.g * R.adh[k];
    Mat<Rational> dj = commutator(R.adh[k], md.J);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        inv_g.add(dg(a, b), {static_cast<int>(k), a, b});
        inv_j.add(dj(a, b), {static_cast<int>(k), a, b});
      }
  }
  out.push_back({ErrorKind::InvarianceViolation,
                 exact_report("invariant metric", "g is ad(h)-invariant", inv_g.worst, inv_g.witness)});
  out.push_back(
      {ErrorKind::InvarianceViolation, exact_report("invariant J", "J commutes with ad(h)", inv_j.worst, inv_j.witness)});
  Mat<Rational> sq = md.J * md.J + Mat<Rational>::identity(n);
  Mat<Rational> comp = md.J.transpose() * md.g * md.J - md.g;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) cx.add(sq(a, b), {a, b}), cx.add(comp(a, b), {a, b});
  out.push_back({ErrorKind::InvarianceViolation,
                 exact_report("almost Hermitian", "J^2 = -1 and g(JX,JY) = g(X,Y)", cx.worst, cx.witness)});
  return out;
}

template <class F>
double endo_scale(const std::vector<Mat<F>>& L) {
  double s = 0;
  for (const auto& m : L) s = std::max(s, max_abs(m));
  return s > 0 ? s * s : 1.0;
}

}  // namespace

std::vector<IdentityReport> model_reports(const HomogeneousModel& model) {
  std::vector<IdentityReport> out;
  for (auto& f : findings(model)) out.push_back(f.report);
  return out;
}

void validate(const HomogeneousModel& model) {
  for (const auto& f : findings(model))
    if (!f.report.pass) {
      std::string w;
      for (int i : f.report.witness) w += " " + std::to_string(i);
      throw Error(f.kind, model.name + ": " + f.report.name + " fails at" + w);
    }
}

template <class F>
Reductive<F> reductive_data(const HomogeneousModel& md) {
  Reductive<F> r;
  const int n = md.dim_m(), nh = static_cast<int>(md.h.size());
  r.n = n;
  r.brm.assign(n, std::vector<Vec<F>>(n, Vec<F>(n, F(0))));
  r.brh.assign(n, std::vector<Vec<F>>(n, Vec<F>(nh, F(0))));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      for (int k = 0; k < n; ++k) r.brm[x][y][k] = from_rational<F>(md.c(md.m[x], md.m[y], md.m[k]));
      for (int k = 0; k < nh; ++k) r.brh[x][y][k] = from_rational<F>(md.c(md.m[x], md.m[y], md.h[k]));
    }
  for (int k = 0; k < nh; ++k) {
    Mat<F> a(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) a(l, j) = from_rational<F>(md.c(md.h[k], md.m[j], md.m[l]));
    r.adh.push_back(a);
  }
  return r;
}

template <class F>
std::vector<Mat<F>> nomizu(const Reductive<F>& red, const Mat<F>& g) {
  const int n = red.n;
  const Mat<F> gi = inverse(g);
  std::vector<Mat<F>> L(n, Mat<F>(n, n));
  const F half = from_rational<F>(Rational(1, 2));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      // 2 g(U(X,Y),Z) = g([Z,X]_m,Y) + g(X,[Z,Y]_m)
      Vec<F> rhs(n, F(0));
      for (int z = 0; z < n; ++z) {
        F s(0);
        for (int a = 0; a < n; ++a) s += g(a, y) * red.brm[z][x][a] + g(x, a) * red.brm[z][y][a];
        rhs[z] = s;
      }
      Vec<F> U = gi * rhs;
      for (int a = 0; a < n; ++a) L[x](a, y) = half * (red.brm[x][y][a] + U[a]);
    }
  return L;
}

template <class F>
std::vector<IdentityReport> nomizu_reports(const Reductive<F>& red, const Mat<F>& g, const std::vector<Mat<F>>& L) {
  const int n = red.n;
  const double scale = std::sqrt(endo_scale(L));
  Residual<F> tor(scale), met(scale * max_abs(g));
  for (int x = 0; x < n; ++x) {
    Mat<F> m = L[x].transpose() * g + g * L[x];
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a) {
        tor.add(F(L[x](a, y) - L[y](a, x) - red.brm[x][y][a]), {x, y, a});
        met.add(m(y, a), {x, y, a});
      }
  }
  return {tor.report("torsion free", "Lambda(X)Y - Lambda(Y)X = [X,Y]_m", 1e-12),
          met.report("metric", "g(Lambda(X)Y,Z) + g(Y,Lambda(X)Z) = 0", 1e-12)};
}

template <class F>
std::vector<std::vector<Mat<F>>> curvature_endos(const Reductive<F>& red, const std::vector<Mat<F>>& L) {
  const int n = red.n;
  std::vector<std::vector<Mat<F>>> R(n, std::vector<Mat<F>>(n));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      Mat<F> M = L[x] * L[y] - L[y] * L[x];
      for (int k = 0; k < n; ++k)
        if (red.brm[x][y][k] != 0) M -= red.brm[x][y][k] * L[k];
      for (size_t k = 0; k < red.adh.size(); ++k)
        if (red.brh[x][y][k] != 0) M -= red.brh[x][y][k] * red.adh[k];
      R[x][y] = std::move(M);
    }
  return R;
}

template <class F>
Tensor<F> curvature_at_origin(const Reductive<F>& red, const std::vector<Mat<F>>& L, const Mat<F>& g) {
  const int n = red.n;
  auto Re = curvature_endos(red, L);
  Tensor<F> R(4, n, SymmetryClass::CurvatureLike);
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x) {
      Mat<F> gr = Re[w][x].transpose() * g;  // gr(y,z) = g(R(w,x)e_y, e_z)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z) R(w, x, y, z) = gr(y, z);
    }
  return R;
}

template <class F>
std::vector<Mat<F>> derive_endo(const std::vector<Mat<F>>& L, const Mat<F>& T) {
  std::vector<Mat<F>> out;
  for (const auto& l : L) out.push_back(l * T - T * l);
  return out;
}

template <class F>
std::vector<std::vector<Mat<F>>> derive_endo_family(const std::vector<Mat<F>>& L, const std::vector<Mat<F>>& D) {
  const int n = static_cast<int>(L.size());
  std::vector<std::vector<Mat<F>>> out(n);
  for (int w = 0; w < n; ++w)
    for (int x = 0; x < n; ++x) {
      Mat<F> M = L[w] * D[x] - D[x] * L[w];
      for (int k = 0; k < n; ++k)
        if (L[w](k, x) != 0) M -= L[w](k, x) * D[k];
      out[w].push_back(std::move(M));
    }
  return out;
}

template <class F>
InvariantDerivatives<F> invariant_derivatives(const std::vector<Mat<F>>& L, const Mat<F>& J) {
  InvariantDerivatives<F> d;
  d.DJ = derive_endo(L, J);
  d.D2J = derive_endo_family(L, d.DJ);
  return d;
}

template <class F>
CurvaturePoint<F> point_at_origin(const Reductive<F>& red, const Mat<F>& g, const Mat<F>& J, const std::string& label) {
  auto L = nomizu(red, g);
  auto d = invariant_derivatives(L, J);
  CurvaturePoint<F> cp;
  cp.label = label;
  cp.g = g;
  cp.J = J;
  cp.DJ = std::move(d.DJ);
  cp.D2J = std::move(d.D2J);
  cp.R = curvature_at_origin(red, L, g);
  bool diag = true;
  for (int i = 0; i < g.rows() && diag; ++i)
    for (int j = 0; j < g.cols(); ++j) {
      if (i != j && g(i, j) != 0) diag = false;
      if (i == j && g(i, i) != 1 && g(i, i) != -1) diag = false;
    }
  if (diag)
    for (int i = 0; i < g.rows(); ++i) cp.frame.eps.push_back(g(i, i) > 0 ? 1 : -1);
  return cp;
}

template <class F>
CurvaturePoint<F> point_at_origin(const HomogeneousModel& model) {
  return point_at_origin(reductive_data<F>(model), convert<F>(model.g), convert<F>(model.J), model.name);
}

template <class F>
NearlyKaehlerReport<F> nearly_kaehler_check(const CurvaturePoint<F>& cp, double tol) {
  require_complete(cp);
  const int n = cp.dim();
  NearlyKaehlerReport<F> out;
  double dj = 0;
  for (const auto& m : cp.DJ) dj = std::max(dj, max_abs(m));
  Residual<F> pol(dj > 0 ? dj : 1.0);
  Mat<F> M(n * n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a) {
        pol.add(F(cp.DJ[x](a, y) + cp.DJ[y](a, x)), {x, y, a});
        M(a * n + y, x) = cp.DJ[x](a, y);
      }
  out.polarization = pol.report("nearly Kaehler", "(nabla_X J)Y + (nabla_Y J)X = 0", tol);
  out.nearly = out.polarization.pass;
  out.kaehler = FieldTraits<F>::exact ? dj == 0 : dj <= tol;
  out.kernel_dim = n - rank(M, FieldTraits<F>::exact ? 0.0 : 1e-10);
  out.strict = out.nearly && out.kernel_dim == 0;
  out.polarization.values["strict"] = out.strict ? "true" : "false";
  out.polarization.values["kernel_dim"] = std::to_string(out.kernel_dim);
  if (n == 6 && out.strict) {
    try {
      out.alpha = constant_type(cp, tol).alpha;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotConstantType) throw;
    }
  }
  return out;
}

template <class F>
std::vector<IdentityReport> canonical_connection_reports(const Reductive<F>& red, const CurvaturePoint<F>& cp,
                                                         const std::vector<Mat<F>>& L, Convention conv, double tol) {
  const int n = red.n;
  const F half = from_rational<F>(Rational(1, 2));
  std::vector<Mat<F>> Lb;
  bool zero = true;
  for (int x = 0; x < n; ++x) {
    Lb.push_back(L[x] - half * (cp.J * cp.DJ[x]));
    if (!is_zero(Lb.back(), tol)) zero = false;
  }
  Tensor<F> Rb = curvature_at_origin(red, Lb, cp.g);
  Tensor<F> lab = canonical_curvature(cp, conv, tol).rbar;
  double rs = std::max(max_abs(cp.R), 1e-300);
  Residual<F> curv(rs);
  for (size_t i = 0; i < Rb.size(); ++i) {
    F expect = conv == Convention::Gray ? F(-Rb.flat(i)) : Rb.flat(i);
    auto idx = Rb.index_of(i);
    curv.add(F(lab.flat(i) - expect), {idx[0], idx[1], idx[2], idx[3]});
  }
  std::vector<IdentityReport> out;
  out.push_back(curv.report("canonical connection curvature",
                            "curvature of Lambda - J(nabla J)/2 equals Rbar from nabla J", tol));
  out.back().values["canonical_lambda_zero"] = zero ? "true" : "false";

  const double es = endo_scale(L);
  Residual<F> pj(std::sqrt(es)), pg(std::sqrt(es) * max_abs(cp.g)), pt(es);
  auto dJ = derive_endo(Lb, cp.J);
  auto dT = derive_endo_family(Lb, cp.DJ);
  for (int x = 0; x < n; ++x) {
    Mat<F> mg = Lb[x].transpose() * cp.g + cp.g * Lb[x];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        pj.add(dJ[x](a, b), {x, a, b});
        pg.add(mg(a, b), {x, a, b});
        for (int y = 0; y < n; ++y) pt.add(dT[x][y](a, b), {x, y, a, b});
      }
  }
  out.push_back(pj.report("canonical connection preserves J", "Jbar-parallel J", tol));
  out.push_back(pg.report("canonical connection is metric", "Lambdabar(X) is g-skew", tol));
  out.push_back(pt.report("parallel torsion", "canonical connection preserves nabla J", tol));
  return out;
}

#define NPK_INSTANTIATE(F)                                                                                        \
  template Reductive<F> reductive_data(const HomogeneousModel&);                                                  \
  template std::vector<Mat<F>> nomizu(const Reductive<F>&, const Mat<F>&);                                        \
  template std::vector<IdentityReport> nomizu_reports(const Reductive<F>&, const Mat<F>&,                         \
                                                      const std::vector<Mat<F>>&);                                \
  template std::vector<std::vector<Mat<F>>> curvature_endos(const Reductive<F>&, const std::vector<Mat<F>>&);     \
  template Tensor<F> curvature_at_origin(const Reductive<F>&, const std::vector<Mat<F>>&, const Mat<F>&);         \
  template std::vector<Mat<F>> derive_endo(const std::vector<Mat<F>>&, const Mat<F>&);                            \
  template std::vector<std::vector<Mat<F>>> derive_endo_family(const std::vector<Mat<F>>&,                        \
                                                               const std::vector<Mat<F>>&);                       \
  template InvariantDerivatives<F> invariant_derivatives(const std::vector<Mat<F>>&, const Mat<F>&);              \
  template CurvaturePoint<F> point_at_origin(const Reductive<F>&, const Mat<F>&, const Mat<F>&,                   \
                                             const std::string&);                                                 \
  template CurvaturePoint<F> point_at_origin(const HomogeneousModel&);                                            \
  template NearlyKaehlerReport<F> nearly_kaehler_check(const CurvaturePoint<F>&, double);                         \
  template std::vector<IdentityReport> canonical_connection_reports(const Reductive<F>&, const CurvaturePoint<F>&, \
                                                                    const std::vector<Mat<F>>&, Convention, double);

NPK_INSTANTIATE(double)
NPK_INSTANTIATE(Rational)
#undef NPK_INSTANTIATE

}  // namespace npk
