#include "npk/catalog.hpp"

#include <functional>

#include "npk/modelio.hpp"

namespace npk {

namespace {

using Q = Rational;
using M = Mat<Rational>;

// Complex matrix as a pair of real parts.
struct CMat {
  M re, im;
  explicit CMat(int n) : re(n, n), im(n, n) {}
};

CMat cunit(int n, int i, int j, int re = 1, int im = 0) {
  CMat m(n);
  m.re(i, j) = re;
  m.im(i, j) = im;
  return m;
}
CMat operator+(CMat a, const CMat& b) {
  a.re += b.re;
  a.im += b.im;
  return a;
}
CMat operator-(CMat a, const CMat& b) {
  a.re -= b.re;
  a.im -= b.im;
  return a;
}
CMat times_i(const CMat& a) {
  CMat m(a.re.rows());
  m.re = -a.im;
  m.im = a.re;
  return m;
}
CMat transpose_c(const CMat& a) {
  CMat m(a.re.rows());
  m.re = a.re.transpose();
  m.im = a.im.transpose();
  return m;
}

CMat neg(const CMat& a) {
  CMat m(a.re.rows());
  m.re = -a.re;
  m.im = -a.im;
  return m;
}

M realify(const CMat& a) {
  const int n = a.re.rows();
  M r(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      r(i, j) = a.re(i, j);
      r(i, n + j) = -a.im(i, j);
      r(n + i, j) = a.im(i, j);
      r(n + i, n + j) = a.re(i, j);
    }
  return r;
}

M block_diag(const std::vector<M>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.rows();
  M r(n, n);
  int o = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) r(o + i, o + j) = b(i, j);
    o += b.rows();
  }
  return r;
}

M scaled(const Q& s, const M& m) { return s * m; }

M restrict_to(const M& full, const std::vector<int>& idx) {
  M r(static_cast<int>(idx.size()), static_cast<int>(idx.size()));
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) r(a, b) = full(idx[a], idx[b]);
  return r;
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int i = a; i < b; ++i) v.push_back(i);
  return v;
}

HomogeneousModel assemble(const std::string& name, const std::vector<std::string>& labels, Tensor<Q> c,
                          std::vector<int> h, std::vector<int> m, M g, M J) {
  HomogeneousModel md;
  md.name = name;
  md.labels = labels;
  md.c = std::move(c);
  md.h = std::move(h);
  md.m = std::move(m);
  md.g = std::move(g);
  md.J = std::move(J);
  return md;
}

// J e_a = s_a e_{3+a} on a 6-dimensional m.
M paired_J(const std::vector<int>& signs) {
  const int k = static_cast<int>(signs.size());
  M J(2 * k, 2 * k);
  for (int a = 0; a < k; ++a) {
    J(k + a, a) = signs[a];
    J(a, k + a) = -signs[a];
  }
  return J;
}

// SU(3)/T^2. Basis: i diag(1,-1,0), i diag(0,1,-1), then E_jk - E_kj and
// i(E_jk + E_kj) for the three positive roots.
CatalogEntry su3_flag(bool misscaled) {
  std::vector<M> basis;
  CMat h1 = cunit(3, 0, 0, 0, 1) - cunit(3, 1, 1, 0, 1);
  CMat h2 = cunit(3, 1, 1, 0, 1) - cunit(3, 2, 2, 0, 1);
  basis.push_back(realify(h1));
  basis.push_back(realify(h2));
  const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (auto& p : pairs) basis.push_back(realify(cunit(3, p[0], p[1]) - cunit(3, p[1], p[0])));
  for (auto& p : pairs) basis.push_back(realify(cunit(3, p[0], p[1], 0, 1) + cunit(3, p[1], p[0], 0, 1)));
  auto c = structure_constants(basis);
  auto B = killing_form(c);
  std::vector<int> m = range(2, 8);
  M g = scaled(Q(-1, 12), restrict_to(B, m));
  if (misscaled) {
    g(0, 0) *= 2;
    g(3, 3) *= 2;
  }
  CatalogEntry e;
  e.id = misscaled ? "su3-flag-misscaled" : "su3-flag";
  e.model = assemble(e.id, {"H1", "H2", "X12", "X13", "X23", "Y12", "Y13", "Y23"}, c, {0, 1}, m, g,
                     paired_J({1, -1, 1}));
  e.model.split = HVSplit{{1, 2, 4, 5}, {0, 3}};
  if (misscaled) {
    e.notes = "metric -B/12 with the first root space stretched by 2; not nearly Kaehler";
    e.expected["nearly_kaehler"] = {"false", "computed"};
    e.gate = {};
  } else {
    e.notes = "metric -B/12 (orthonormal root vectors), J = +,-,+ on the three root spaces; V = first root space";
    e.expected["signature"] = {"(6,0)", "computed"};
    e.expected["nearly_kaehler"] = {"strict", "computed"};
    e.expected["alpha_sign"] = {"+", "computed"};
    e.expected["einstein"] = {"Ric = 5 alpha g", "closed-form"};
    e.expected["r_spectrum"] = {"single eigenvalue 4 alpha", "closed-form"};
    e.gate = {"gray", "canonical", "thmcurv", "d2j", "einstein", "type", "reducible", "quat", "threeform"};
  }
  return e;
}

// G x G as G^3 / diagonal: u = (a,a,a), v = (a,a,-2a), w = sqrt(3)(a,-a,0).
CatalogEntry gxg(bool compact) {
  std::vector<M> alg;
  if (compact) {
    alg.push_back(realify(cunit(2, 0, 0, 0, 1) - cunit(2, 1, 1, 0, 1)));
    alg.push_back(realify(cunit(2, 0, 1) - cunit(2, 1, 0)));
    alg.push_back(realify(cunit(2, 0, 1, 0, 1) + cunit(2, 1, 0, 0, 1)));
  } else {
    M H(2, 2), E(2, 2), F(2, 2);
    H(0, 0) = 1;
    H(1, 1) = -1;
    E(0, 1) = 1;
    F(1, 0) = 1;
    alg = {H, E, F};
  }
  const int k = alg[0].rows();
  M Z(k, k);
  std::vector<M> basis;
  for (const auto& a : alg) basis.push_back(block_diag({a, a, a}));
  for (const auto& a : alg) basis.push_back(block_diag({a, a, scaled(Q(-2), a)}));
  for (const auto& a : alg) basis.push_back(block_diag({a, scaled(Q(-1), a), Z}));
  auto c = rescale_basis(structure_constants(basis), {1, 1, 1, 1, 1, 1, 3, 3, 3});
  auto B = killing_form(c);
  std::vector<int> m = range(3, 9);
  const Q s = compact ? Q(-1, 48) : Q(1, 48);
  CatalogEntry e;
  e.id = compact ? "gxg-su2" : "gxg-sl2r";
  std::vector<std::string> labels;
  for (const char* p : {"u", "v", "w"})
    for (int i = 1; i <= 3; ++i) labels.push_back(std::string(p) + std::to_string(i));
  // J v = -w, J w = v
  e.model = assemble(e.id, labels, c, {0, 1, 2}, m, scaled(s, restrict_to(B, m)), paired_J({-1, -1, -1}));
  if (compact) {
    e.notes = "metric -B/48 on m, orthonormal; J v_i = -w_i";
    e.expected["signature"] = {"(6,0)", "computed"};
    e.expected["alpha_sign"] = {"+", "computed"};
  } else {
    e.notes = "metric +B/48 on m in the (H,E,F) basis; J v_i = -w_i";
    e.expected["signature"] = {"(4,2)", "computed"};
    e.expected["alpha_sign"] = {"-", "computed"};
  }
  e.expected["nearly_kaehler"] = {"strict", "computed"};
  e.expected["einstein"] = {"Ric = 5 alpha g", "closed-form"};
  e.gate = {"gray", "canonical", "thmcurv", "d2j", "einstein"};
  return e;
}

// sp(4,C)-type twistor data: h = (Z, H2, root 2e2), H = roots e1+e2, e1-e2,
// V = root 2e1. The metric is sign*B/24 on H and twice that on V, J = ad Z on
// H and ad Z / 2 on V, which is Kaehler; the flip produces the nearly Kaehler structure.
CatalogEntry twistor(const std::string& form, int sign) {
  auto E2 = [](int i, int j) { return cunit(2, i, j); };
  auto blk = [](const CMat* A, const CMat* Bm, const CMat* C) {
    CMat r(4);
    CMat z(2);
    const CMat& a = A ? *A : z;
    const CMat& b = Bm ? *Bm : z;
    const CMat& cc = C ? *C : z;
    CMat mat = transpose_c(a);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        r.re(i, j) = a.re(i, j), r.im(i, j) = a.im(i, j);
        r.re(i, j + 2) = b.re(i, j), r.im(i, j + 2) = b.im(i, j);
        r.re(i + 2, j) = cc.re(i, j), r.im(i + 2, j) = cc.im(i, j);
        r.re(i + 2, j + 2) = -mat.re(i, j), r.im(i + 2, j + 2) = -mat.im(i, j);
      }
    return r;
  };
  CMat e00 = E2(0, 0), e11 = E2(1, 1), e01 = E2(0, 1), e0110 = E2(0, 1) + E2(1, 0);
  CMat H1 = blk(&e00, nullptr, nullptr), H2 = blk(&e11, nullptr, nullptr);
  CMat r2e1 = blk(nullptr, &e00, nullptr), r2e2 = blk(nullptr, &e11, nullptr);
  CMat rsum = blk(nullptr, &e0110, nullptr), rdiff = blk(&e01, nullptr, nullptr);
  auto X = [&](const CMat& v) { return v - transpose_c(v); };
  auto Y = [&](const CMat& v) { return v + transpose_c(v); };
  std::vector<CMat> hb, Hb, Vb;
  if (form == "compact" || form == "hq") {
    hb = {times_i(H1), times_i(H2), X(r2e2), times_i(Y(r2e2))};
    Vb = {X(r2e1), times_i(Y(r2e1))};
    if (form == "compact")
      Hb = {X(rsum), times_i(Y(rsum)), X(rdiff), times_i(Y(rdiff))};
    else
      Hb = {times_i(X(rsum)), neg(Y(rsum)), times_i(X(rdiff)), neg(Y(rdiff))};
  } else {
    hb = {X(r2e1), H2, X(r2e2), Y(r2e2)};
    Vb = {H1, Y(r2e1)};
    Hb = {X(rsum), Y(rsum), X(rdiff), Y(rdiff)};
  }
  std::vector<M> basis;
  for (auto* set : {&hb, &Hb, &Vb})
    for (const auto& b : *set) basis.push_back(realify(b));
  auto c = structure_constants(basis);
  auto B = killing_form(c);
  std::vector<int> m = range(4, 10);
  M g = scaled(Q(sign, 24), restrict_to(B, m));
  for (int a = 4; a < 6; ++a)
    for (int b = 4; b < 6; ++b) g(a, b) *= 2;
  auto red = reductive_data<Q>(assemble("", {}, c, range(0, 4), m, g, M::identity(6)));
  M J = red.adh[0];
  for (int a = 0; a < 6; ++a)
    for (int b = 4; b < 6; ++b) J(a, b) /= 2;

  CatalogEntry e;
  e.id = form == "compact" ? "cp3-twistor" : form == "hq" ? "hq-twistor" : "para-twistor";
  e.model = assemble(e.id, {"h1", "h2", "h3", "h4", "x1", "x2", "x3", "x4", "v1", "v2"}, c, range(0, 4), m, g, J);
  e.model.split = HVSplit{{0, 1, 2, 3}, {4, 5}};
  e.notes = "Kaehler input: metric " + std::string(sign > 0 ? "+" : "-") +
            "B/24 on H and twice that on V, J = ad Z on H and ad Z/2 on V; flip with t = 1/2";
  e.expected["kaehler"] = {"true", "computed"};
  e.expected["totally_geodesic_fibers"] = {"true", "closed-form"};
  e.expected["flipped_fiber_curvature"] = {"4 alpha", "closed-form"};
  e.expected["triple_signs"] = {"eps2 = eps3 = sign(-alpha eps_V)", "closed-form"};
  if (form == "compact") {
    e.expected["flipped_signature"] = {"(6,0)", "computed"};
    e.expected["flipped_alpha_sign"] = {"+", "computed"};
  } else if (form == "hq") {
    e.expected["flipped_signature"] = {"(2,4)", "computed"};
    e.expected["flipped_alpha_sign"] = {"+", "computed"};
  } else {
    e.expected["flipped_signature"] = {"(4,2)", "computed"};
    e.expected["flipped_alpha_sign"] = {"-", "computed"};
  }
  e.gate = {"submersion", "twistor", "reducible", "quat"};
  return e;
}

// SU(2)^3 / T^3 with the product Kaehler structure; H = first two factors.
CatalogEntry product() {
  Tensor<Q> c(3, 9);
  for (int f = 0; f < 3; ++f) {
    int a = 3 * f, b = 3 * f + 1, z = 3 * f + 2;
    auto put = [&](int i, int j, int k) {
      c(i, j, k) = 1;
      c(j, i, k) = -1;
    };
    put(a, b, z);
    put(b, z, a);
    put(z, a, b);
  }
  std::vector<int> h = {2, 5, 8}, m = {0, 1, 3, 4, 6, 7};
  M J(6, 6);
  for (int f = 0; f < 3; ++f) {
    J(2 * f + 1, 2 * f) = 1;
    J(2 * f, 2 * f + 1) = -1;
  }
  CatalogEntry e;
  e.id = "product";
  e.model = assemble(e.id, {"a1", "b1", "z1", "a2", "b2", "z2", "a3", "b3", "z3"}, c, h, m, M::identity(6), J);
  e.model.split = HVSplit{{0, 1, 2, 3}, {4, 5}};
  e.notes = "three round 2-spheres, unit metric, J = ad z on each factor";
  e.expected["kaehler"] = {"true", "computed"};
  e.expected["oneill"] = {"A = 0, T = 0", "closed-form"};
  e.gate = {"gray", "submersion"};
  return e;
}

CatalogEntry flat() {
  CatalogEntry e;
  e.id = "flat";
  e.model = assemble(e.id, {"e1", "e2", "e3", "e4", "e5", "e6"}, Tensor<Q>(3, 6), {}, range(0, 6), M::identity(6),
                     standard_J<Q>(3));
  e.model.split = HVSplit{{0, 1, 3, 4}, {2, 5}};
  e.notes = "abelian algebra, Euclidean metric";
  e.expected["curvature"] = {"0", "closed-form"};
  e.expected["kaehler"] = {"true", "closed-form"};
  e.gate = {"gray", "submersion"};
  return e;
}

const std::vector<std::pair<std::string, std::function<CatalogEntry()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<CatalogEntry()>>> r = {
      {"su3-flag", [] { return su3_flag(false); }},
      {"su3-flag-misscaled", [] { return su3_flag(true); }},
      {"gxg-su2", [] { return gxg(true); }},
      {"gxg-sl2r", [] { return gxg(false); }},
      {"cp3-twistor", [] { return twistor("compact", -1); }},
      {"hq-twistor", [] { return twistor("hq", -1); }},
      {"para-twistor", [] { return twistor("split", 1); }},
      {"product", product},
      {"flat", flat},
  };
  return r;
}

}  // namespace

Tensor<Rational> structure_constants(const std::vector<Mat<Rational>>& basis) {
  const int N = static_cast<int>(basis.size());
  const int d = basis.at(0).rows();
  Mat<Rational> A(d * d, N);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A(i * d + j, k) = basis[k](i, j);
  Tensor<Rational> c(3, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      Mat<Rational> br = commutator(basis[i], basis[j]);
      Vec<Rational> b(d * d);
      for (int r = 0; r < d; ++r)
        for (int s = 0; s < d; ++s) b[r * d + s] = br(r, s);
      Vec<Rational> x;
      try {
        x = solve(A, b);
      } catch (const Error&) {
        throw Error(ErrorKind::ShapeMismatch, "span is not closed under brackets");
      }
      for (int k = 0; k < N; ++k) {
        c(i, j, k) = x[k];
        c(j, i, k) = -x[k];
      }
    }
  return c;
}

Mat<Rational> killing_form(const Tensor<Rational>& c) {
  const int N = c.dim();
  std::vector<Mat<Rational>> ad(N, Mat<Rational>(N, N));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) ad[i](k, j) = c(i, j, k);
  Mat<Rational> B(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Mat<Rational> p = ad[i] * ad[j];
      Rational t = 0;
      for (int k = 0; k < N; ++k) t += p(k, k);
      B(i, j) = t;
    }
  return B;
}

Tensor<Rational> rescale_basis(const Tensor<Rational>& c, const std::vector<Rational>& s2) {
  const int N = c.dim();
  Tensor<Rational> out(3, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        if (c(i, j, k) == 0) continue;
        auto f = FieldTraits<Rational>::sqrt(Rational(s2[i] * s2[j] / s2[k]));
        if (!f) throw Error(ErrorKind::IrrationalValue, "rescaled structure constant is irrational");
        out(i, j, k) = c(i, j, k) * *f;
      }
  return out;
}

std::vector<std::string> builtin_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : registry()) ids.push_back(id);
  return ids;
}

CatalogEntry load_builtin(const std::string& id) {
  for (const auto& [name, make] : registry())
    if (name == id) {
      CatalogEntry e = make();
      validate(e.model);
      return e;
    }
  throw Error(ErrorKind::NotFound, "no builtin model '" + id + "'");
}

CatalogEntry load_entry(const std::string& ref) {
  const std::string prefix = "builtin:";
  if (ref.rfind(prefix, 0) == 0) return load_builtin(ref.substr(prefix.size()));
  for (const auto& id : builtin_ids())
    if (id == ref) return load_builtin(ref);
  CatalogEntry e = entry_from_json(read_json_file(ref));
  validate(e.model);
  return e;
}

std::vector<CatalogEntry> list_builtins() {
  std::vector<CatalogEntry> out;
  for (const auto& id : builtin_ids()) out.push_back(load_builtin(id));
  return out;
}

}  // namespace npk
