#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "npk/catalog.hpp"
#include "npk/submersion.hpp"

using namespace npk;
using npk::testing::Rng;

namespace {

bool all_pass(const std::vector<IdentityReport>& rs) {
  bool ok = true;
  for (const auto& r : rs)
    if (!r.pass && !r.skipped) {
      MESSAGE(r.name << " residual " << r.residual);
      ok = false;
    }
  return ok;
}

SubmersionSplit<Rational> split_of(const std::string& id) { return make_split<Rational>(load_builtin(id).model); }

Mat<Rational> restrict_to(const Mat<Rational>& m, const std::vector<int>& idx) {
  Mat<Rational> b(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) b(i, j) = m(idx[i], idx[j]);
  return b;
}

// Sectional curvature of the stored (standard) tensor on span(u, v).
Rational sectional(const CurvaturePoint<Rational>& cp, const Vec<Rational>& u, const Vec<Rational>& v) {
  const int n = cp.dim();
  Rational num = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          if (u[a] != 0 && v[b] != 0 && v[c] != 0 && u[d] != 0) num += u[a] * v[b] * v[c] * u[d] * cp.R(a, b, c, d);
  Rational uu = bilinear(cp.g, u, u), vv = bilinear(cp.g, v, v), uv = bilinear(cp.g, u, v);
  return num / (uu * vv - uv * uv);
}

const std::vector<const char*> kTwistors = {"cp3-twistor", "hq-twistor", "para-twistor"};

}  // namespace

TEST_CASE("split construction errors") {
  auto cp = point_at_origin<Rational>(load_builtin("su3-flag").model);
  CHECK_THROWS_AS(make_split(cp, {0, 1, 2}, {2, 3, 4, 5}), Error);
  CHECK_THROWS_AS(make_split(cp, {0, 1, 2, 3, 4, 5}, {}), Error);
  auto skew = cp;
  skew.g(0, 1) = skew.g(1, 0) = Rational(1, 7);
  try {
    make_split(skew, {0, 2, 3, 5}, {1, 4});
    FAIL("expected a precondition failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionFailed);
  }
  CHECK_THROWS_AS(make_split<Rational>(load_builtin("gxg-su2").model), Error);
}

TEST_CASE("bare points have no connection") {
  auto s = split_of("cp3-twistor");
  auto bare = make_split(s.point, s.H, s.V);
  CHECK_FALSE(bare.has_connection());
  try {
    oneill_tensors(bare, 1e-10);
    FAIL("expected MissingConnection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingConnection);
  }
}

TEST_CASE("O'Neill A on horizontal pairs is half the vertical bracket") {
  for (const char* id : kTwistors) {
    CAPTURE(id);
    auto s = split_of(id);
    CHECK(all_pass(split_reports(s, 1e-10)));
    CHECK(j_invariant(s));
    auto ot = oneill_tensors(s, 1e-10);
    CHECK(all_pass(ot.reports));
    const int n = s.dim();
    for (int x : s.H)
      for (int y : s.H) {
        Vec<Rational> half = s.red->brm[x][y];
        for (auto& c : half) c /= 2;
        CHECK(s.piV * (ot.A[x] * unit<Rational>(n, y)) == s.piV * half);
        CHECK(ot.A[x] * unit<Rational>(n, y) == s.piV * half);
      }
    for (int v : s.V) CHECK(ot.T[v] == Mat<Rational>(n, n));
  }
}

TEST_CASE("canonical variation matches the Levi-Civita map of g_t") {
  for (const char* id : {"cp3-twistor", "product"}) {
    CAPTURE(id);
    auto s = split_of(id);
    auto ot = oneill_tensors(s, 1e-10);
    for (Rational t : {Rational(1), Rational(1, 2), Rational(2), Rational(3), Rational(-1)}) {
      CAPTURE(t.get_d());
      auto var = canonical_variation(s, t, 1e-10);
      CHECK(all_pass(var.reports));
      Mat<Rational> gt = s.piH.transpose() * s.point.g * s.piH + t * (s.piV.transpose() * s.point.g * s.piV);
      CHECK(var.split.point.g == gt);
      auto want = nomizu(*s.red, gt);
      auto got = variation_connection(s, ot, t);
      for (int x = 0; x < s.dim(); ++x) CHECK(got[x] == want[x]);
    }
    CHECK_THROWS_AS(canonical_variation(s, Rational(0), 1e-10), Error);
  }
}

TEST_CASE("Kaehler submersions and their flips") {
  for (const char* id : kTwistors) {
    CAPTURE(id);
    auto s = split_of(id);
    CHECK(all_pass(kahler_submersion_conditions(s, 1e-10)));
    auto fd = flip_structure(s, Rational(1, 2));
    const int n = s.dim();
    for (int x = 0; x < n; ++x) {
      bool vertical = std::find(s.V.begin(), s.V.end(), x) != s.V.end();
      Vec<Rational> want = s.point.J * unit<Rational>(n, x);
      if (vertical)
        for (auto& c : want) c = -c;
      CHECK(fd.J * unit<Rational>(n, x) == want);
    }
    auto tf = twistor_flip(s, 1e-10);
    CHECK(all_pass(tf.reports));
    CHECK(tf.nk.strict);
    CHECK(tf.flipped.point.J == fd.J);
    CHECK(tf.flipped.point.g == fd.g);
    // Flipping back with t = 2.
    auto back = flip_structure(tf.flipped, Rational(2));
    CHECK(back.J == s.point.J);
    CHECK(back.g == s.point.g);
  }
}

TEST_CASE("flip preconditions") {
  // su3-flag carries a split but is strictly nearly Kaehler, not Kaehler.
  auto s = split_of("su3-flag");
  try {
    twistor_flip(s, 1e-10);
    FAIL("expected a precondition failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionFailed);
  }
}

TEST_CASE("A squared, Omega and the fiber curvature on flipped points") {
  const std::map<std::string, int> alpha = {{"cp3-twistor", 2}, {"hq-twistor", 2}, {"para-twistor", -2}};
  for (const char* id : kTwistors) {
    CAPTURE(id);
    auto nk = twistor_flip(split_of(id), 1e-10).flipped;
    const int n = nk.dim();
    auto sq = asquare_and_omega(nk, 1e-10);
    CHECK(all_pass(sq.reports));
    // A = (nabla_V J) restricted to H; its square by hand.
    const Mat<Rational>& A = nk.point.DJ[nk.V[0]];
    Mat<Rational> a2 = restrict_to(A * A, nk.H);
    Rational gvv = nk.point.g(nk.V[0], nk.V[0]);
    CHECK(a2 == sq.kappa * gvv * Mat<Rational>::identity(static_cast<int>(nk.H.size())));
    CHECK(sq.kappa == -alpha.at(id));

    auto fc = fiber_curvature(nk, 1e-10);
    CHECK(all_pass(fc.reports));
    CHECK(fc.alpha == alpha.at(id));
    auto v = unit<Rational>(n, nk.V[0]);
    CHECK(sectional(nk.point, v, nk.point.J * v) == fc.K);
    CHECK(fc.K == 4 * fc.alpha);
    CHECK(r_eigenbundles(nk, 1e-10).pass);
    CHECK(all_pass(reducible_case_identities(nk, 1e-10)));
  }
}

TEST_CASE("A squared does not depend on the vertical vector") {
  auto nk = twistor_flip(split_of("cp3-twistor"), 1e-10).flipped;
  const int n = nk.dim();
  auto v = unit<Rational>(n, nk.V[0]);
  auto jv = nk.point.J * v;
  Vec<Rational> w(n);
  for (int i = 0; i < n; ++i) w[i] = Rational(3, 5) * v[i] + Rational(4, 5) * jv[i];
  CHECK(asquare_and_omega(nk, 1e-10, std::optional<Vec<Rational>>(w)).kappa == asquare_and_omega(nk, 1e-10).kappa);
}

TEST_CASE("A squared needs a twistorial point") {
  // The unflipped Kaehler point has nabla J = 0.
  auto s = split_of("cp3-twistor");
  CHECK_THROWS_AS(asquare_and_omega(s, 1e-10), Error);
}

TEST_CASE("quaternionic triple signs") {
  auto cp3 = twistor_flip(make_split<double>(load_builtin("cp3-twistor").model), 1e-10).flipped;
  auto q = quaternionic_triple(cp3, 1e-9);
  CHECK(all_pass(q.reports));
  CHECK(q.eps == std::array<int, 3>{-1, -1, -1});
  auto para = twistor_flip(make_split<double>(load_builtin("para-twistor").model), 1e-10).flipped;
  auto p = quaternionic_triple(para, 1e-9);
  CHECK(all_pass(p.reports));
  CHECK(p.eps == std::array<int, 3>{-1, 1, 1});
  // eps_2 = eps_3 = sign(-alpha eps_V).
  for (const auto* t : {&q, &p}) {
    int s = (-t->alpha * t->eps_v) > 0 ? 1 : -1;
    CHECK(t->eps[1] == s);
    CHECK(t->eps[2] == s);
  }
  // Seeds change the gauge, not the verdict.
  Rng rng(3);
  for (int i = 0; i < 3; ++i) CHECK(all_pass(quaternionic_triple(cp3, 1e-9, rng.integer(1, 1000)).reports));
  auto rotated = quaternionic_triple(cp3, 1e-9, 7, {0.6, 0.8});
  CHECK(rotated.eps == q.eps);
}

TEST_CASE("su3-flag with its vertical root space") {
  auto s = split_of("su3-flag");
  CHECK(all_pass(reducible_case_identities(s, 1e-10)));
  auto fc = fiber_curvature(s, 1e-10);
  CHECK(fc.alpha == 1);
  CHECK(fc.K == 4);
}

TEST_CASE("float and exact backends agree on the flip") {
  auto ex = twistor_flip(split_of("hq-twistor"), 1e-10);
  auto fl = twistor_flip(make_split<double>(load_builtin("hq-twistor").model), 1e-10);
  CHECK(all_pass(fl.reports));
  CHECK(max_abs(Mat<double>(convert<double>(ex.flipped.point.g) - fl.flipped.point.g)) < 1e-12);
  REQUIRE(fl.nk.alpha.has_value());
  CHECK(*fl.nk.alpha == doctest::Approx(2));
}
