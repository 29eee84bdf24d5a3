#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "npk/catalog.hpp"

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

// so(3) with [e0,e1] = e2 and cyclic.
Tensor<Rational> su2_constants() {
  Tensor<Rational> c(3, 3);
  auto set = [&](int i, int j, int k) {
    c(i, j, k) = 1;
    c(j, i, k) = -1;
  };
  set(0, 1, 2);
  set(1, 2, 0);
  set(2, 0, 1);
  return c;
}

Mat<Rational> ad_of(const Tensor<Rational>& c, int i) {
  const int n = c.dim();
  Mat<Rational> m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(k, j) = c(i, j, k);
  return m;
}

}  // namespace

TEST_CASE("builtins validate") {
  for (const auto& id : builtin_ids()) {
    CAPTURE(id);
    auto e = load_builtin(id);
    CHECK_NOTHROW(validate(e.model));
    CHECK(all_pass(model_reports(e.model)));
  }
}

TEST_CASE("structure constants and Killing form of so(3)") {
  auto c = su2_constants();
  Mat<Rational> k = killing_form(c);
  CHECK(k == Rational(-2) * Mat<Rational>::identity(3));
  // The adjoint representation reproduces the constants.
  std::vector<Mat<Rational>> ads = {ad_of(c, 0), ad_of(c, 1), ad_of(c, 2)};
  CHECK(structure_constants(ads) == c);
  // A set that is not closed under brackets.
  std::vector<Mat<Rational>> open = {ads[0], ads[1]};
  CHECK_THROWS_AS(structure_constants(open), Error);
}

TEST_CASE("rescale_basis") {
  auto c = su2_constants();
  // e2 -> 2 e2: [e0,e1] = e2 = (1/2)(2 e2).
  auto r = rescale_basis(c, {Rational(1), Rational(1), Rational(4)});
  CHECK(r(0, 1, 2) == Rational(1, 2));
  CHECK(r(1, 2, 0) == 2);
  CHECK_THROWS_AS(rescale_basis(c, {Rational(1), Rational(1), Rational(2)}), Error);
}

TEST_CASE("validation errors") {
  auto base = load_builtin("gxg-su2").model;
  SUBCASE("Jacobi") {
    auto m = base;
    m.c(0, 1, 2) += 1;
    m.c(1, 0, 2) -= 1;
    CHECK_THROWS_AS(validate(m), Error);
  }
  SUBCASE("metric invariance") {
    auto m = base;
    m.g(0, 0) *= 2;
    CHECK_THROWS_AS(validate(m), Error);
  }
  SUBCASE("shape") {
    auto m = base;
    m.J = Mat<Rational>(2, 2);
    CHECK_THROWS_AS(validate(m), Error);
  }
}

TEST_CASE("Levi-Civita map of each builtin") {
  for (const char* id : {"su3-flag", "gxg-su2", "gxg-sl2r", "cp3-twistor", "product"}) {
    CAPTURE(id);
    auto e = load_builtin(id);
    auto red = reductive_data<Rational>(e.model);
    auto L = nomizu(red, e.model.g);
    CHECK(all_pass(nomizu_reports(red, e.model.g, L)));
    const int n = red.n;
    const auto& g = e.model.g;
    // Torsion free and metric, recomputed here.
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        CHECK(axpy(Rational(-1), L[y] * unit<Rational>(n, x), L[x] * unit<Rational>(n, y)) == red.brm[x][y]);
      }
    for (int x = 0; x < n; ++x) CHECK(L[x].transpose() * g + g * L[x] == Mat<Rational>(n, n));
  }
}

TEST_CASE("curvature at the origin has the algebraic symmetries") {
  for (const char* id : {"su3-flag", "gxg-sl2r", "hq-twistor"}) {
    CAPTURE(id);
    auto e = load_builtin(id);
    auto red = reductive_data<Rational>(e.model);
    auto L = nomizu(red, e.model.g);
    auto R = curvature_at_origin(red, L, e.model.g);
    const int n = red.n;
    for (int w = 0; w < n; ++w)
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z) {
            CHECK(R(w, x, y, z) == -R(x, w, y, z));
            CHECK(R(w, x, y, z) == R(y, z, w, x));
            if (w < x && x < y) CHECK(R(w, x, y, z) + R(x, y, w, z) + R(y, w, x, z) == 0);
          }
  }
}

TEST_CASE("round sphere S^2 = SO(3)/SO(2) has curvature 1") {
  // h = span(e2), m = span(e0, e1), metric -B/2 = identity on m.
  HomogeneousModel m;
  m.name = "s2";
  m.c = su2_constants();
  m.h = {2};
  m.m = {0, 1};
  m.g = Mat<Rational>::identity(2);
  m.J = standard_J<Rational>(1);
  CHECK_NOTHROW(validate(m));
  auto red = reductive_data<Rational>(m);
  auto L = nomizu(red, m.g);
  CHECK(L[0] == Mat<Rational>(2, 2));
  auto R = curvature_at_origin(red, L, m.g);
  // Sectional curvature K = g(R(X,Y)Y,X) = -R(X,Y,X,Y) with R(W,X,Y,Z) = g(R(W,X)Y,Z).
  CHECK(R(0, 1, 1, 0) == 1);
  auto cp = point_at_origin<Rational>(m);
  auto nk = nearly_kaehler_check(cp, 1e-10);
  CHECK(nk.kaehler);
  CHECK_FALSE(nk.strict);
}

TEST_CASE("nearly Kaehler verdicts") {
  auto check = [](const char* id, bool strict, bool kaehler) {
    CAPTURE(id);
    auto nk = nearly_kaehler_check(point_at_origin<Rational>(load_builtin(id).model), 1e-10);
    CHECK(nk.nearly);
    CHECK(nk.strict == strict);
    CHECK(nk.kaehler == kaehler);
  };
  check("su3-flag", true, false);
  check("gxg-su2", true, false);
  check("gxg-sl2r", true, false);
  check("cp3-twistor", false, true);
  check("flat", false, true);
  auto bad = nearly_kaehler_check(point_at_origin<Rational>(load_builtin("su3-flag-misscaled").model), 1e-10);
  CHECK_FALSE(bad.nearly);
  auto su3 = nearly_kaehler_check(point_at_origin<Rational>(load_builtin("su3-flag").model), 1e-10);
  REQUIRE(su3.alpha.has_value());
  CHECK(*su3.alpha == 1);
}

TEST_CASE("canonical Hermitian connection") {
  for (const char* id : {"su3-flag", "gxg-su2", "gxg-sl2r"}) {
    CAPTURE(id);
    auto e = load_builtin(id);
    auto red = reductive_data<Rational>(e.model);
    auto L = nomizu(red, e.model.g);
    auto cp = point_at_origin<Rational>(red, e.model.g, e.model.J, id);
    CHECK(all_pass(canonical_connection_reports(red, cp, L, Convention::Gray, 1e-10)));
  }
}

TEST_CASE("invariant derivatives of J") {
  auto e = load_builtin("su3-flag");
  auto red = reductive_data<Rational>(e.model);
  auto L = nomizu(red, e.model.g);
  auto d = invariant_derivatives(L, e.model.J);
  REQUIRE(d.DJ.size() == 6u);
  for (int x = 0; x < 6; ++x) {
    CHECK(d.DJ[x] == commutator(L[x], e.model.J));
    // D_x J anticommutes with J.
    CHECK(d.DJ[x] * e.model.J + e.model.J * d.DJ[x] == Mat<Rational>(6, 6));
  }
  // Nearly Kaehler: (D_x J) x = 0.
  for (int x = 0; x < 6; ++x) CHECK(max_abs(d.DJ[x] * unit<Rational>(6, x)) == 0.0);
}
