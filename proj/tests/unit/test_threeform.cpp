#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../forms.hpp"

using namespace npk;
using npk::testing::Rng;
using npk::testing::adapted;
using npk::testing::empty_form;
using npk::testing::random_type_form;
using npk::testing::transformed;

namespace {

// g(rX,Y) = sum_ij eps_i eps_j eta(X,e_i,e_j) eta(Y,e_i,e_j) in an orthonormal frame.
Mat<Rational> r_oracle(const ThreeForm<Rational>& t) {
  const int n = t.dim();
  Mat<Rational> m(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(x, y) += t.frame.eps[i] * t.frame.eps[j] * t.eta(x, i, j) * t.eta(y, i, j);
  return m;
}

}  // namespace

TEST_CASE("extend_by_type produces a type form") {
  auto f = adapted({1, 1, 1});
  auto t = extend_by_type<Rational>({{0, 1, 2, Rational(2)}}, standard_J<Rational>(3), f);
  CHECK(antisymmetry_residual(t) == 0.0);
  CHECK(type_residual(t) == 0.0);
  // eta(Je1, Je2, e3) = -eta(e1, e2, e3) and eta(e1, Je2, Je3) likewise.
  CHECK(t.eta(3, 4, 2) == -2);
  CHECK(t.eta(0, 4, 5) == -2);
  CHECK(t.eta(3, 1, 5) == -2);
  CHECK(t.eta(1, 0, 2) == -2);
  // The form is Re(dz1 dz2 dz3) scaled: four nonzero frame triples.
  int nonzero = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c) nonzero += t.eta(a, b, c) != 0;
  CHECK(nonzero == 4);
}

TEST_CASE("extend_by_type rejects contradicting assignments") {
  auto f = adapted({1, 1, 1});
  auto J = standard_J<Rational>(3);
  CHECK_THROWS_AS(extend_by_type<Rational>({{0, 1, 2, 1}, {3, 4, 2, 1}}, J, f), Error);
  CHECK_NOTHROW(extend_by_type<Rational>({{0, 1, 2, 1}, {3, 4, 2, -1}}, J, f));
  CHECK_THROWS_AS(extend_by_type<Rational>({{0, 0, 2, 1}}, J, f), Error);
  CHECK_THROWS_AS(extend_by_type<Rational>({{0, 1, 9, 1}}, J, f), Error);
}

TEST_CASE("form length against the frame sum") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> half;
    for (int i = 0; i < rng.integer(3, 4); ++i) half.push_back(rng.integer(0, 1) ? 1 : -1);
    auto t = random_type_form(rng, adapted(half));
    Rational want = 0;
    const int n = t.dim();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) want += t.frame.eps[a] * t.frame.eps[b] * t.frame.eps[c] * t.eta(a, b, c) * t.eta(a, b, c);
    CHECK(form_length(t) == want);
    CHECK(type_residual(t) == 0.0);
  }
}

TEST_CASE("r agrees with the frame-sum oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<int> half;
    for (int i = 0; i < rng.integer(3, 5); ++i) half.push_back(rng.integer(0, 1) ? 1 : -1);
    auto t = random_type_form(rng, adapted(half));
    auto sp = r_from_threeform(t);
    CHECK(sp.r_cov == r_oracle(t));
    CHECK(sp.symmetry_residual == 0.0);
    CHECK(sp.j_commutator == 0.0);
    CHECK(sp.trace_route_residual == 0.0);
  }
}

TEST_CASE("support is J-invariant of complex dimension at least 3") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> half;
    for (int i = 0; i < rng.integer(3, 5); ++i) half.push_back(rng.integer(0, 1) ? 1 : -1);
    auto t = random_type_form(rng, adapted(half));
    if (max_abs(t.eta) == 0) continue;
    auto sk = support_kernel(t);
    CHECK(sk.support_j_invariant);
    CHECK(sk.dim_support >= 6);
    CHECK(sk.dim_support % 2 == 0);
    CHECK(sk.dim_support + sk.dim_kernel == t.dim());
  }
}

TEST_CASE("support and kernel of a product form") {
  // Only e1 e2 e3 in dimension 10: support is span(e1..e3, Je1..Je3).
  auto t = canonical_dim10<Rational>(Dim10Case::First, Rational(1), Rational(0), {1, 1, 1, 1, 1});
  auto sk = support_kernel(t);
  CHECK(sk.dim_support == 6);
  CHECK(sk.dim_kernel == 4);
  CHECK(sk.support_is_kernel_perp);
  for (const auto& k : sk.kernel) {
    CHECK(k[0] == 0);
    CHECK(k[5] == 0);
  }
}

TEST_CASE("stated r for the first case with all signs positive") {
  Rng rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    Rational a = rng.nonzero_rational(), b = rng.nonzero_rational();
    auto t = canonical_dim10<Rational>(Dim10Case::First, a, b, {1, 1, 1, 1, 1});
    auto sp = r_from_threeform(t);
    CHECK(sp.r == stated_r_dim10<Rational>(Dim10Case::First, a, b, {1, 1, 1, 1, 1}));
    // Eigenvalues 4(a^2+b^2) on e1, 4a^2 on e2, e3 and 4b^2 on e4, e5.
    CHECK(nullity_at(sp.r, Rational(4 * (a * a + b * b))) == 2);
    CHECK(nullity_at(sp.r, Rational(4 * a * a)) >= 4);
  }
}

TEST_CASE("dim-10 classification labels") {
  auto first = canonical_dim10<Rational>(Dim10Case::First, Rational(1), Rational(2), {1, 1, 1, 1, 1});
  CHECK(classify_dim10(r_from_threeform(first)) == Dim10Class::TwistorialCandidate);
  auto split = canonical_dim10<Rational>(Dim10Case::First, Rational(1), Rational(0), {1, 1, 1, 1, 1});
  CHECK(classify_dim10(r_from_threeform(split)) == Dim10Class::SplitsOffKaehler);
  auto second = canonical_dim10<Rational>(Dim10Case::Second, Rational(1), Rational(1), {-1, 1, 1, 1, 1});
  auto sp2 = r_from_threeform(second);
  CHECK_FALSE(sp2.decomposable);
  CHECK(classify_dim10(sp2) == Dim10Class::NotDecomposable);
  CHECK(std::string(to_string(Dim10Class::SplitsOffKaehler)) == "splits-off-Kähler");
  CHECK_THROWS_AS(canonical_dim10<Rational>(Dim10Case::Second, Rational(1), Rational(1), {1, 1, 1, 1, 1}), Error);
}

TEST_CASE("normal_form_dim10 recovers the constants after an isometry") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Rational a = rng.nonzero_rational(5, 3), b = rng.nonzero_rational(5, 3);
    std::vector<int> eps5 = {1, 1, 1, 1, 1};
    auto t = canonical_dim10<Rational>(Dim10Case::First, a, b, eps5);
    auto moved = transformed(t, rng.unitary(eps5));
    CHECK(type_residual(moved) == 0.0);
    auto nf = normal_form_dim10(moved);
    CHECK(nf.kind == Dim10Case::First);
    CHECK(nf.reconstruction_residual < 1e-9);
    // The pair is determined by the r-spectrum up to order and sign.
    double x = std::abs(a.get_d()), y = std::abs(b.get_d());
    double p = std::abs(nf.alpha), q = std::abs(nf.beta);
    bool same = (std::abs(p - x) < 1e-9 && std::abs(q - y) < 1e-9) || (std::abs(p - y) < 1e-9 && std::abs(q - x) < 1e-9);
    CHECK(same);
  }
}

TEST_CASE("r-spectrum and length are isometry invariants") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> half;
    for (int i = 0; i < 4; ++i) half.push_back(rng.integer(0, 1) ? 1 : -1);
    auto t = random_type_form(rng, adapted(half));
    Mat<Rational> P = rng.unitary(half);
    auto moved = transformed(t, P);
    CHECK(form_length(moved) == form_length(t));
    auto r0 = r_from_threeform(t).r, r1 = r_from_threeform(moved).r;
    // r transforms by conjugation.
    CHECK(r1 == inverse(P) * r0 * P);
  }
}

TEST_CASE("dim-8 kernel is a non-isotropic complex line") {
  Rng rng(10);
  int done = 0;
  for (int trial = 0; trial < 40 && done < 10; ++trial) {
    std::vector<int> half = {1, 1, 1, trial % 2 ? -1 : 1};
    auto t = random_type_form(rng, adapted(half));
    if (!is_nice(t)) continue;
    ++done;
    auto sk = support_kernel(t);
    CHECK(sk.dim_kernel == 2);
    CHECK(sk.support_is_kernel_perp);
    auto nf = normal_form_dim8(t);
    CHECK(nf.kernel_nonisotropic);
    CHECK(nf.kernel_residual < 1e-9);
  }
  CHECK(done == 10);
}

TEST_CASE("three-form from nabla J") {
  // DJ chosen so that g((D_x J) y, z) is the form from extend_by_type.
  auto f = adapted({1, 1, 1});
  auto t = extend_by_type<Rational>({{0, 1, 2, Rational(1, 2)}}, standard_J<Rational>(3), f);
  std::vector<Mat<Rational>> DJ(6, Mat<Rational>(6, 6));
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y)
      for (int z = 0; z < 6; ++z) DJ[x](z, y) = f.eps[z] * t.eta(x, y, z);
  auto back = threeform_from_nabla_j(DJ, t.g, t.J);
  CHECK(back.eta == t.eta);
}
