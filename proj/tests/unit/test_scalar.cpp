#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "npk/report.hpp"
#include "npk/tensor.hpp"

using namespace npk;
using npk::testing::Rng;

TEST_CASE("parse_rational accepts fractions, integers and decimals") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(parse_rational(" 2/3 ") == Rational(2, 3));
  for (const char* bad : {"", "1/0", "abc", "1e3", "1/2/3", "-"}) {
    CHECK_THROWS_AS(parse_rational(bad), Error);
  }
}

TEST_CASE("format_rational round-trips") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Rational q = rng.rational(1000, 97);
    CHECK(parse_rational(format_rational(q)) == q);
  }
  CHECK(format_rational(Rational(4) / 2) == "2");
  CHECK(format_rational(Rational(-1, 3)) == "-1/3");
}

TEST_CASE("Scalar keeps exactness until a float enters") {
  Scalar a(Rational(1, 3)), b(Rational(2, 3));
  CHECK((a + b).exact());
  CHECK((a + b).rational() == 1);
  Scalar c = a * Scalar(0.5);
  CHECK_FALSE(c.exact());
  CHECK(c.to_double() == doctest::Approx(1.0 / 6));
  CHECK_THROWS_AS(a / Scalar(Rational(0)), Error);
  CHECK_THROWS_AS(Scalar(std::nan("")), Error);
  CHECK_THROWS_AS(Scalar(0.5).rational(), Error);
  CHECK((-a).rational() == Rational(-1, 3));
}

TEST_CASE("FieldTraits sqrt only returns rational roots") {
  CHECK(*FieldTraits<Rational>::sqrt(Rational(9, 4)) == Rational(3, 2));
  CHECK_FALSE(FieldTraits<Rational>::sqrt(Rational(2)).has_value());
  CHECK_FALSE(FieldTraits<Rational>::sqrt(Rational(-4)).has_value());
  CHECK(*FieldTraits<double>::sqrt(2.0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("exact inverse and solve") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.integer(1, 7);
    Mat<Rational> m = rng.rational_matrix(n, n);
    if (rank(m) < n) continue;
    Mat<Rational> inv = inverse(m);
    CHECK(m * inv == Mat<Rational>::identity(n));
    CHECK(inv * m == Mat<Rational>::identity(n));
    Vec<Rational> b(n);
    for (auto& x : b) x = rng.rational();
    CHECK(m * solve(m, b) == b);
  }
  Mat<Rational> singular(2, 2);
  singular(0, 0) = 1;
  singular(0, 1) = 2;
  singular(1, 0) = 2;
  singular(1, 1) = 4;
  CHECK_THROWS_AS(inverse(singular), Error);
}

TEST_CASE("rank plus nullity") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int r = rng.integer(1, 6), c = rng.integer(1, 7), k = rng.integer(1, std::min(r, c));
    // A product of an r x k and a k x c matrix has rank at most k.
    Mat<Rational> m = rng.rational_matrix(r, k) * rng.rational_matrix(k, c);
    const int rk = rank(m);
    auto ns = nullspace(m);
    CHECK(rk <= k);
    CHECK(rk + static_cast<int>(ns.size()) == c);
    for (const auto& v : ns) CHECK(max_abs(m * v) == 0.0);
    CHECK(span_rank(ns, c) == static_cast<int>(ns.size()));
  }
}

TEST_CASE("float elimination agrees with the exact one") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(2, 6);
    Mat<Rational> m = rng.unimodular(n);
    Mat<double> inv = inverse(convert<double>(m));
    Mat<double> ref = convert<double>(inverse(m));
    CHECK(max_abs(inv - ref) < 1e-12);
  }
}

TEST_CASE("tensor contraction against a hand sum") {
  Rng rng(21);
  const int n = 4;
  Tensor<Rational> t(3, n);
  for (size_t i = 0; i < t.size(); ++i) t.flat(i) = rng.rational();
  Mat<Rational> g(n, n);
  for (int i = 0; i < n; ++i) g(i, i) = (i % 2) ? -1 : 2;
  Mat<Rational> ginv = inverse(g);
  Tensor<Rational> c = contract(t, 0, 2, ginv);
  REQUIRE(c.rank() == 1);
  for (int x = 0; x < n; ++x) {
    Rational s = 0;
    for (int i = 0; i < n; ++i) s += ginv(i, i) * t(i, x, i);
    CHECK(c(x) == s);
  }
}

TEST_CASE("change_basis is functorial") {
  Rng rng(22);
  const int n = 3;
  Tensor<Rational> t(2, n);
  for (size_t i = 0; i < t.size(); ++i) t.flat(i) = rng.rational();
  Mat<Rational> a = rng.unimodular(n), b = rng.unimodular(n);
  CHECK(change_basis(change_basis(t, a), b) == change_basis(t, a * b));
  // For a bilinear form, components in the new basis are B^T T B.
  Mat<Rational> tm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tm(i, j) = t(i, j);
  Mat<Rational> want = a.transpose() * tm * a;
  Tensor<Rational> got = change_basis(t, a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(got(i, j) == want(i, j));
}

TEST_CASE("tensor shape errors") {
  CHECK_THROWS_AS(Tensor<double>(0, 3), Error);
  CHECK_THROWS_AS(Tensor<double>(6, 3), Error);
  Tensor<double> t(2, 3);
  CHECK_THROWS_AS(t(0, 1, 2), Error);
  Mat<double> a(2, 3), b(2, 3);
  CHECK_THROWS_AS(a * b, Error);
}

TEST_CASE("Residual passes exactly only on zero differences") {
  Residual<Rational> r;
  r.add(Rational(0), {0});
  CHECK(r.report("x", "", 1.0).pass);
  r.add(Rational(1, 1000000000), {1, 2});
  auto rep = r.report("x", "", 1.0);
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness == std::vector<int>{1, 2});
  Residual<double> d;
  d.add(1e-12, {3});
  CHECK(d.report("y", "", 1e-10).pass);
  CHECK_FALSE(d.report("y", "", 1e-13).pass);
}
