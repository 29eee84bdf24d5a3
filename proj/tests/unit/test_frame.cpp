#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "npk/frame.hpp"

using namespace npk;
using npk::testing::Rng;

namespace {

PseudoFrame random_frame(Rng& rng, int n) {
  PseudoFrame f;
  f.adapted = true;
  for (int i = 0; i < n; ++i) f.eps.push_back(rng.integer(0, 1) ? 1 : -1);
  for (int i = 0; i < n; ++i) f.eps.push_back(f.eps[i]);
  return f;
}

// (g, J) written in the basis given by the columns of P.
template <class F>
std::pair<Mat<F>, Mat<F>> disguise(const PseudoFrame& f, const Mat<F>& P) {
  Mat<F> g = frame_metric<F>(f), J = standard_J<F>(f.complex_dim());
  return {P.transpose() * g * P, inverse(P) * J * P};
}

template <class F>
void check_adapted(const Mat<F>& g, const Mat<F>& J, const AdaptedFrame<F>& af, double tol) {
  const int n = g.rows();
  Mat<F> gram = af.basis.transpose() * g * af.basis;
  Mat<F> want = frame_metric<F>(af.frame);
  CHECK(max_abs(gram - want) <= tol);
  CHECK(max_abs(J * af.basis - af.basis * standard_J<F>(n / 2)) <= tol);
  for (int i = 0; i < n / 2; ++i) CHECK(af.frame.eps[i] == af.frame.eps[i + n / 2]);
}

}  // namespace

TEST_CASE("gram_check reads the signature") {
  Mat<Rational> g(3, 3);
  g(0, 1) = g(1, 0) = 1;  // hyperbolic plane
  g(2, 2) = Rational(-1, 4);
  Signature s = gram_check(g);
  CHECK(s == Signature{1, 2});
  CHECK(gram_check(convert<double>(g)) == Signature{1, 2});
  g(2, 2) = 0;
  CHECK_THROWS_AS(gram_check(g), Error);
  Mat<Rational> asym(2, 2);
  asym(0, 1) = 1;
  asym(1, 0) = 2;
  CHECK_THROWS_AS(gram_check(asym), Error);
}

TEST_CASE("signature is a basis invariant") {
  Rng rng(1);
  for (int trial = 0; trial < 25; ++trial) {
    PseudoFrame f = random_frame(rng, rng.integer(1, 4));
    Mat<Rational> P = rng.unimodular(f.dim());
    auto [g, J] = disguise<Rational>(f, P);
    CHECK(gram_check(g) == f.signature());
    auto cc = check_complex_structure(J, g);
    CHECK(cc.ok);
    CHECK(cc.square_residual == 0.0);
    CHECK(cc.compat_residual == 0.0);
  }
}

TEST_CASE("check_complex_structure rejects a non-compatible J") {
  PseudoFrame f{{1, 1, 1, 1}, true};
  Mat<Rational> g = frame_metric<Rational>(f), J = standard_J<Rational>(2);
  g(0, 0) = 2;
  auto cc = check_complex_structure(J, g);
  CHECK_FALSE(cc.ok);
  CHECK(cc.compat_residual > 0);
  Mat<Rational> K = Mat<Rational>::identity(4);
  CHECK_FALSE(check_complex_structure(K, frame_metric<Rational>(f)).ok);
}

TEST_CASE("adapt_frame on the float backend") {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    PseudoFrame f = random_frame(rng, rng.integer(1, 5));
    Mat<double> P = convert<double>(rng.rational_matrix(f.dim(), f.dim()));
    if (rank(P) < f.dim()) continue;
    auto [g, J] = disguise<double>(f, P);
    auto af = adapt_frame(g, J);
    check_adapted(g, J, af, 1e-9);
    CHECK(af.frame.signature() == f.signature());
  }
}

TEST_CASE("adapt_frame on the exact backend") {
  Rng rng(3);
  int exact_ok = 0, irrational = 0;
  for (int trial = 0; trial < 40; ++trial) {
    PseudoFrame f = random_frame(rng, rng.integer(1, 3));
    Mat<Rational> P = rng.unimodular(f.dim());
    auto [g, J] = disguise<Rational>(f, P);
    try {
      auto af = adapt_frame(g, J);
      check_adapted(g, J, af, 0.0);
      CHECK(af.frame.signature() == f.signature());
      ++exact_ok;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::IrrationalValue);
      ++irrational;
    }
  }
  CHECK(exact_ok > 0);
  // A metric 2 on a J-line cannot be normalized over Q.
  PseudoFrame one{{1, 1}, true};
  Mat<Rational> g = 2 * frame_metric<Rational>(one);
  CHECK_THROWS_AS(adapt_frame(g, standard_J<Rational>(1)), Error);
}

TEST_CASE("adapt_frame finds non-null vectors in a null basis") {
  // Split signature (2,2) written in a basis of null vectors.
  Mat<Rational> g(4, 4);
  g(0, 2) = g(2, 0) = 1;
  g(1, 3) = g(3, 1) = 1;
  // J(e0)=e1, J(e1)=-e0, J(e2)=e3, J(e3)=-e2 preserves g.
  Mat<Rational> J(4, 4);
  J(1, 0) = 1;
  J(0, 1) = -1;
  J(3, 2) = 1;
  J(2, 3) = -1;
  REQUIRE(check_complex_structure(J, g).ok);
  auto af = adapt_frame(convert<double>(g), convert<double>(J));
  check_adapted(convert<double>(g), convert<double>(J), af, 1e-12);
  CHECK(af.frame.signature() == Signature{2, 2});
}
