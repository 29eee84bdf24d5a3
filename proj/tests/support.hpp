#pragma once

// Seeded generators shared by the unit and acceptance tests.
#include <random>

#include "npk/matrix.hpp"

namespace npk::testing {

class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

  // p/q with |p| <= num, 1 <= q <= den.
  Rational rational(int num = 9, int den = 6) {
    Rational q(integer(-num, num), integer(1, den));
    q.canonicalize();
    return q;
  }
  Rational nonzero_rational(int num = 9, int den = 6) {
    for (;;) {
      Rational q = rational(num, den);
      if (sgn(q) != 0) return q;
    }
  }
  double real(double lo = -1, double hi = 1) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  Mat<Rational> rational_matrix(int r, int c) {
    Mat<Rational> m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = rational();
    return m;
  }
  // Invertible with small entries: unit lower times unit upper triangular.
  Mat<Rational> unimodular(int n) {
    Mat<Rational> lo = Mat<Rational>::identity(n), up = Mat<Rational>::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) {
        lo(i, j) = integer(-1, 1);
        up(j, i) = integer(-1, 1);
      }
    return lo * up;
  }
  // A rational isometry of an adapted frame e_1..e_n, Je_1..Je_n (signs
  // eps[0..n-1]) that commutes with J, as a product of Pythagorean rotations
  // and boosts. Columns are the images of the frame vectors.
  Mat<Rational> unitary(const std::vector<int>& eps, int steps = 6) {
    const int n = static_cast<int>(eps.size());
    Mat<Rational> P = Mat<Rational>::identity(2 * n);
    static const int kTriples[][3] = {{3, 4, 5}, {5, 12, 13}, {8, 15, 17}, {7, 24, 25}};
    for (int s = 0; s < steps; ++s) {
      const auto& tr = kTriples[integer(0, 3)];
      Mat<Rational> step = Mat<Rational>::identity(2 * n);
      const int i = integer(0, n - 1), j = integer(0, n - 1);
      auto put = [&](int a, int b, Rational aa, Rational ab, Rational ba, Rational bb) {
        step(a, a) = aa, step(b, a) = ab, step(a, b) = ba, step(b, b) = bb;
      };
      if (i == j) {
        // e_i -> c e_i + s Je_i
        Rational c(tr[0], tr[2]), sn(tr[1], tr[2]);
        put(i, i + n, c, sn, -sn, c);
      } else if (eps[i] == eps[j]) {
        Rational c(tr[0], tr[2]), sn(tr[1], tr[2]);
        put(i, j, c, sn, -sn, c);
        put(i + n, j + n, c, sn, -sn, c);
      } else {
        // cosh = c/b, sinh = a/b for a Pythagorean triple (a, b, c)
        Rational ch(tr[2], tr[1]), sh(tr[0], tr[1]);
        put(i, j, ch, sh, sh, ch);
        put(i + n, j + n, ch, sh, sh, ch);
      }
      P = P * step;
    }
    return P;
  }

  std::mt19937& engine() { return gen_; }

 private:
  std::mt19937 gen_;
};

}  // namespace npk::testing
