#pragma once

#include <algorithm>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "npk/scalar.hpp"

namespace npk {

template <class F>
using Vec = std::vector<F>;

template <class F>
class Mat {
 public:
  Mat() = default;
  Mat(int r, int c) : r_(r), c_(c), a_(static_cast<size_t>(r) * c, F(0)) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = F(1);
    return m;
  }
  static Mat from_columns(const std::vector<Vec<F>>& cols, int rows) {
    Mat m(rows, static_cast<int>(cols.size()));
    for (int j = 0; j < m.c_; ++j) m.set_col(j, cols[j]);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  bool square() const { return r_ == c_; }

  F& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
  const F& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

  Vec<F> col(int j) const {
    Vec<F> v(r_);
    for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_col(int j, const Vec<F>& v) {
    for (int i = 0; i < r_; ++i) (*this)(i, j) = v[i];
  }

  Mat transpose() const {
    Mat t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat& operator+=(const Mat& o) {
    check_same(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    check_same(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Mat& operator*=(const F& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator-(Mat a) {
    for (auto& x : a.a_) x = -x;
    return a;
  }
  friend Mat operator*(const F& s, Mat a) { return a *= s; }
  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.c_ != b.r_) throw Error(ErrorKind::ShapeMismatch, "matrix product");
    Mat p(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const F& aik = a(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < b.c_; ++j) p(i, j) += aik * b(k, j);
      }
    return p;
  }
  friend Vec<F> operator*(const Mat& a, const Vec<F>& v) {
    if (a.c_ != static_cast<int>(v.size())) throw Error(ErrorKind::ShapeMismatch, "matrix-vector product");
    Vec<F> out(a.r_, F(0));
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) out[i] += a(i, k) * v[k];
    return out;
  }
  friend bool operator==(const Mat& a, const Mat& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_; }

  const std::vector<F>& data() const { return a_; }

 private:
  void check_same(const Mat& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw Error(ErrorKind::ShapeMismatch, "matrix sum");
  }
  int r_ = 0, c_ = 0;
  std::vector<F> a_;
};

template <class F>
Mat<F> commutator(const Mat<F>& a, const Mat<F>& b) { return a * b - b * a; }

template <class F>
double max_abs(const Mat<F>& m) {
  double r = 0;
  for (const auto& x : m.data()) r = std::max(r, std::abs(to_double(x)));
  return r;
}

template <class F>
double max_abs(const Vec<F>& v) {
  double r = 0;
  for (const auto& x : v) r = std::max(r, std::abs(to_double(x)));
  return r;
}

template <class F>
bool is_zero(const Mat<F>& m, double tol) {
  for (const auto& x : m.data())
    if (!is_zero(x, tol)) return false;
  return true;
}

template <class G, class F>
Mat<G> convert(const Mat<F>& m) {
  Mat<G> out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if constexpr (std::is_same_v<G, double>) out(i, j) = to_double(m(i, j));
      else out(i, j) = G(m(i, j));
    }
  return out;
}

template <class G, class F>
Vec<G> convert_vec(const Vec<F>& v) {
  Vec<G> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if constexpr (std::is_same_v<G, double>) out[i] = to_double(v[i]);
    else out[i] = G(v[i]);
  }
  return out;
}

template <class F>
Vec<F> unit(int n, int i) {
  Vec<F> v(n, F(0));
  v[i] = F(1);
  return v;
}

template <class F>
F dot(const Vec<F>& a, const Vec<F>& b) {
  F s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Bilinear form g(u, v) = u^T G v.
template <class F>
F bilinear(const Mat<F>& g, const Vec<F>& u, const Vec<F>& v) {
  F s(0);
  for (int i = 0; i < g.rows(); ++i) {
    if (u[i] == 0) continue;
    for (int j = 0; j < g.cols(); ++j) s += u[i] * g(i, j) * v[j];
  }
  return s;
}

template <class F>
Vec<F> axpy(const F& a, const Vec<F>& x, Vec<F> y) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  return y;
}

// Gaussian elimination shared by both backends. For double the pivot is the
// largest entry and entries below tol * scale count as zero; for rationals the
// tolerance is ignored.
template <class F>
struct Echelon {
  Mat<F> reduced;
  std::vector<int> pivots;
};

template <class F>
Echelon<F> rref(Mat<F> m, double tol = 1e-12);

template <class F>
int rank(const Mat<F>& m, double tol = 1e-12);

// Basis of {x : m x = 0}.
template <class F>
std::vector<Vec<F>> nullspace(const Mat<F>& m, double tol = 1e-12);

template <class F>
Mat<F> inverse(const Mat<F>& m, double tol = 1e-12);

template <class F>
Vec<F> solve(const Mat<F>& m, const Vec<F>& b, double tol = 1e-12);

// Rank of the column span of a list of vectors.
template <class F>
int span_rank(const std::vector<Vec<F>>& vs, int n, double tol = 1e-12);

}  // namespace npk
