#include "npk/matrix.hpp"

namespace npk {

template <class F>
Echelon<F> rref(Mat<F> m, double tol) {
  const int R = m.rows(), C = m.cols();
  const double thresh = tol * std::max(1.0, max_abs(m));
  std::vector<int> pivots;
  int row = 0;
  for (int c = 0; c < C && row < R; ++c) {
    int best = -1;
    double best_abs = 0;
    for (int i = row; i < R; ++i) {
      if (is_zero(m(i, c), thresh)) continue;
      if constexpr (FieldTraits<F>::exact) {
        best = i;
        break;
      } else {
        double a = std::abs(m(i, c));
        if (a > best_abs) best_abs = a, best = i;
      }
    }
    if (best < 0) {
      if constexpr (!FieldTraits<F>::exact)
        for (int i = row; i < R; ++i) m(i, c) = 0;
      continue;
    }
    if (best != row)
      for (int j = 0; j < C; ++j) std::swap(m(row, j), m(best, j));
    F p = m(row, c);
    for (int j = c; j < C; ++j) m(row, j) /= p;
    for (int i = 0; i < R; ++i) {
      if (i == row || m(i, c) == 0) continue;
      F f = m(i, c);
      for (int j = c; j < C; ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(c);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

template <class F>
int rank(const Mat<F>& m, double tol) {
  return static_cast<int>(rref(m, tol).pivots.size());
}

template <class F>
std::vector<Vec<F>> nullspace(const Mat<F>& m, double tol) {
  auto e = rref(m, tol);
  const int C = m.cols();
  std::vector<char> is_pivot(C, 0);
  for (int p : e.pivots) is_pivot[p] = 1;
  std::vector<Vec<F>> basis;
  for (int free = 0; free < C; ++free) {
    if (is_pivot[free]) continue;
    Vec<F> v(C, F(0));
    v[free] = F(1);
    for (size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class F>
Mat<F> inverse(const Mat<F>& m, double tol) {
  if (!m.square()) throw Error(ErrorKind::ShapeMismatch, "inverse of non-square matrix");
  const int n = m.rows();
  Mat<F> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = F(1);
  }
  auto e = rref(aug, tol);
  if (static_cast<int>(e.pivots.size()) < n || e.pivots[n - 1] != n - 1)
    throw Error(ErrorKind::DegenerateMetric, "matrix is singular");
  Mat<F> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
  return inv;
}

template <class F>
Vec<F> solve(const Mat<F>& m, const Vec<F>& b, double tol) {
  const int R = m.rows(), C = m.cols();
  Mat<F> aug(R, C + 1);
  for (int i = 0; i < R; ++i) {
    for (int j = 0; j < C; ++j) aug(i, j) = m(i, j);
    aug(i, C) = b[i];
  }
  auto e = rref(aug, tol);
  Vec<F> x(C, F(0));
  for (size_t r = 0; r < e.pivots.size(); ++r) {
    if (e.pivots[r] == C) throw Error(ErrorKind::NumericalBreakdown, "inconsistent linear system");
    x[e.pivots[r]] = e.reduced(static_cast<int>(r), C);
  }
  return x;
}

template <class F>
int span_rank(const std::vector<Vec<F>>& vs, int n, double tol) {
  if (vs.empty()) return 0;
  return rank(Mat<F>::from_columns(vs, n), tol);
}

#define NPK_INSTANTIATE(F)                                                   \
  template Echelon<F> rref(Mat<F>, double);                                  \
  template int rank(const Mat<F>&, double);                                  \
  template std::vector<Vec<F>> nullspace(const Mat<F>&, double);             \
  template Mat<F> inverse(const Mat<F>&, double);                            \
  template Vec<F> solve(const Mat<F>&, const Vec<F>&, double);               \
  template int span_rank(const std::vector<Vec<F>>&, int, double);

NPK_INSTANTIATE(double)
NPK_INSTANTIATE(Rational)
#undef NPK_INSTANTIATE

}  // namespace npk
