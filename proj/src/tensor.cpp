#include "npk/tensor.hpp"

namespace npk {

template <class F>
Tensor<F> contract(const Tensor<F>& t, int a, int b, const Mat<F>& ginv) {
  const int k = t.rank(), n = t.dim();
  if (a < 0 || b <= a || b >= k || k < 3) throw Error(ErrorKind::ShapeMismatch, "contract slots");
  if (ginv.rows() != n) throw Error(ErrorKind::ShapeMismatch, "contract metric");
  Tensor<F> out(k - 2, n);
  for (size_t pos = 0; pos < out.size(); ++pos) {
    auto oi = out.index_of(pos);
    std::array<int, 5> full{};
    for (int s = 0, o = 0; s < k; ++s)
      if (s != a && s != b) full[s] = oi[o++];
    F sum(0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (ginv(i, j) == 0) continue;
        full[a] = i;
        full[b] = j;
        sum += ginv(i, j) * t.at(full);
      }
    out.flat(pos) = sum;
  }
  return out;
}

template <class F>
Tensor<F> change_basis(const Tensor<F>& t, const Mat<F>& B) {
  const int k = t.rank(), n = t.dim();
  if (B.rows() != n || B.cols() != n) throw Error(ErrorKind::ShapeMismatch, "change_basis");
  Tensor<F> cur = t;
  for (int s = 0; s < k; ++s) {
    Tensor<F> next(k, n, t.symmetry());
    for (size_t pos = 0; pos < next.size(); ++pos) {
      auto idx = next.index_of(pos);
      int target = idx[s];
      F sum(0);
      for (int j = 0; j < n; ++j) {
        if (B(j, target) == 0) continue;
        idx[s] = j;
        sum += B(j, target) * cur.at(idx);
      }
      next.flat(pos) = sum;
    }
    cur = std::move(next);
  }
  return cur;
}

template Tensor<double> contract(const Tensor<double>&, int, int, const Mat<double>&);
template Tensor<Rational> contract(const Tensor<Rational>&, int, int, const Mat<Rational>&);
template Tensor<double> change_basis(const Tensor<double>&, const Mat<double>&);
template Tensor<Rational> change_basis(const Tensor<Rational>&, const Mat<Rational>&);

}  // namespace npk
