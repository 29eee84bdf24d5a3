#pragma once

#include <array>
#include <initializer_list>

#include "npk/matrix.hpp"

namespace npk {

enum class SymmetryClass { None, Alternating, CurvatureLike };

// Dense covariant k-tensor on an n-dimensional space (k <= 5).
template <class F>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rank, int dim, SymmetryClass sym = SymmetryClass::None)
      : k_(rank), n_(dim), sym_(sym), a_(ipow(dim, rank), F(0)) {
    if (rank < 1 || rank > 5) throw Error(ErrorKind::ShapeMismatch, "tensor rank out of range");
  }

  int rank() const { return k_; }
  int dim() const { return n_; }
  SymmetryClass symmetry() const { return sym_; }
  void set_symmetry(SymmetryClass s) { sym_ = s; }

  template <class... I>
  F& operator()(I... idx) { return a_[offset({static_cast<int>(idx)...})]; }
  template <class... I>
  const F& operator()(I... idx) const { return a_[offset({static_cast<int>(idx)...})]; }

  F& at(const std::array<int, 5>& idx) { return a_[offset_arr(idx)]; }
  const F& at(const std::array<int, 5>& idx) const { return a_[offset_arr(idx)]; }

  size_t size() const { return a_.size(); }
  F& flat(size_t i) { return a_[i]; }
  const F& flat(size_t i) const { return a_[i]; }
  const std::vector<F>& data() const { return a_; }

  // Decode a flat position into its multi-index.
  std::array<int, 5> index_of(size_t pos) const {
    std::array<int, 5> idx{};
    for (int s = k_ - 1; s >= 0; --s) {
      idx[s] = static_cast<int>(pos % n_);
      pos /= n_;
    }
    return idx;
  }

  friend bool operator==(const Tensor& a, const Tensor& b) { return a.k_ == b.k_ && a.n_ == b.n_ && a.a_ == b.a_; }

 private:
  static size_t ipow(int b, int e) {
    size_t r = 1;
    for (int i = 0; i < e; ++i) r *= static_cast<size_t>(b);
    return r;
  }
  size_t offset(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != k_) throw Error(ErrorKind::ShapeMismatch, "tensor index arity");
    size_t o = 0;
    for (int i : idx) o = o * n_ + i;
    return o;
  }
  size_t offset_arr(const std::array<int, 5>& idx) const {
    size_t o = 0;
    for (int s = 0; s < k_; ++s) o = o * n_ + idx[s];
    return o;
  }

  int k_ = 0, n_ = 0;
  SymmetryClass sym_ = SymmetryClass::None;
  std::vector<F> a_;
};

template <class F>
double max_abs(const Tensor<F>& t) {
  double r = 0;
  for (const auto& x : t.data()) r = std::max(r, std::abs(to_double(x)));
  return r;
}

// Trace over slots a < b with the inverse metric: sum g^{ij} T(.., e_i, .., e_j, ..).
template <class F>
Tensor<F> contract(const Tensor<F>& t, int a, int b, const Mat<F>& ginv);

// Components with respect to a new basis whose vectors are the columns of B.
template <class F>
Tensor<F> change_basis(const Tensor<F>& t, const Mat<F>& B);

template <class G, class F>
Tensor<G> convert(const Tensor<F>& t) {
  Tensor<G> out(t.rank(), t.dim(), t.symmetry());
  for (size_t i = 0; i < t.size(); ++i) {
    if constexpr (std::is_same_v<G, double>) out.flat(i) = to_double(t.flat(i));
    else out.flat(i) = G(t.flat(i));
  }
  return out;
}

}  // namespace npk
