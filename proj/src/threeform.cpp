#include "npk/threeform.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace npk {

namespace {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;

// Sorts (a,b,c) ascending and returns the permutation sign, 0 on a repeat.
int sort_triple(int& a, int& b, int& c) {
  int s = 1;
  if (a > b) std::swap(a, b), s = -s;
  if (b > c) std::swap(b, c), s = -s;
  if (a > b) std::swap(a, b), s = -s;
  if (a == b || b == c) return 0;
  return s;
}

int perm_sign(std::vector<int> p) {
  int s = 1;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

template <class F>
void put_antisym(Tensor<F>& t, int a, int b, int c, const F& v) {
  t(a, b, c) = v;
  t(b, c, a) = v;
  t(c, a, b) = v;
  t(b, a, c) = -v;
  t(a, c, b) = -v;
  t(c, b, a) = -v;
}

// J as a signed permutation: J e_i = sign[i] e_{image[i]}.
template <class F>
bool signed_permutation(const Mat<F>& J, std::vector<int>& image, std::vector<int>& sign) {
  const int n = J.rows();
  image.assign(n, -1);
  sign.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < n; ++a) {
      if (J(a, i) == 0) continue;
      if (image[i] >= 0) return false;
      if (J(a, i) == F(1)) sign[i] = 1;
      else if (J(a, i) == F(-1)) sign[i] = -1;
      else return false;
      image[i] = a;
    }
    if (image[i] < 0) return false;
  }
  return true;
}

struct ParityUnionFind {
  std::vector<int> parent, rel;  // val[x] = rel[x] * val[parent[x]]
  std::vector<char> zero;
  explicit ParityUnionFind(int n) : parent(n), rel(n, 1), zero(n, 0) { std::iota(parent.begin(), parent.end(), 0); }
  std::pair<int, int> find(int x) {
    if (parent[x] == x) return {x, 1};
    auto [r, s] = find(parent[x]);
    parent[x] = r;
    rel[x] *= s;
    return {r, rel[x]};
  }
  void unite(int x, int y, int s) {  // val[x] = s * val[y]
    auto [rx, sx] = find(x);
    auto [ry, sy] = find(y);
    if (rx == ry) {
      if (sx != s * sy) zero[rx] = 1;
      return;
    }
    // val[rx] = sx * val[x] = sx * s * sy * val[ry]
    parent[rx] = ry;
    rel[rx] = sx * s * sy;
    if (zero[rx]) zero[ry] = 1;
  }
};

template <class F>
Mat<F> inverse_metric(const ThreeForm<F>& t) {
  if (t.orthonormal()) return frame_metric<F>(t.frame);
  return inverse(t.g);
}

// Keeps a maximal independent subset, in order.
template <class F>
std::vector<Vec<F>> independent(const std::vector<Vec<F>>& vs, int n, double tol) {
  std::vector<Vec<F>> out;
  for (const auto& v : vs) {
    out.push_back(v);
    if (span_rank(out, n, tol) < static_cast<int>(out.size())) out.pop_back();
  }
  return out;
}

Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

// The form re-expressed in an adapted orthonormal frame with standard J.
struct AdaptedData {
  Tensor<double> eta;
  std::vector<int> eps;
  Mat<double> B;  // adapted frame vectors as columns, input coordinates
};

template <class F>
AdaptedData adapted_double(const ThreeForm<F>& t, double tol) {
  const int N = t.dim();
  AdaptedData d;
  Mat<double> J = convert<double>(t.J);
  if (t.orthonormal() && J == standard_J<double>(N / 2)) {
    d.eta = convert<double>(t.eta);
    d.eps = t.frame.eps;
    d.B = Mat<double>::identity(N);
    return d;
  }
  auto af = adapt_frame(convert<double>(t.g), J, tol);
  d.B = af.basis;
  d.eps = af.frame.eps;
  d.eta = change_basis(convert<double>(t.eta), af.basis);
  return d;
}

// rho_abc = eta(zeta_a, zeta_b, zeta_c), zeta_a = (e_a - i Je_a)/sqrt 2.
std::vector<cd> complex_components(const Tensor<double>& eta, int n) {
  std::vector<cd> rho(n * n * n);
  const double norm = 1.0 / (2.0 * std::sqrt(2.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        cd s = 0;
        for (int m = 0; m < 8; ++m) {
          int ia = a + ((m & 1) ? n : 0), ib = b + ((m & 2) ? n : 0), ic = c + ((m & 4) ? n : 0);
          cd coef = 1;
          if (m & 1) coef *= cd(0, -1);
          if (m & 2) coef *= cd(0, -1);
          if (m & 4) coef *= cd(0, -1);
          s += coef * eta(ia, ib, ic);
        }
        rho[(a * n + b) * n + c] = s * norm;
      }
  return rho;
}

struct Hermitian {
  std::vector<int> eps;
  cd operator()(const CVec& x, const CVec& y) const {
    cd s = 0;
    for (int a = 0; a < x.size(); ++a) s += x(a) * double(eps[a]) * std::conj(y(a));
    return s;
  }
};

cd rho3(const std::vector<cd>& rho, int n, const CVec& x, const CVec& y, const CVec& z) {
  cd s = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cd xy = x(a) * y(b);
      if (xy == cd(0)) continue;
      for (int c = 0; c < n; ++c) s += xy * z(c) * rho[(a * n + b) * n + c];
    }
  return s;
}

// Real vector X with (X - iJX)/sqrt 2 = sum c_k zeta_k.
Vec<double> realify(const CVec& c) {
  const int n = static_cast<int>(c.size());
  Vec<double> v(2 * n);
  for (int k = 0; k < n; ++k) v[k] = c(k).real(), v[k + n] = c(k).imag();
  return v;
}

}  // namespace

template <class F>
ThreeForm<F> extend_by_type(const std::vector<Assignment<F>>& assignments, const Mat<F>& J, const PseudoFrame& frame) {
  const int N = frame.dim();
  if (J.rows() != N || J.cols() != N) throw Error(ErrorKind::ShapeMismatch, "J does not match the frame");
  std::vector<int> image, sgn;
  if (!signed_permutation(J, image, sgn))
    throw Error(ErrorKind::PreconditionFailed, "J must permute the frame up to sign");

  std::vector<std::array<int, 3>> triples;
  std::vector<int> id(N * N * N, -1);
  for (int a = 0; a < N; ++a)
    for (int b = a + 1; b < N; ++b)
      for (int c = b + 1; c < N; ++c) {
        id[(a * N + b) * N + c] = static_cast<int>(triples.size());
        triples.push_back({a, b, c});
      }
  ParityUnionFind uf(static_cast<int>(triples.size()));
  for (size_t t = 0; t < triples.size(); ++t) {
    auto [a, b, c] = triples[t];
    const int idx[3] = {a, b, c};
    for (int s = 0; s < 3; ++s)
      for (int u = s + 1; u < 3; ++u) {
        int img[3] = {idx[0], idx[1], idx[2]};
        img[s] = image[idx[s]];
        img[u] = image[idx[u]];
        int factor = sgn[idx[s]] * sgn[idx[u]];
        int x = img[0], y = img[1], z = img[2];
        int ps = sort_triple(x, y, z);
        if (ps == 0) {
          uf.zero[uf.find(static_cast<int>(t)).first] = 1;
          continue;
        }
        // factor * ps * val(image) = -val(t)
        uf.unite(static_cast<int>(t), id[(x * N + y) * N + z], -factor * ps);
      }
  }
  // Zero flags may sit on non-roots after unions; push them to roots.
  for (size_t t = 0; t < triples.size(); ++t)
    if (uf.zero[t]) uf.zero[uf.find(static_cast<int>(t)).first] = 1;

  std::vector<std::optional<F>> root_val(triples.size());
  for (const auto& as : assignments) {
    int a = as.i, b = as.j, c = as.k;
    if (a < 0 || b < 0 || c < 0 || a >= N || b >= N || c >= N)
      throw Error(ErrorKind::ShapeMismatch, "assignment index out of range");
    int ps = sort_triple(a, b, c);
    if (ps == 0) {
      if (as.value != 0) throw Error(ErrorKind::InconsistentAssignment, "repeated index with nonzero value");
      continue;
    }
    auto [root, rel] = uf.find(id[(a * N + b) * N + c]);
    F v = F(rel * ps) * as.value;
    if (uf.zero[root] && v != 0)
      throw Error(ErrorKind::InconsistentAssignment,
                  "component (" + std::to_string(as.i) + "," + std::to_string(as.j) + "," + std::to_string(as.k) +
                      ") is forced to vanish by the type relations");
    if (root_val[root] && *root_val[root] != v)
      throw Error(ErrorKind::InconsistentAssignment,
                  "component (" + std::to_string(as.i) + "," + std::to_string(as.j) + "," + std::to_string(as.k) +
                      ") contradicts an earlier assignment");
    root_val[root] = v;
  }

  ThreeForm<F> out;
  out.eta = Tensor<F>(3, N, SymmetryClass::Alternating);
  out.g = frame_metric<F>(frame);
  out.J = J;
  out.frame = frame;
  for (size_t t = 0; t < triples.size(); ++t) {
    auto [root, rel] = uf.find(static_cast<int>(t));
    if (!root_val[root] || uf.zero[root]) continue;
    auto [a, b, c] = triples[t];
    put_antisym(out.eta, a, b, c, F(F(rel) * *root_val[root]));
  }
  return out;
}

template <class F>
ThreeForm<F> threeform_from_nabla_j(const std::vector<Mat<F>>& DJ, const Mat<F>& g, const Mat<F>& J) {
  const int n = g.rows();
  if (static_cast<int>(DJ.size()) != n) throw Error(ErrorKind::ShapeMismatch, "DJ count");
  ThreeForm<F> t;
  t.eta = Tensor<F>(3, n, SymmetryClass::Alternating);
  t.g = g;
  t.J = J;
  for (int x = 0; x < n; ++x) {
    Mat<F> gx = DJ[x].transpose() * g;  // (y,z) -> g(DJ_x e_y, e_z)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) t.eta(x, y, z) = gx(y, z);
  }
  // Record the frame signs when the basis happens to be orthonormal.
  bool diag = true;
  std::vector<int> eps(n);
  for (int i = 0; i < n && diag; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j && g(i, j) != 0) diag = false;
      if (i == j) {
        if (g(i, i) == F(1)) eps[i] = 1;
        else if (g(i, i) == F(-1)) eps[i] = -1;
        else diag = false;
      }
    }
  if (diag) t.frame.eps = eps;
  return t;
}

template <class F>
double antisymmetry_residual(const ThreeForm<F>& t) {
  const int n = t.dim();
  double r = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        r = std::max(r, std::abs(to_double(F(t.eta(a, b, c) + t.eta(b, a, c)))));
        r = std::max(r, std::abs(to_double(F(t.eta(a, b, c) + t.eta(a, c, b)))));
      }
  return r;
}

template <class F>
double type_residual(const ThreeForm<F>& t) {
  const int n = t.dim();
  double r = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        F s = t.eta(a, b, c);
        for (int x = 0; x < n; ++x) {
          if (t.J(x, a) == 0) continue;
          for (int y = 0; y < n; ++y) {
            if (t.J(y, b) == 0) continue;
            s += t.J(x, a) * t.J(y, b) * t.eta(x, y, c);
          }
        }
        r = std::max(r, std::abs(to_double(s)));
      }
  return r;
}

template <class F>
SupportResult<F> support_kernel(const ThreeForm<F>& t, double tol) {
  const int n = t.dim();
  Mat<F> ginv = inverse_metric(t);
  SupportResult<F> res;

  Mat<F> M(n * n, n);
  for (int x = 0; x < n; ++x)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) M(b * n + c, x) = t.eta(x, b, c);
  res.kernel = nullspace(M, tol);

  std::vector<Vec<F>> sharps;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Vec<F> cov(n);
      for (int c = 0; c < n; ++c) cov[c] = t.eta(a, b, c);
      Vec<F> v = ginv * cov;
      if (max_abs(v) > tol) sharps.push_back(std::move(v));
    }
  res.support = independent(sharps, n, tol);
  res.dim_support = static_cast<int>(res.support.size());
  res.dim_kernel = static_cast<int>(res.kernel.size());

  if (res.dim_support == 0) {
    res.support_j_invariant = true;
    res.support_nondegenerate = true;
    res.support_is_kernel_perp = res.dim_kernel == n;
    return res;
  }
  auto both = res.support;
  for (const auto& v : res.support) both.push_back(t.J * v);
  res.support_j_invariant = span_rank(both, n, tol) == res.dim_support;

  Mat<F> S = Mat<F>::from_columns(res.support, n);
  res.support_nondegenerate = rank(Mat<F>(S.transpose() * t.g * S), tol) == res.dim_support;

  std::vector<Vec<F>> kperp;
  if (res.kernel.empty()) {
    for (int i = 0; i < n; ++i) kperp.push_back(unit<F>(n, i));
  } else {
    Mat<F> K = Mat<F>::from_columns(res.kernel, n);
    kperp = nullspace(Mat<F>(K.transpose() * t.g), tol);
  }
  auto joint = res.support;
  joint.insert(joint.end(), kperp.begin(), kperp.end());
  res.support_is_kernel_perp =
      static_cast<int>(kperp.size()) == res.dim_support && span_rank(joint, n, tol) == res.dim_support;

  auto sk = res.support;
  sk.insert(sk.end(), res.kernel.begin(), res.kernel.end());
  res.overlap_dim = res.dim_support + res.dim_kernel - span_rank(sk, n, tol);
  return res;
}

template <class F>
F form_length(const ThreeForm<F>& t) {
  const int n = t.dim();
  if (t.orthonormal()) {
    F s(0);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          const F& v = t.eta(a, b, c);
          if (v == 0) continue;
          s += F(t.frame.eps[a] * t.frame.eps[b] * t.frame.eps[c]) * v * v;
        }
    return s;
  }
  // (1/6) eta_abc eta^abc
  Mat<F> gi = inverse(t.g);
  Tensor<F> up = t.eta;
  for (int slot = 0; slot < 3; ++slot) {
    Tensor<F> next(3, n);
    for (size_t pos = 0; pos < next.size(); ++pos) {
      auto idx = next.index_of(pos);
      int target = idx[slot];
      F s(0);
      for (int j = 0; j < n; ++j) {
        if (gi(target, j) == 0) continue;
        idx[slot] = j;
        s += gi(target, j) * up.at(idx);
      }
      next.flat(pos) = s;
    }
    up = std::move(next);
  }
  F s(0);
  for (size_t i = 0; i < up.size(); ++i) s += up.flat(i) * t.eta.flat(i);
  return s / F(6);
}

template <class F>
bool is_nice(const ThreeForm<F>& t, double tol) {
  F len = form_length(t);
  return !is_zero(len, tol * std::max(1.0, max_abs(t.eta) * max_abs(t.eta)));
}

template <class F>
RSpectrum<F> r_from_threeform(const ThreeForm<F>& t, double tol) {
  const int n = t.dim();
  Mat<F> ginv = inverse_metric(t);
  std::vector<Mat<F>> A(n, Mat<F>(n, n));
  for (int x = 0; x < n; ++x) {
    Mat<F> ex(n, n);
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) ex(c, b) = t.eta(x, b, c);
    A[x] = ginv * ex;  // column b is the sharp of eta(x, e_b, .)
  }
  RSpectrum<F> s;
  s.r_cov = Mat<F>(n, n);
  double trace_res = 0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      Mat<F> G = A[x].transpose() * t.g * A[y];
      F v(0);
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d)
          if (ginv(b, d) != 0) v += ginv(b, d) * G(b, d);
      s.r_cov(x, y) = v;
      Mat<F> P = A[y] * A[x];
      F tr(0);
      for (int i = 0; i < n; ++i) tr += P(i, i);
      trace_res = std::max(trace_res, std::abs(to_double(F(v + tr))));
    }
  s.trace_route_residual = trace_res;
  s.r = ginv * s.r_cov;
  s.symmetry_residual = max_abs(Mat<F>(s.r_cov - s.r_cov.transpose()));
  s.j_commutator = max_abs(commutator(t.J, s.r));

  Mat<double> rd = convert<double>(s.r);
  Mat<double> gd = convert<double>(t.g);
  Eigen::MatrixXd R = to_eigen(rd);
  Eigen::EigenSolver<Eigen::MatrixXd> es(R, false);
  std::vector<cd> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), [](cd a, cd b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  double scale = 1.0;
  for (auto v : ev) scale = std::max(scale, std::abs(v));
  const double gap = 1e-6 * scale;
  std::vector<std::vector<cd>> groups;
  for (auto v : ev) {
    if (!groups.empty() && std::abs(v - groups.back().front()) <= gap) groups.back().push_back(v);
    else groups.push_back({v});
  }
  s.real_spectrum = true;
  int geo_total = 0;
  for (auto& grp : groups) {
    EigenCluster c;
    cd mean = 0;
    for (auto v : grp) mean += v;
    c.value = mean / double(grp.size());
    c.algebraic = static_cast<int>(grp.size());
    if (std::abs(c.value.imag()) > gap) {
      s.real_spectrum = false;
      c.geometric = 0;
      s.clusters.push_back(std::move(c));
      continue;
    }
    c.value = c.value.real();
    Eigen::MatrixXd S = R - c.value.real() * Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    for (int i = 0; i < n; ++i)
      if (sv(i) <= 1e-7 * scale) {
        Vec<double> v(n);
        for (int k = 0; k < n; ++k) v[k] = svd.matrixV()(k, i);
        c.basis.push_back(std::move(v));
      }
    c.geometric = static_cast<int>(c.basis.size());
    geo_total += c.geometric;
    if (!c.basis.empty()) {
      Mat<double> Bm = Mat<double>::from_columns(c.basis, n);
      c.gram = Bm.transpose() * gd * Bm;
    }
    s.clusters.push_back(std::move(c));
  }
  s.diagonalizable = s.real_spectrum && geo_total == n;
  s.decomposable = s.diagonalizable;
  if (s.decomposable) {
    double gscale = std::max(1.0, max_abs(gd));
    for (size_t i = 0; i < s.clusters.size() && s.decomposable; ++i)
      for (size_t j = i + 1; j < s.clusters.size(); ++j) {
        Mat<double> Bi = Mat<double>::from_columns(s.clusters[i].basis, n);
        Mat<double> Bj = Mat<double>::from_columns(s.clusters[j].basis, n);
        if (max_abs(Mat<double>(Bi.transpose() * gd * Bj)) > 1e-8 * gscale) {
          s.decomposable = false;
          break;
        }
      }
  }
  (void)tol;
  return s;
}

template <class F>
int nullity_at(const Mat<F>& r, const F& lambda, double tol) {
  Mat<F> m = r;
  for (int i = 0; i < m.rows(); ++i) m(i, i) -= lambda;
  return m.cols() - rank(m, tol);
}

const char* to_string(Dim10Class c) {
  switch (c) {
    case Dim10Class::SplitsOffKaehler: return "splits-off-Kähler";
    case Dim10Class::TwistorialCandidate: return "twistorial-candidate";
    case Dim10Class::NotDecomposable: return "not-decomposable";
    case Dim10Class::Other: return "other";
  }
  return "other";
}

template <class F>
Dim10Class classify_dim10(const RSpectrum<F>& s, double tol) {
  if (!s.decomposable) return Dim10Class::NotDecomposable;
  double scale = 1.0;
  for (const auto& c : s.clusters) scale = std::max(scale, std::abs(c.value));
  int kernel = 0;
  std::vector<const EigenCluster*> nonzero;
  for (const auto& c : s.clusters) {
    if (std::abs(c.value) <= tol * scale) kernel += c.geometric;
    else nonzero.push_back(&c);
  }
  if (kernel == 4 && nonzero.size() == 1 && nonzero[0]->geometric == 6) return Dim10Class::SplitsOffKaehler;
  if (kernel == 0 && nonzero.size() == 3) {
    std::vector<const EigenCluster*> fours;
    const EigenCluster* two = nullptr;
    for (auto* c : nonzero) {
      if (c->geometric == 4) fours.push_back(c);
      if (c->geometric == 2) two = c;
    }
    // the doubly degenerate value is the sum of the two fourfold ones
    if (two && fours.size() == 2 &&
        std::abs(two->value - fours[0]->value - fours[1]->value) <= tol * scale)
      return Dim10Class::TwistorialCandidate;
  }
  return Dim10Class::Other;
}

template <class F>
ThreeForm<F> canonical_dim10(Dim10Case c, const F& alpha, const F& beta, const std::vector<int>& eps5) {
  if (eps5.size() != 5) throw Error(ErrorKind::ShapeMismatch, "need five signs");
  PseudoFrame fr;
  fr.adapted = true;
  fr.eps = eps5;
  fr.eps.insert(fr.eps.end(), eps5.begin(), eps5.end());
  std::vector<Assignment<F>> as{{0, 1, 2, alpha}};
  if (c == Dim10Case::First) {
    as.push_back({3, 4, 0, beta});
  } else {
    if (eps5[0] != -eps5[2]) throw Error(ErrorKind::PreconditionFailed, "second case needs eps_1 = -eps_3");
    as.push_back({3, 4, 0, F(eps5[0]) * beta});
    as.push_back({3, 4, 2, F(eps5[2]) * beta});
  }
  return extend_by_type(as, standard_J<F>(5), fr);
}

template <class F>
Mat<F> stated_r_dim10(Dim10Case c, const F& alpha, const F& beta, const std::vector<int>& eps5) {
  Mat<F> r(10, 10);
  F a2 = alpha * alpha, b2 = beta * beta;
  if (c == Dim10Case::First) {
    F d[5] = {F(4) * (a2 + b2), F(4) * a2, F(4) * a2, F(4) * b2, F(4) * b2};
    for (int i = 0; i < 5; ++i) r(i, i) = d[i], r(i + 5, i + 5) = d[i];
    return r;
  }
  F e45 = F(eps5[3] * eps5[4]);
  F m11 = F(4) * (a2 + b2 * e45), m13 = F(4) * b2 * e45;
  for (int off : {0, 5}) {
    r(0 + off, 0 + off) = m11;
    r(2 + off, 0 + off) = m13;
    r(0 + off, 2 + off) = m13;
    r(2 + off, 2 + off) = m11;
    r(1 + off, 1 + off) = F(4) * a2;
    r(4 + off, 4 + off) = F(4) * b2 * F(2 * eps5[0] * eps5[3] - 1);
  }
  return r;
}

template <class F>
NormalForm8 normal_form_dim8(const ThreeForm<F>& t, double tol) {
  if (t.dim() != 8) throw Error(ErrorKind::ShapeMismatch, "normal_form_dim8 needs dimension 8");
  if (!is_nice(t, tol)) throw Error(ErrorKind::NullLength, "form has zero length");
  const int n = 4;
  AdaptedData d = adapted_double(t, tol);
  auto rho = complex_components(d.eta, n);
  // rho = Z ⌟ v with v the complex volume zeta^1234.
  CVec Z(n);
  for (int l = 0; l < n; ++l) {
    std::vector<int> rest;
    for (int k = 0; k < n; ++k)
      if (k != l) rest.push_back(k);
    std::vector<int> p{l, rest[0], rest[1], rest[2]};
    Z(l) = double(perm_sign(p)) * rho[(rest[0] * n + rest[1]) * n + rest[2]];
  }
  if (Z.norm() <= tol) throw Error(ErrorKind::NumericalBreakdown, "kernel vector vanished");
  Vec<double> xa = realify(Z);
  Mat<double> Jstd = standard_J<double>(n);
  Vec<double> jxa = Jstd * xa;

  NormalForm8 out;
  out.kernel = {d.B * xa, d.B * jxa};
  Mat<double> gd = convert<double>(t.g);
  double nx = std::max(1e-300, max_abs(out.kernel[0]));
  double gxx = bilinear(gd, out.kernel[0], out.kernel[0]);
  out.kernel_nonisotropic = std::abs(gxx) > tol * nx * nx * std::max(1.0, max_abs(gd));

  Tensor<double> eta = convert<double>(t.eta);
  double res = 0;
  for (int b = 0; b < 8; ++b)
    for (int c = 0; c < 8; ++c) {
      double s = 0;
      for (int a = 0; a < 8; ++a) s += out.kernel[0][a] * eta(a, b, c);
      res = std::max(res, std::abs(s));
    }
  out.kernel_residual = res / (nx * std::max(1e-300, max_abs(eta)));

  auto sk = support_kernel(t, tol);
  std::vector<Vec<double>> ker;
  for (auto& v : sk.kernel) ker.push_back(convert_vec<double>(v));
  for (auto& v : sk.support) out.support.push_back(convert_vec<double>(v));
  auto joint = ker;
  joint.insert(joint.end(), out.kernel.begin(), out.kernel.end());
  out.exact_kernel_agreement =
      (sk.dim_kernel == 2 && span_rank(joint, 8, 1e-8) == 2 && sk.support_is_kernel_perp) ? 0.0 : 1.0;
  return out;
}

template <class F>
NormalForm10 normal_form_dim10(const ThreeForm<F>& t, double tol) {
  if (t.dim() != 10) throw Error(ErrorKind::ShapeMismatch, "normal_form_dim10 needs dimension 10");
  if (!is_nice(t, tol)) throw Error(ErrorKind::NullLength, "form has zero length");
  const int n = 5;
  AdaptedData d = adapted_double(t, tol);
  auto rho = complex_components(d.eta, n);
  std::vector<int> eps5(d.eps.begin(), d.eps.begin() + n);
  Hermitian h{eps5};
  NormalForm10 out;

  // phi with rho = phi ⌟ v.
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int m = l + 1; m < n; ++m) {
      std::vector<int> rest;
      for (int k = 0; k < n; ++k)
        if (k != l && k != m) rest.push_back(k);
      P(l, m) = double(perm_sign({l, m, rest[0], rest[1], rest[2]})) * rho[(rest[0] * n + rest[1]) * n + rest[2]];
      P(m, l) = -P(l, m);
    }
  CVec Zc = CVec::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c) Zc(c) += P(a, b) * rho[(a * n + b) * n + c];
  {
    CVec zs(n);
    for (int c = 0; c < n; ++c) zs(c) = std::conj(Zc(c)) * double(eps5[c]);
    out.z_norm2 = h(zs, zs).real();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        out.phi_norm2 += eps5[a] * eps5[b] * std::norm(P(a, b));
        for (int c = b + 1; c < n; ++c) out.rho_norm2 += eps5[a] * eps5[b] * eps5[c] * std::norm(rho[(a * n + b) * n + c]);
      }
  }

  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) E(a, a) = double(eps5[a]);
  auto Phi = [&](const CVec& x) {
    CVec y(n);
    for (int a = 0; a < n; ++a) y(a) = std::conj(x(a)) * double(eps5[a]);
    return CVec(P * y);
  };
  Eigen::MatrixXcd K = P * E * P.conjugate() * E;
  const double kscale = std::max(1e-300, K.cwiseAbs().maxCoeff());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(K);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return std::abs(ces.eigenvalues()(i)) > std::abs(ces.eigenvalues()(j)); });

  auto rel_norm = [&](const CVec& v) { return std::abs(h(v, v)) / std::max(1e-300, v.squaredNorm()); };
  CVec w1, w2;
  bool found = false;
  for (int i : order) {
    cd lam = ces.eigenvalues()(i);
    if (std::abs(lam) <= tol * kscale) continue;
    Eigen::MatrixXcd S = K - lam * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S, Eigen::ComputeFullV);
    std::vector<CVec> basis;
    for (int k = 0; k < n; ++k)
      if (svd.singularValues()(k) <= 1e-7 * kscale) basis.push_back(svd.matrixV().col(k));
    if (basis.size() < 2) continue;
    std::vector<CVec> cands = basis;
    for (size_t a = 0; a < basis.size(); ++a)
      for (size_t b = a + 1; b < basis.size(); ++b) cands.push_back(basis[a] + basis[b]);
    CVec x = *std::max_element(cands.begin(), cands.end(),
                               [&](const CVec& u, const CVec& v) { return rel_norm(u) < rel_norm(v); });
    CVec y = Phi(x);
    if (rel_norm(x) <= tol || rel_norm(y) <= tol) continue;
    w1 = x / std::sqrt(std::abs(h(x, x)));
    w2 = y / std::sqrt(std::abs(h(y, y)));
    found = true;
    break;
  }
  if (!found) throw Error(ErrorKind::NumericalBreakdown, "no nondegenerate invariant plane");

  auto proj_out = [&](CVec u, const std::vector<CVec>& vs) {
    for (const auto& v : vs) u -= (h(u, v) / h(v, v)) * v;
    return u;
  };
  // Orthonormalize with the largest-|h| pivot first.
  auto gram_schmidt = [&](std::vector<CVec> vs) {
    std::vector<CVec> outv;
    while (true) {
      for (auto& v : vs) v = proj_out(v, outv);
      vs.erase(std::remove_if(vs.begin(), vs.end(), [](const CVec& v) { return v.norm() <= 1e-8; }), vs.end());
      if (vs.empty()) break;
      auto it = std::max_element(vs.begin(), vs.end(),
                                 [&](const CVec& u, const CVec& v) { return rel_norm(u) < rel_norm(v); });
      if (rel_norm(*it) <= tol) throw Error(ErrorKind::NumericalBreakdown, "null pivot in complement");
      outv.push_back(*it / std::sqrt(std::abs(h(*it, *it))));
      vs.erase(it);
    }
    return outv;
  };

  std::vector<CVec> Bb;
  for (int k = 0; k < n && Bb.size() < 3; ++k) {
    CVec u = proj_out(CVec::Unit(n, k), {w1, w2});
    for (const auto& b : Bb) u -= (b.dot(u) / b.squaredNorm()) * b;
    if (u.norm() > 1e-8) Bb.push_back(u);
  }
  if (Bb.size() != 3) throw Error(ErrorKind::NumericalBreakdown, "complement has wrong dimension");

  // Z~(b) = rho(w1, w2, b), represented by z with h(b, z) = Z~(b) on B.
  CVec z(n);
  for (int c = 0; c < n; ++c) {
    cd tc = rho3(rho, n, w1, w2, CVec::Unit(n, c));
    z(c) = std::conj(tc) * double(eps5[c]);
  }
  z = proj_out(z, {w1, w2});
  out.ztilde_l1 = z.cwiseAbs().sum();
  out.ztilde_norm2 = h(z, z).real();
  const double scale = std::max(1.0, std::sqrt(std::abs(out.rho_norm2)));

  std::vector<CVec> zeta(5);
  zeta[3] = w1;
  zeta[4] = w2;
  auto second_case = [&](const CVec& zz) {
    int k = 0;
    double best = -1;
    for (int i = 0; i < 3; ++i)
      if (std::abs(h(Bb[i], zz)) > best) best = std::abs(h(Bb[i], zz)), k = i;
    CVec y = Bb[k] / std::conj(h(zz, Bb[k]));
    y -= (h(y, y).real() / 2.0) * zz;
    CVec up = (zz + y) / std::sqrt(2.0), um = (zz - y) / std::sqrt(2.0);
    std::vector<CVec> rest;
    for (const auto& b : Bb) rest.push_back(proj_out(b, {up, um}));
    auto mid = gram_schmidt(rest);
    if (mid.empty()) throw Error(ErrorKind::NumericalBreakdown, "second case: empty complement");
    zeta[0] = um;
    zeta[1] = mid[0];
    zeta[2] = up;
  };

  if (out.ztilde_l1 <= tol * scale) {
    out.kind = Dim10Case::First;
    auto ob = gram_schmidt(Bb);
    for (int i = 0; i < 3; ++i) zeta[i] = ob[i];
  } else if (std::abs(out.ztilde_norm2) > tol * out.ztilde_l1 * out.ztilde_l1) {
    out.kind = Dim10Case::First;
    zeta[0] = z / std::sqrt(std::abs(out.ztilde_norm2));
    std::vector<CVec> rest;
    for (const auto& b : Bb) rest.push_back(proj_out(b, {zeta[0]}));
    auto ob = gram_schmidt(rest);
    zeta[1] = ob[0];
    zeta[2] = ob[1];
  } else {
    out.kind = Dim10Case::Second;
    second_case(z);
  }

  auto fix_phases = [&] {
    cd a = rho3(rho, n, zeta[0], zeta[1], zeta[2]);
    if (std::abs(a) <= tol * scale) throw Error(ErrorKind::NumericalBreakdown, "leading constant vanished");
    zeta[1] *= std::conj(a) / std::abs(a);
    cd b = out.kind == Dim10Case::First ? rho3(rho, n, zeta[0], zeta[3], zeta[4]) : rho3(rho, n, zeta[3], zeta[4], zeta[2]);
    if (std::abs(b) > tol * scale) zeta[3] *= std::conj(b) / std::abs(b);
  };
  fix_phases();
  if (out.kind == Dim10Case::Second) {
    // The null pair can be boosted; normalize so that beta = alpha.
    double a = rho3(rho, n, zeta[0], zeta[1], zeta[2]).real();
    double b = rho3(rho, n, zeta[3], zeta[4], zeta[2]).real();
    second_case(z * (b / a));
    zeta[3] = w1;
    fix_phases();
  }

  Mat<double> Jstd = standard_J<double>(n);
  auto build_basis = [&] {
    std::vector<Vec<double>> cols;
    for (int i = 0; i < n; ++i) cols.push_back(realify(zeta[i]));
    for (int i = 0; i < n; ++i) cols.push_back(Jstd * cols[i]);
    return Mat<double>::from_columns(cols, 2 * n);
  };
  Mat<double> B = build_basis();
  Tensor<double> etaN = change_basis(d.eta, B);
  double alpha = etaN(0, 1, 2);
  double beta = out.kind == Dim10Case::First ? etaN(3, 4, 0) : etaN(3, 4, 2) * double(h(zeta[2], zeta[2]).real() > 0 ? 1 : -1);
  if (out.kind == Dim10Case::First && std::abs(beta) > tol * scale && std::abs(alpha) > std::abs(beta) * (1 + 1e-9)) {
    std::swap(zeta[1], zeta[3]);
    std::swap(zeta[2], zeta[4]);
    B = build_basis();
    etaN = change_basis(d.eta, B);
    alpha = etaN(0, 1, 2);
    beta = etaN(3, 4, 0);
  }

  out.alpha = alpha;
  out.beta = beta;
  std::vector<int> neps(5);
  for (int i = 0; i < 5; ++i) neps[i] = h(zeta[i], zeta[i]).real() > 0 ? 1 : -1;
  out.eps = neps;
  out.eps.insert(out.eps.end(), neps.begin(), neps.end());
  Mat<double> G = B.transpose() * frame_metric<double>(PseudoFrame{d.eps, true}) * B;
  out.gram_residual = max_abs(Mat<double>(G - frame_metric<double>(PseudoFrame{out.eps, true})));

  auto canon = canonical_dim10<double>(out.kind, alpha, beta, neps);
  double rec = 0;
  for (size_t i = 0; i < etaN.size(); ++i) rec = std::max(rec, std::abs(etaN.flat(i) - canon.eta.flat(i)));
  out.reconstruction_residual = rec / std::max(1e-300, max_abs(etaN));
  if (out.reconstruction_residual > 1e-6 || out.gram_residual > 1e-6)
    throw Error(ErrorKind::NumericalBreakdown, "normal form does not reproduce the input");
  out.basis = d.B * B;
  return out;
}

#define NPK_INSTANTIATE(F)                                                                                   \
  template ThreeForm<F> extend_by_type(const std::vector<Assignment<F>>&, const Mat<F>&, const PseudoFrame&); \
  template ThreeForm<F> threeform_from_nabla_j(const std::vector<Mat<F>>&, const Mat<F>&, const Mat<F>&);     \
  template double antisymmetry_residual(const ThreeForm<F>&);                                                \
  template double type_residual(const ThreeForm<F>&);                                                        \
  template SupportResult<F> support_kernel(const ThreeForm<F>&, double);                                     \
  template F form_length(const ThreeForm<F>&);                                                               \
  template bool is_nice(const ThreeForm<F>&, double);                                                        \
  template RSpectrum<F> r_from_threeform(const ThreeForm<F>&, double);                                       \
  template int nullity_at(const Mat<F>&, const F&, double);                                                  \
  template Dim10Class classify_dim10(const RSpectrum<F>&, double);                                           \
  template ThreeForm<F> canonical_dim10(Dim10Case, const F&, const F&, const std::vector<int>&);             \
  template Mat<F> stated_r_dim10(Dim10Case, const F&, const F&, const std::vector<int>&);                    \
  template NormalForm8 normal_form_dim8(const ThreeForm<F>&, double);                                        \
  template NormalForm10 normal_form_dim10(const ThreeForm<F>&, double);

NPK_INSTANTIATE(double)
NPK_INSTANTIATE(Rational)
#undef NPK_INSTANTIATE

}  // namespace npk
