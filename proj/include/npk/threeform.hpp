#pragma once

#include <complex>

#include "npk/frame.hpp"
#include "npk/tensor.hpp"

namespace npk {

// Components eta(e_a, e_b, e_c) in a basis with metric g. When the basis is an
// orthonormal frame, `frame` carries its signs; otherwise frame.eps is empty.
template <class F>
struct ThreeForm {
  Tensor<F> eta;
  Mat<F> g;
  Mat<F> J;
  PseudoFrame frame;

  int dim() const { return eta.dim(); }
  bool orthonormal() const { return !frame.eps.empty(); }
};

template <class F>
struct Assignment {
  int i, j, k;
  F value;
};

// Unique antisymmetric extension with eta(JX,JY,Z) = -eta(X,Y,Z). J must act
// on the frame as a signed permutation.
template <class F>
ThreeForm<F> extend_by_type(const std::vector<Assignment<F>>& assignments, const Mat<F>& J, const PseudoFrame& frame);

// eta(X,Y,Z) = g((D_X J)Y, Z) from the matrices DJ[x] = D_{e_x} J.
template <class F>
ThreeForm<F> threeform_from_nabla_j(const std::vector<Mat<F>>& DJ, const Mat<F>& g, const Mat<F>& J);

template <class F>
double antisymmetry_residual(const ThreeForm<F>& t);
template <class F>
double type_residual(const ThreeForm<F>& t);

template <class F>
struct SupportResult {
  std::vector<Vec<F>> support;  // basis of Sigma
  std::vector<Vec<F>> kernel;   // basis of K
  int dim_support = 0;
  int dim_kernel = 0;
  bool support_j_invariant = false;
  bool support_nondegenerate = false;
  bool support_is_kernel_perp = false;
  int overlap_dim = 0;  // dim(Sigma ∩ K)
};

template <class F>
SupportResult<F> support_kernel(const ThreeForm<F>& t, double tol = 1e-10);

// <eta,eta> = sum_{a<b<c} eps_a eps_b eps_c eta_abc^2 in an orthonormal frame;
// in a general basis the same number via the inverse metric.
template <class F>
F form_length(const ThreeForm<F>& t);

// A nonzero length is the pointwise "nice" condition.
template <class F>
bool is_nice(const ThreeForm<F>& t, double tol = 1e-10);

struct EigenCluster {
  std::complex<double> value;
  int algebraic = 0;
  int geometric = 0;
  std::vector<Vec<double>> basis;
  Mat<double> gram;
};

template <class F>
struct RSpectrum {
  Mat<F> r;      // endomorphism
  Mat<F> r_cov;  // g(rX, Y)
  std::vector<EigenCluster> clusters;
  bool diagonalizable = false;
  bool decomposable = false;
  bool real_spectrum = false;
  double symmetry_residual = 0;  // g(rX,Y) - g(X,rY)
  double j_commutator = 0;       // [J, r]
  double trace_route_residual = 0;  // agreement with -tr(A_Y A_X)
};

template <class F>
RSpectrum<F> r_from_threeform(const ThreeForm<F>& t, double tol = 1e-10);

// dim ker(r - lambda), exact on the rational backend.
template <class F>
int nullity_at(const Mat<F>& r, const F& lambda, double tol = 1e-9);

enum class Dim10Class { SplitsOffKaehler, TwistorialCandidate, NotDecomposable, Other };
const char* to_string(Dim10Class c);

template <class F>
Dim10Class classify_dim10(const RSpectrum<F>& s, double tol = 1e-8);

enum class Dim10Case { First, Second };

// The two model forms in an adapted frame e_1..e_5, Je_1..Je_5 (indices 0..9).
// First: eta(e1,e2,e3)=alpha, eta(e4,e5,e1)=beta.
// Second: eta(e1,e2,e3)=alpha, eta(e4,e5,X)=beta g(e1+e3,X), eps_1 = -eps_3.
template <class F>
ThreeForm<F> canonical_dim10(Dim10Case c, const F& alpha, const F& beta, const std::vector<int>& eps5);

// The r-matrices stated for the two model forms, as endomorphisms in the
// adapted frame. The first case carries no sign dependence as stated.
template <class F>
Mat<F> stated_r_dim10(Dim10Case c, const F& alpha, const F& beta, const std::vector<int>& eps5);

struct NormalForm8 {
  std::vector<Vec<double>> kernel;  // X, JX spanning the real kernel plane
  std::vector<Vec<double>> support;
  bool kernel_nonisotropic = false;
  double kernel_residual = 0;      // |X ⌟ eta|
  double exact_kernel_agreement = 0;  // 0 when the constructed plane equals ker(eta)
};

template <class F>
NormalForm8 normal_form_dim8(const ThreeForm<F>& t, double tol = 1e-10);

struct NormalForm10 {
  Dim10Case kind = Dim10Case::First;
  double alpha = 0, beta = 0;
  Mat<double> basis;  // columns e_1..e_5, Je_1..Je_5 in input coordinates
  std::vector<int> eps;  // length 10
  double reconstruction_residual = 0;
  double gram_residual = 0;
  // Diagnostics of the construction.
  double z_norm2 = 0, phi_norm2 = 0, rho_norm2 = 0;
  double ztilde_norm2 = 0, ztilde_l1 = 0;
};

template <class F>
NormalForm10 normal_form_dim10(const ThreeForm<F>& t, double tol = 1e-9);

}  // namespace npk
