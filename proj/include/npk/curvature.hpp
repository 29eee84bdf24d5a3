#pragma once

#include <optional>

#include "npk/frame.hpp"
#include "npk/report.hpp"
#include "npk/tensor.hpp"

namespace npk {

// Pointwise data in an arbitrary basis e_0..e_{n-1} of the tangent space.
//   DJ[x]      = (nabla_{e_x} J), an endomorphism
//   D2J[w][x]  = nabla^2_{e_w, e_x} J, an endomorphism
//   R(W,X,Y,Z) = g(R(W,X)Y, Z) with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]
template <class F>
struct CurvaturePoint {
  std::string label;
  Mat<F> g;
  Mat<F> J;
  std::vector<Mat<F>> DJ;
  std::optional<std::vector<std::vector<Mat<F>>>> D2J;
  Tensor<F> R;
  PseudoFrame frame;  // signs when the basis is orthonormal, else empty

  int dim() const { return g.rows(); }
};

// Shape checks; throws MissingField or ShapeMismatch.
template <class F>
void require_complete(const CurvaturePoint<F>& cp);

// Symmetries of R and the nearly Kaehler skewness of DJ, as reports.
template <class F>
std::vector<IdentityReport> point_invariants(const CurvaturePoint<F>& cp, double tol);

// The curvature tensor in which the identities below are stated. Under the
// Gray convention R(W,X,Y,Z) = g(R(W,X)Z, Y), i.e. minus the stored tensor.
template <class F>
Tensor<F> identity_curvature(const CurvaturePoint<F>& cp, Convention conv);

// P(W,X,Y,Z) = g((nabla_W J)X, (nabla_Y J)Z).
template <class F>
Tensor<F> nabla_j_pairing(const CurvaturePoint<F>& cp);

template <class F>
std::vector<IdentityReport> gray_identities(const CurvaturePoint<F>& cp, Convention conv, double tol);

template <class F>
struct RicciPair {
  Mat<F> ric, ric_star, r;  // endomorphisms
  Mat<F> ric_cov, ric_star_cov, r_cov;
  Mat<F> r_nabla_cov;  // sum g^{ij} g((nabla_X J)e_i, (nabla_Y J)e_j)
  IdentityReport routes;   // r from curvature vs r from nabla J
  IdentityReport j_commuting;  // [J, Ric] and [J, Ric*]
};

template <class F>
RicciPair<F> ricci_pair(const CurvaturePoint<F>& cp, Convention conv, double tol);

template <class F>
struct CanonicalCurvature {
  Tensor<F> rbar;  // same convention as identity_curvature
  std::vector<IdentityReport> reports;
};

template <class F>
CanonicalCurvature<F> canonical_curvature(const CurvaturePoint<F>& cp, Convention conv, double tol);

template <class F>
IdentityReport thm_curv_identity(const CurvaturePoint<F>& cp, Convention conv, double tol);

template <class F>
std::vector<IdentityReport> second_derivative_identities(const CurvaturePoint<F>& cp, Convention conv, double tol);

template <class F>
struct ConstantType {
  F alpha{};
  Signature signature;
  IdentityReport polarized;  // exhaustive over frame 4-tuples
  IdentityReport sampled;    // seeded random pairs X, Y
  IdentityReport sign_rule;  // sign(alpha) = sign(p - q)
};

// Throws NotConstantType when the polarized relation fails.
template <class F>
ConstantType<F> constant_type(const CurvaturePoint<F>& cp, double tol, unsigned seed = 7);

template <class F>
struct EinsteinResult {
  F lambda{};
  IdentityReport report;
};

template <class F>
EinsteinResult<F> einstein_check(const CurvaturePoint<F>& cp, Convention conv, double tol);

// Same point in the basis given by the columns of B.
template <class F>
CurvaturePoint<F> transform_point(const CurvaturePoint<F>& cp, const Mat<F>& B);

template <class G, class F>
CurvaturePoint<G> convert_point(const CurvaturePoint<F>& cp) {
  CurvaturePoint<G> out;
  out.label = cp.label;
  out.g = convert<G>(cp.g);
  out.J = convert<G>(cp.J);
  for (const auto& m : cp.DJ) out.DJ.push_back(convert<G>(m));
  if (cp.D2J) {
    std::vector<std::vector<Mat<G>>> d2;
    for (const auto& row : *cp.D2J) {
      d2.emplace_back();
      for (const auto& m : row) d2.back().push_back(convert<G>(m));
    }
    out.D2J = std::move(d2);
  }
  out.R = convert<G>(cp.R);
  out.frame = cp.frame;
  return out;
}

// Tensor helpers shared with the submersion module.
template <class F>
Tensor<F> permute_slots(const Tensor<F>& t, const std::array<int, 4>& p);  // out(i) = t(i[p0], .., i[p3])
template <class F>
Tensor<F> apply_j(const Tensor<F>& t, const Mat<F>& J, std::initializer_list<int> slots);
template <class F>
Tensor<F> cyclic_123(const Tensor<F>& t);  // t(W,X,Y,Z) + t(W,Y,Z,X) + t(W,Z,X,Y)

}  // namespace npk
