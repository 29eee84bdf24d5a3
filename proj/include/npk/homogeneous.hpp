#pragma once

#include <map>
#include <optional>

#include "npk/curvature.hpp"

namespace npk {

// Indices into the m-basis.
struct HVSplit {
  std::vector<int> H, V;
};

// Reductive pair g = h + m with exact structure constants [e_i,e_j] = c(i,j,k) e_k.
struct HomogeneousModel {
  std::string name;
  std::vector<std::string> labels;
  Tensor<Rational> c;  // rank 3 on g
  std::vector<int> h, m;
  Mat<Rational> g;  // on m
  Mat<Rational> J;  // on m
  std::optional<HVSplit> split;
  std::map<std::string, std::string> metadata;

  int dim_g() const { return c.dim(); }
  int dim_m() const { return static_cast<int>(m.size()); }
};

// Throws JacobiViolation, ReductivityViolation, InvarianceViolation,
// DegenerateMetric or ShapeMismatch.
void validate(const HomogeneousModel& model);

// The same checks as reports, for display.
std::vector<IdentityReport> model_reports(const HomogeneousModel& model);

// Bracket data restricted to m, converted to the field F.
template <class F>
struct Reductive {
  int n = 0;
  std::vector<std::vector<Vec<F>>> brm;  // [e_x,e_y]_m
  std::vector<std::vector<Vec<F>>> brh;  // [e_x,e_y]_h in the h-basis
  std::vector<Mat<F>> adh;               // ad(h_k) restricted to m
};

template <class F>
Reductive<F> reductive_data(const HomogeneousModel& model);

// L[x] = Lambda(e_x). Throws DegenerateMetric.
template <class F>
std::vector<Mat<F>> nomizu(const Reductive<F>& red, const Mat<F>& g);

// Torsion-freeness and metric compatibility of Lambda.
template <class F>
std::vector<IdentityReport> nomizu_reports(const Reductive<F>& red, const Mat<F>& g, const std::vector<Mat<F>>& L);

// Curvature endomorphisms R(e_x,e_y) of an invariant connection given by L.
template <class F>
std::vector<std::vector<Mat<F>>> curvature_endos(const Reductive<F>& red, const std::vector<Mat<F>>& L);

// R(W,X,Y,Z) = g(R(W,X)Y,Z).
template <class F>
Tensor<F> curvature_at_origin(const Reductive<F>& red, const std::vector<Mat<F>>& L, const Mat<F>& g);

// Covariant derivative of an invariant endomorphism field: [L_x, T].
template <class F>
std::vector<Mat<F>> derive_endo(const std::vector<Mat<F>>& L, const Mat<F>& T);

// Covariant derivative of the invariant (1,2)-tensor X -> D[X].
template <class F>
std::vector<std::vector<Mat<F>>> derive_endo_family(const std::vector<Mat<F>>& L, const std::vector<Mat<F>>& D);

template <class F>
struct InvariantDerivatives {
  std::vector<Mat<F>> DJ;
  std::vector<std::vector<Mat<F>>> D2J;
};

template <class F>
InvariantDerivatives<F> invariant_derivatives(const std::vector<Mat<F>>& L, const Mat<F>& J);

template <class F>
CurvaturePoint<F> point_at_origin(const Reductive<F>& red, const Mat<F>& g, const Mat<F>& J, const std::string& label);

template <class F>
CurvaturePoint<F> point_at_origin(const HomogeneousModel& model);

template <class F>
struct NearlyKaehlerReport {
  bool nearly = false;
  bool strict = false;
  bool kaehler = false;  // nabla J = 0
  int kernel_dim = 0;    // dim {X : nabla_X J = 0}
  IdentityReport polarization;
  std::optional<F> alpha;  // dim 6, strict
};

template <class F>
NearlyKaehlerReport<F> nearly_kaehler_check(const CurvaturePoint<F>& cp, double tol);

// Canonical Hermitian connection Lambda - J(nabla J)/2: its curvature
// matches the tensor from curvature_lab, J, g and nabla J are parallel.
template <class F>
std::vector<IdentityReport> canonical_connection_reports(const Reductive<F>& red, const CurvaturePoint<F>& cp,
                                                         const std::vector<Mat<F>>& L, Convention conv, double tol);

}  // namespace npk
