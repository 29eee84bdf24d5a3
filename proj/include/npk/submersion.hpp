#pragma once

#include "npk/homogeneous.hpp"

namespace npk {

// Orthogonal splitting T = H + V of the tangent space at the origin, given by
// index sets over the basis. L holds the Levi-Civita map of g when the point
// comes from a reductive model; it is empty for bare curvature points.
template <class F>
struct SubmersionSplit {
  CurvaturePoint<F> point;
  std::optional<Reductive<F>> red;
  std::vector<Mat<F>> L;
  std::vector<int> H, V;
  Mat<F> piH, piV;

  int dim() const { return point.dim(); }
  bool has_connection() const { return !L.empty(); }
};

// Throws ShapeMismatch unless H and V partition the basis, PreconditionFailed
// if they are not g-orthogonal.
template <class F>
SubmersionSplit<F> make_split(const Reductive<F>& red, const Mat<F>& g, const Mat<F>& J, const std::vector<int>& H,
                              const std::vector<int>& V, const std::string& label);
template <class F>
SubmersionSplit<F> make_split(const CurvaturePoint<F>& cp, const std::vector<int>& H, const std::vector<int>& V);
// Uses the model's HV split; PreconditionFailed if it has none.
template <class F>
SubmersionSplit<F> make_split(const HomogeneousModel& model);

// Projector algebra, orthogonality and J-invariance.
template <class F>
std::vector<IdentityReport> split_reports(const SubmersionSplit<F>& s, double tol);

template <class F>
bool j_invariant(const SubmersionSplit<F>& s);

// A[z] and T[z] are the endomorphisms A_z, T_z.
template <class F>
struct OneillTensors {
  std::vector<Mat<F>> A, T;
  std::vector<IdentityReport> reports;
};

// Throws MissingConnection without L.
template <class F>
OneillTensors<F> oneill_tensors(const SubmersionSplit<F>& s, double tol);

template <class F>
struct Variation {
  F t;
  SubmersionSplit<F> split;  // with g_t
  std::vector<IdentityReport> reports;
};

// g_t = g on H, t g on V. Throws ZeroParameter, MissingConnection.
template <class F>
Variation<F> canonical_variation(const SubmersionSplit<F>& s, const F& t, double tol);

// Connection map of g_t assembled from L, A and T.
template <class F>
std::vector<Mat<F>> variation_connection(const SubmersionSplit<F>& s, const OneillTensors<F>& ot, const F& t);

template <class F>
std::vector<IdentityReport> kahler_submersion_conditions(const SubmersionSplit<F>& s, double tol);

// J on H, -J on V, together with g_t.
template <class F>
struct FlipData {
  Mat<F> J, g;
};

template <class F>
FlipData<F> flip_structure(const SubmersionSplit<F>& s, const F& t);

template <class F>
struct TwistorFlip {
  SubmersionSplit<F> flipped;
  NearlyKaehlerReport<F> nk;
  std::vector<IdentityReport> reports;
};

// Throws PreconditionFailed naming the failed hypothesis.
template <class F>
TwistorFlip<F> twistor_flip(const SubmersionSplit<F>& s, double tol);

// Needs dim V = 2 and a J-invariant split parallel for the canonical
// connection; throws PreconditionFailed otherwise.
template <class F>
std::vector<IdentityReport> reducible_case_identities(const SubmersionSplit<F>& s, double tol);

template <class F>
struct ASquare {
  Vec<F> v;  // the vertical vector used
  int eps_v = 0;
  F scalar;  // A^2 = scalar on H
  F kappa;   // A^2 = kappa g(V,V) Id_H
  double min_singular = 0, max_singular = 0;
  std::vector<IdentityReport> reports;
};

// A = (nabla_V J) on H. Throws NotTwistorialType, NotScalar. The default V is
// the first vertical basis vector.
template <class F>
ASquare<F> asquare_and_omega(const SubmersionSplit<F>& s, double tol, std::optional<Vec<F>> v = std::nullopt);

template <class F>
struct FiberCurvature {
  F K;
  F alpha;
  std::vector<IdentityReport> reports;
};

// Dimension 6, strict, T = 0. Throws PreconditionFailed.
template <class F>
FiberCurvature<F> fiber_curvature(const SubmersionSplit<F>& s, double tol);

struct QuaternionicTriple {
  double alpha = 0;
  int eps_v = 0;
  std::array<int, 3> eps{};  // J~_i^2 = eps_i on H
  std::array<Mat<double>, 3> Jt;
  std::vector<IdentityReport> reports;
};

// Float only, the normalizer is sqrt|alpha|. rotation = (a, b) replaces V by
// aV + bJV. Throws PreconditionFailed.
QuaternionicTriple quaternionic_triple(const SubmersionSplit<double>& s, double tol, unsigned seed = 7,
                                       std::pair<double, double> rotation = {1.0, 0.0});

// r of the flipped point preserves H and V; the eigenvalue count is recorded.
template <class F>
IdentityReport r_eigenbundles(const SubmersionSplit<F>& s, double tol);

}  // namespace npk
