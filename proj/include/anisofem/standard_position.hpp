#pragma once

#include "anisofem/affine.hpp"
#include "anisofem/simplex.hpp"

namespace anisofem {

/// Case split for the 3D canonical pose.  For triangles the tag is fixed
/// to TypeI.
enum class SimplexType { TypeI, TypeII };

/// Rotation (optionally composed with a reflection) plus translation taking
/// the input simplex onto its canonical pose.
template <int Dim>
struct RigidMotion {
  Mat<Dim> rotation = identity_mat<Dim>();
  Vec<Dim> translation{};
  bool mirrored = false;
};

template <int Dim>
inline Vec<Dim> apply_motion(const RigidMotion<Dim>& m, const Vec<Dim>& p) {
  return mat_vec(m.rotation, p) + m.translation;
}

template <int Dim>
inline Simplex<Dim> apply_motion(const RigidMotion<Dim>& m, const Simplex<Dim>& s) {
  Simplex<Dim> r;
  for (int i = 0; i <= Dim; ++i) r.vertices[i] = apply_motion(m, s.vertices[i]);
  return r;
}

template <int Dim>
struct ShearParams;

// s = cos and t = sin of the angle at the first vertex.
template <>
struct ShearParams<2> {
  double s = 0.0, t = 1.0;
};

// Third-vertex direction (s1,t1) in the base plane and fourth-vertex
// direction (s21,s22,t2).
template <>
struct ShearParams<3> {
  double s1 = 0.0, t1 = 1.0;
  double s21 = 0.0, s22 = 0.0, t2 = 1.0;
};

/// A simplex in canonical pose: first vertex at the origin, second on the
/// positive first axis, third in the upper half of the base plane, fourth
/// (3D) in the upper half-space, together with the edge-length parameters
/// alpha_i, the shear parameters and the motion that got it there.
template <int Dim>
struct StandardPosition {
  Simplex<Dim> simplex;
  std::array<double, Dim> alphas{};
  ShearParams<Dim> shear;
  SimplexType type = SimplexType::TypeI;
  RigidMotion<Dim> motion;
  // labels[i] = index of the input vertex that became canonical vertex i
  std::array<int, Dim + 1> labels{};
  // True when the vertex labeling satisfies the canonical edge-selection
  // rules (longest edge opposite the first vertex in 2D; shortest-edge /
  // adjacent-longest-edge selection in 3D).  Poses parsed verbatim via
  // standard_position_from_pose may carry a valid parameter set without
  // conforming to those rules.
  bool condition_conformant = true;
};

namespace detail {

inline constexpr double kTieRelTol = 1e-12;

// Smallest-index-pair tie break among edges within relative tolerance of an
// extremal length.  `edges` must be the ascending list from edge_lengths.
template <int Dim>
inline Edge<Dim> pick_extremal_edge(const std::vector<Edge<Dim>>& edges,
                                    double target, double scale) {
  const Edge<Dim>* best = nullptr;
  for (const auto& e : edges) {
    if (std::abs(e.length - target) <= kTieRelTol * scale) {
      if (!best || e.a < best->a || (e.a == best->a && e.b < best->b)) best = &e;
    }
  }
  return *best;
}

template <int Dim>
inline void check(bool ok, const char* what) {
  if (!ok) throw geometry_error(what);
}

}  // namespace detail

/// Reference simplex matching a standard-position type: the unit right
/// simplex, or conv{0, e1, e1+e2, e3} for 3D TypeII.
template <int Dim>
inline Simplex<Dim> reference_for_type(SimplexType type) {
  if constexpr (Dim == 2) {
    (void)type;
    return reference_simplex<2>();
  } else {
    return type == SimplexType::TypeI ? reference_simplex<3>()
                                      : reference_simplex_type2();
  }
}

inline StandardPosition<2> to_standard_position(const Simplex<2>& input) {
  require_nondegenerate(input);
  auto edges = edge_lengths(input);
  const double h = edges.back().length;

  // The longest edge becomes x2x3; the opposite vertex is x1.
  Edge<2> longest = detail::pick_extremal_edge<2>(edges, h, h);
  int i1 = 3 - longest.a - longest.b;
  const Vec<2> X1 = input.vertices[i1];
  Vec<2> P = input.vertices[longest.a];
  Vec<2> Q = input.vertices[longest.b];
  double dp = norm(P - X1), dq = norm(Q - X1);
  // x2 is the farther endpoint so that alpha2 <= alpha1; ties keep the
  // smaller vertex index as x2.
  Vec<2> X2 = P, X3 = Q;
  int i2 = longest.a, i3 = longest.b;
  if (dq > dp + detail::kTieRelTol * h) {
    X2 = Q;
    X3 = P;
    std::swap(i2, i3);
  }

  StandardPosition<2> sp;
  sp.labels = {i1, i2, i3};
  sp.alphas[0] = norm(X2 - X1);
  sp.alphas[1] = norm(X3 - X1);

  Vec<2> u = normalized(X2 - X1);
  Mat<2> rot = make_mat2(u[0], u[1], -u[1], u[0]);
  Vec<2> x3 = mat_vec(rot, X3 - X1);
  if (x3[1] < 0.0) {
    rot = make_mat2(u[0], u[1], u[1], -u[0]);
    x3 = mat_vec(rot, X3 - X1);
    sp.motion.mirrored = true;
  }
  sp.motion.rotation = rot;
  sp.motion.translation = -1.0 * mat_vec(rot, X1);

  sp.shear.s = x3[0] / sp.alphas[1];
  sp.shear.t = x3[1] / sp.alphas[1];
  sp.simplex.vertices[0] = {0.0, 0.0};
  sp.simplex.vertices[1] = {sp.alphas[0], 0.0};
  sp.simplex.vertices[2] = x3;

  detail::check<2>(sp.shear.t > 0.0, "standard position: sin of max angle not positive");
  detail::check<2>(sp.alphas[1] <= sp.alphas[0] * (1.0 + detail::kTieRelTol) + detail::kTieRelTol * h,
                   "standard position: alpha ordering violated");
  return sp;
}

inline StandardPosition<3> to_standard_position(const Simplex<3>& input) {
  require_nondegenerate(input);
  auto edges = edge_lengths(input);
  const double h = edges.back().length;

  Edge<3> lmin = detail::pick_extremal_edge<3>(edges, edges.front().length, h);

  // Longest of the four edges sharing an endpoint with the minimal edge.
  std::vector<Edge<3>> sharing;
  double share_max = 0.0;
  for (const auto& e : edges) {
    if (e.a == lmin.a && e.b == lmin.b) continue;
    if (e.a == lmin.a || e.b == lmin.a || e.a == lmin.b || e.b == lmin.b) {
      sharing.push_back(e);
      share_max = std::max(share_max, e.length);
    }
  }
  Edge<3> lmax = detail::pick_extremal_edge<3>(sharing, share_max, h);

  // Vertex roles: vs is shared by both selected edges, vo is the far end of
  // the long edge, v3 the far end of the minimal edge, v4 the leftover.
  int vs = (lmax.a == lmin.a || lmax.a == lmin.b) ? lmax.a : lmax.b;
  int vo = lmax.a + lmax.b - vs;
  int v3 = lmin.a + lmin.b - vs;
  int v4 = 6 - vs - vo - v3;

  // Half-space test for the plane through the midpoint of the long edge,
  // perpendicular to it.  v3 always lies weakly on the vs side (it is
  // closer to vs than to vo by minimality), so the type only depends on
  // where v4 falls.  A vertex within 1e-12*alpha1^2 of the plane counts as
  // lying on the vs side, which selects TypeI.
  const Vec<3> mid = 0.5 * (input.vertices[vs] + input.vertices[vo]);
  const Vec<3> axis = input.vertices[vs] - input.vertices[vo];
  double dot4 = dot(input.vertices[v4] - mid, axis);
  double plane_tol = detail::kTieRelTol * lmax.length * lmax.length;

  StandardPosition<3> sp;
  int i1, i2;
  if (dot4 >= -plane_tol) {
    sp.type = SimplexType::TypeI;
    i1 = vs;
    i2 = vo;
  } else {
    sp.type = SimplexType::TypeII;
    i1 = vo;
    i2 = vs;
  }
  const Vec<3> X1 = input.vertices[i1];
  const Vec<3> X2 = input.vertices[i2];
  const Vec<3> X3 = input.vertices[v3];
  const Vec<3> X4 = input.vertices[v4];
  sp.labels = {i1, i2, v3, v4};

  sp.alphas[0] = lmax.length;
  sp.alphas[1] = lmin.length;
  sp.alphas[2] = norm(X4 - X1);

  Vec<3> u = normalized(X2 - X1);
  Vec<3> w = X3 - X1;
  Vec<3> vperp = w - dot(w, u) * u;
  // re-project once: for sliver bases the first pass leaves a u-component
  // of order eps*|w|, which is huge relative to |vperp|
  vperp = vperp - dot(vperp, u) * u;
  detail::check<3>(norm(vperp) > 0.0, "standard position: collinear base");
  Vec<3> vhat = normalized(vperp);
  Vec<3> n = cross(u, vhat);
  if (dot(X4 - X1, n) < 0.0) {
    n = -1.0 * n;
    sp.motion.mirrored = true;
  }
  sp.motion.rotation = make_mat3(u[0], u[1], u[2], vhat[0], vhat[1], vhat[2], n[0], n[1], n[2]);
  sp.motion.translation = -1.0 * mat_vec(sp.motion.rotation, X1);

  Vec<3> x3 = mat_vec(sp.motion.rotation, X3 - X1);
  Vec<3> x4 = mat_vec(sp.motion.rotation, X4 - X1);
  x3[2] = 0.0;  // exact by construction, drop rounding dust

  sp.simplex.vertices[0] = {0.0, 0.0, 0.0};
  sp.simplex.vertices[1] = {sp.alphas[0], 0.0, 0.0};
  sp.simplex.vertices[2] = x3;
  sp.simplex.vertices[3] = x4;

  if (sp.type == SimplexType::TypeI) {
    sp.shear.s1 = x3[0] / sp.alphas[1];
  } else {
    sp.shear.s1 = (sp.alphas[0] - x3[0]) / sp.alphas[1];
  }
  sp.shear.t1 = x3[1] / sp.alphas[1];
  sp.shear.s21 = x4[0] / sp.alphas[2];
  sp.shear.s22 = x4[1] / sp.alphas[2];
  sp.shear.t2 = x4[2] / sp.alphas[2];

  const double tol = detail::kTieRelTol;
  detail::check<3>(sp.shear.t1 > 0.0 && sp.shear.t2 > 0.0,
                   "standard position: orientation parameters not positive");
  detail::check<3>(sp.shear.s1 >= -tol, "standard position: s1 negative");
  detail::check<3>(sp.alphas[1] * sp.shear.s1 <= 0.5 * sp.alphas[0] + tol * h,
                   "standard position: alpha2*s1 constraint violated");
  detail::check<3>(sp.alphas[2] * sp.shear.s21 <= 0.5 * sp.alphas[0] + tol * h,
                   "standard position: alpha3*s21 constraint violated");
  detail::check<3>(sp.alphas[2] <= 2.0 * sp.alphas[0] * (1.0 + tol),
                   "standard position: alpha3 exceeds 2*alpha1");
  return sp;
}

/// Reads the alpha and shear parameters off a simplex that is already in
/// canonical pose (first vertex at the origin, second on the positive first
/// axis, and so on).  Only the shear-parameter constraints are enforced;
/// whether the labeling also satisfies the canonical edge-selection rules is
/// reported in `condition_conformant`.  The motion is the identity.
template <int Dim>
inline StandardPosition<Dim> standard_position_from_pose(
    const Simplex<Dim>& posed, SimplexType type = SimplexType::TypeI) {
  require_nondegenerate(posed);
  const double h = diameter_unchecked(posed);
  const double tol = 1e-9 * h;
  const auto& v = posed.vertices;

  StandardPosition<Dim> sp;
  sp.type = type;
  sp.simplex = posed;
  for (int i = 0; i <= Dim; ++i) sp.labels[i] = i;

  if constexpr (Dim == 2) {
    detail::check<Dim>(norm(v[0]) <= tol && std::abs(v[1][1]) <= tol && v[1][0] > 0.0 &&
                           v[2][1] > 0.0,
                       "simplex is not in canonical pose");
    sp.alphas[0] = v[1][0];
    sp.alphas[1] = norm(v[2] - v[0]);
    sp.shear.s = v[2][0] / sp.alphas[1];
    sp.shear.t = v[2][1] / sp.alphas[1];
  } else {
    detail::check<Dim>(norm(v[0]) <= tol && std::abs(v[1][1]) <= tol &&
                           std::abs(v[1][2]) <= tol && v[1][0] > 0.0 &&
                           std::abs(v[2][2]) <= tol && v[2][1] > 0.0 && v[3][2] > 0.0,
                       "simplex is not in canonical pose");
    sp.alphas[0] = v[1][0];
    sp.alphas[2] = norm(v[3] - v[0]);
    if (type == SimplexType::TypeI) {
      sp.alphas[1] = norm(v[2] - v[0]);
      sp.shear.s1 = v[2][0] / sp.alphas[1];
    } else {
      sp.alphas[1] = norm(v[2] - v[1]);
      sp.shear.s1 = (sp.alphas[0] - v[2][0]) / sp.alphas[1];
    }
    sp.shear.t1 = v[2][1] / sp.alphas[1];
    sp.shear.s21 = v[3][0] / sp.alphas[2];
    sp.shear.s22 = v[3][1] / sp.alphas[2];
    sp.shear.t2 = v[3][2] / sp.alphas[2];
    detail::check<Dim>(sp.shear.s1 >= -1e-12, "pose violates s1 >= 0");
    detail::check<Dim>(sp.alphas[1] * sp.shear.s1 <= 0.5 * sp.alphas[0] + tol,
                       "pose violates alpha2*s1 <= alpha1/2");
    detail::check<Dim>(sp.alphas[2] * sp.shear.s21 <= 0.5 * sp.alphas[0] + tol,
                       "pose violates alpha3*s21 <= alpha1/2");
  }

  // Compare against the canonical labeling to set the conformance flag.
  auto strict = to_standard_position(posed);
  sp.condition_conformant = true;
  for (int i = 0; i < Dim; ++i)
    if (std::abs(strict.alphas[i] - sp.alphas[i]) > 1e-9 * h)
      sp.condition_conformant = false;
  if constexpr (Dim == 3)
    if (strict.type != type) sp.condition_conformant = false;
  return sp;
}

/// A = shear * diag, the factored Jacobian of the map taking the reference
/// simplex onto the standard position.
template <int Dim>
struct ShearDecomposition {
  Mat<Dim> diag{};
  Mat<Dim> shear{};
};

template <int Dim>
inline Mat<Dim> shear_matrix(const StandardPosition<Dim>& sp) {
  if constexpr (Dim == 2) {
    return make_mat2(1.0, sp.shear.s, 0.0, sp.shear.t);
  } else {
    double sgn = sp.type == SimplexType::TypeI ? 1.0 : -1.0;
    return make_mat3(1.0, sgn * sp.shear.s1, sp.shear.s21,
                     0.0, sp.shear.t1, sp.shear.s22,
                     0.0, 0.0, sp.shear.t2);
  }
}

template <int Dim>
inline ShearDecomposition<Dim> decompose_affine(const StandardPosition<Dim>& sp) {
  ShearDecomposition<Dim> d;
  for (int i = 0; i < Dim; ++i) d.diag[i][i] = sp.alphas[i];
  d.shear = shear_matrix(sp);

  // The recomposition must reproduce the standard-position vertices.
  Mat<Dim> a = mat_mul(d.shear, d.diag);
  Simplex<Dim> ref = reference_for_type<Dim>(sp.type);
  double scale = diameter_unchecked(sp.simplex);
  for (int i = 0; i <= Dim; ++i) {
    Vec<Dim> mapped = mat_vec(a, ref.vertices[i]);
    detail::check<Dim>(norm(mapped - sp.simplex.vertices[i]) <= 1e-12 * scale,
                       "shear decomposition does not reproduce vertices");
  }
  return d;
}

}  // namespace anisofem
