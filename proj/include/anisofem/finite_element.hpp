#pragma once

#include "anisofem/best_approx.hpp"
#include "anisofem/rng.hpp"
#include "anisofem/shape_metrics.hpp"
#include "anisofem/sobolev.hpp"

namespace anisofem {

enum class ElementFamily { Lagrange, CrouzeixRaviart };

/// Scalar reference finite element: shape-function space plus the DOF
/// functionals (point evaluations or facet means), with the nodal basis
/// already solved for.
template <int Dim>
struct FiniteElement {
  ElementFamily family = ElementFamily::Lagrange;
  int degree = 1;
  int dof_count = 0;
  std::vector<MultiPoly<Dim>> shape;  // chi_i(shape_j) = delta_ij on reference
  std::vector<Vec<Dim>> nodes;        // Lagrange only

  /// Apply the i-th reference DOF to a field defined on the reference simplex.
  double apply_dof_ref(int i, const SmoothField<Dim>& fhat, int quad_degree = 0) const {
    if (family == ElementFamily::Lagrange) return fhat(nodes[i]);
    auto ref = reference_simplex<Dim>();
    auto fv = facet_vertices(ref, i);
    auto fq = facet_rule<Dim>(quad_degree > 0 ? quad_degree : default_quad_degree());
    double mean = integrate_facet<Dim>([&](const Vec<Dim>& x) { return fhat(x); }, fv, fq);
    return mean / facet_measure<Dim>(fv);
  }
};

/// Lagrange element of degree k on the uniform barycentric lattice.
template <int Dim>
inline FiniteElement<Dim> build_lagrange(int k) {
  if (k < 1) throw std::invalid_argument("Lagrange degree must be >= 1");
  FiniteElement<Dim> fe;
  fe.family = ElementFamily::Lagrange;
  fe.degree = k;
  fe.nodes = barycentric_lattice(reference_simplex<Dim>(), k);
  auto basis = poly_space_basis<Dim>(k);
  const int n = static_cast<int>(basis.size());
  if (static_cast<int>(fe.nodes.size()) != n)
    throw std::logic_error("lattice size does not match polynomial space");
  fe.dof_count = n;

  // Vandermonde solve: columns are monomials, rows are nodes.
  Matrix vand(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) vand(r, c) = basis[c].eval(fe.nodes[r]);
  auto lu = lu_factor(vand);
  if (lu.det == 0.0) throw std::logic_error("Lagrange nodes not unisolvent");
  for (int i = 0; i < n; ++i) {
    std::vector<double> rhs(n, 0.0);
    rhs[i] = 1.0;
    auto c = lu_solve(lu, rhs);
    MultiPoly<Dim> theta;
    for (int j = 0; j < n; ++j) theta += c[j] * basis[j];
    fe.shape.push_back(theta);
  }
  return fe;
}

/// Crouzeix-Raviart element: facet-mean DOFs, affine shape functions
/// theta_i = 1 - Dim * lambda_i.
template <int Dim>
inline FiniteElement<Dim> build_crouzeix_raviart() {
  FiniteElement<Dim> fe;
  fe.family = ElementFamily::CrouzeixRaviart;
  fe.degree = 1;
  fe.dof_count = Dim + 1;
  std::array<MultiPoly<Dim>, Dim + 1> lambda;
  lambda[0] = MultiPoly<Dim>::constant(1.0);
  for (int j = 0; j < Dim; ++j) {
    lambda[j + 1] = MultiPoly<Dim>::variable(j);
    lambda[0] -= lambda[j + 1];
  }
  for (int i = 0; i <= Dim; ++i)
    fe.shape.push_back(MultiPoly<Dim>::constant(1.0) - double(Dim) * lambda[i]);
  return fe;
}

/// chi_i(theta_j) over the reference element; the identity matrix up to
/// rounding when the element is unisolvent.
template <int Dim>
inline double dof_shape_residual(const FiniteElement<Dim>& fe) {
  double worst = 0.0;
  for (int i = 0; i < fe.dof_count; ++i)
    for (int j = 0; j < fe.dof_count; ++j) {
      double v = fe.apply_dof_ref(i, field_from_poly(fe.shape[j], fe.degree));
      worst = std::max(worst, std::abs(v - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

/// Local interpolant on a simplex.  Kept in reference coordinates (the
/// nodal-coefficient representation there is well conditioned even for thin
/// simplices); evaluation and derivatives go through the affine pullback.
template <int Dim>
struct Interpolant {
  std::vector<double> coefficients;
  MultiPoly<Dim> ref_poly;       // sum of coefficients * reference shapes
  AffineMap<Dim> to_reference;   // xhat(x)

  double eval(const Vec<Dim>& x) const {
    return ref_poly.eval(apply_affine(to_reference, x));
  }
  SmoothField<Dim> as_field(int max_order = 8) const {
    return compose_affine(field_from_poly(ref_poly, max_order), to_reference);
  }
  /// Expanded ambient-coordinate polynomial; loses digits on thin simplices.
  MultiPoly<Dim> expanded() const { return ref_poly.compose_affine(to_reference); }
};

/// I_T f.  DOFs are applied intrinsically on T (point values at mapped
/// nodes, facet means over T's facets); both agree with pulling the field
/// back to the reference element since the maps are affine.
template <int Dim>
inline Interpolant<Dim> local_interpolate(const FiniteElement<Dim>& fe,
                                          const SmoothField<Dim>& f, const Simplex<Dim>& t,
                                          int quad_degree = 0) {
  Interpolant<Dim> out;
  AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
  out.to_reference = invert_affine(phi);
  if (fe.family == ElementFamily::Lagrange) {
    for (const auto& node : fe.nodes) out.coefficients.push_back(f(apply_affine(phi, node)));
  } else {
    auto fq = facet_rule<Dim>(quad_degree > 0 ? quad_degree : default_quad_degree());
    for (int i = 0; i <= Dim; ++i) {
      auto fv = facet_vertices(t, i);
      double mean = integrate_facet<Dim>([&](const Vec<Dim>& x) { return f(x); }, fv, fq) /
                    facet_measure<Dim>(fv);
      out.coefficients.push_back(mean);
    }
  }
  for (int i = 0; i < fe.dof_count; ++i)
    out.ref_poly += out.coefficients[i] * fe.shape[i];
  return out;
}

/// Reference-side interpolant of a field given on the reference simplex.
template <int Dim>
inline Interpolant<Dim> interpolate_ref(const FiniteElement<Dim>& fe,
                                        const SmoothField<Dim>& fhat, int quad_degree = 0) {
  Interpolant<Dim> out;
  for (int i = 0; i < fe.dof_count; ++i)
    out.coefficients.push_back(fe.apply_dof_ref(i, fhat, quad_degree));
  for (int i = 0; i < fe.dof_count; ++i) out.ref_poly += out.coefficients[i] * fe.shape[i];
  return out;
}

/// Largest mismatch between I_T(f) pulled back to the reference simplex and
/// the reference interpolant of the pulled-back field, sampled at random
/// reference points.
template <int Dim>
inline double commutation_residual(const FiniteElement<Dim>& fe, const SmoothField<Dim>& f,
                                   const Simplex<Dim>& t, Rng& rng, int samples = 100) {
  AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
  auto on_t = local_interpolate(fe, f, t);
  auto on_ref = interpolate_ref(fe, compose_affine(f, phi));
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Vec<Dim> xhat{};
    double rest = 1.0;
    for (int i = 0; i < Dim; ++i) {
      xhat[i] = rest * rng.uniform();
      rest -= xhat[i];
    }
    double a = on_t.eval(apply_affine(phi, xhat));
    double b = on_ref.ref_poly.eval(xhat);
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

struct ErrorRatio {
  double error = 0.0;
  double bound_factor = 0.0;
  double ratio = 0.0;
  bool ratio_defined = false;
  double h_t = 0.0;
  double semiregularity = 0.0;  // H_T / h_T
};

/// Interpolation error against the geometric bound factor
/// (H_T/h_T)^m * h_T^(l+1-m) * |f|_{W^{l+1,p}(T)}.
template <int Dim>
inline ErrorRatio error_ratio(const FiniteElement<Dim>& fe, const SmoothField<Dim>& f,
                              const Simplex<Dim>& t, int m, NormP p, int l,
                              const SeminormOptions& opts = {}) {
  if (m < 0 || l < 0 || m > l + 1 || l > fe.degree)
    throw std::invalid_argument("error_ratio: need 0 <= m <= l+1 <= degree+1");
  ErrorRatio out;
  auto interp = local_interpolate(fe, f, t, opts.quad_degree);
  auto err_field = f - interp.as_field(f.max_order);
  out.error = seminorm(err_field, t, m, p, opts);
  auto sp = to_standard_position(t);
  out.h_t = diameter(t);
  out.semiregularity = param_h_t(sp) / out.h_t;
  double fnorm = seminorm(f, t, l + 1, p, opts);
  out.bound_factor =
      std::pow(out.semiregularity, m) * std::pow(out.h_t, l + 1 - m) * fnorm;
  if (fnorm >= 1e-14) {
    out.ratio = out.error / out.bound_factor;
    out.ratio_defined = true;
  }
  return out;
}

struct OptimalityResult {
  double s = 0.0;
  double eps = 0.0;
  double i_t_measured = 0.0;     // measured |phi - I phi|_{W^{1,inf}} / |phi|_{W^{2,inf}}
  double i_t_closed = 0.0;       // (s^(2-eps) + s^eps) / 8
  double h_t_closed = 0.0;       // 6 sqrt(2) s^3 sqrt((s/2)^2 + s^(2 eps)) / s^(2+eps)
  double h_t_posed = 0.0;        // H_T of the pose as given
  double ratio_measured = 0.0;   // i_t_measured / h_t_closed
  double ratio_closed = 0.0;     // i_t_closed / h_t_closed
  bool sampling_converged = false;
  bool pass = false;
};

inline constexpr double kOptimalityBound = 0.013176156917368248;  // 1/(24 sqrt(10))

/// The thin-tetra lower-bound experiment: P1-interpolate
/// phi = x^2 + y^2/4 + z^2 on the simplex with vertices
/// (0,0,0), (s,0,0), (s/2, s^eps, 0), (0,0,s) and compare the error ratio
/// against the geometric parameter.
inline OptimalityResult optimality_check(double s, double eps,
                                         const SeminormOptions& opts = {}) {
  if (!(s > 0.0 && s < 1.0) || !(eps > 1.0 && eps < 2.0))
    throw std::invalid_argument("optimality_check: need 0 < s < 1 and 1 < eps < 2");
  OptimalityResult r;
  r.s = s;
  r.eps = eps;

  Simplex<3> t = {{{{0.0, 0.0, 0.0},
                    {s, 0.0, 0.0},
                    {s / 2.0, std::pow(s, eps), 0.0},
                    {0.0, 0.0, s}}}};
  MultiPoly<3> phi = MultiPoly<3>::variable(0) * MultiPoly<3>::variable(0) +
                     0.25 * (MultiPoly<3>::variable(1) * MultiPoly<3>::variable(1)) +
                     MultiPoly<3>::variable(2) * MultiPoly<3>::variable(2);
  auto fe = build_lagrange<3>(1);
  auto field = field_from_poly(phi, 3);
  auto interp = local_interpolate(fe, field, t);
  auto err = field - interp.as_field(3);

  auto num = seminorm_inf_doubling(err, t, 1, opts);
  auto den = seminorm_inf_doubling(field, t, 2, opts);
  r.sampling_converged = num.converged && den.converged;
  r.i_t_measured = num.value / den.value;

  r.i_t_closed = (std::pow(s, 2.0 - eps) + std::pow(s, eps)) / 8.0;
  r.h_t_closed = 6.0 * std::sqrt(2.0) * s * s * s *
                 std::sqrt(s * s / 4.0 + std::pow(s, 2.0 * eps)) /
                 std::pow(s, 2.0 + eps);
  r.h_t_posed = param_h_t(standard_position_from_pose(t));
  r.ratio_measured = r.i_t_measured / r.h_t_closed;
  r.ratio_closed = r.i_t_closed / r.h_t_closed;
  r.pass = r.ratio_measured >= kOptimalityBound - 1e-6 &&
           r.ratio_closed >= kOptimalityBound - 1e-6;
  return r;
}

}  // namespace anisofem
