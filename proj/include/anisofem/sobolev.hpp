#pragma once

#include "anisofem/quadrature.hpp"
#include "anisofem/smooth_field.hpp"

namespace anisofem {

enum class NormP { Two, Inf };

struct SeminormOptions {
  int quad_degree = 0;   // 0 = default_quad_degree()
  int lattice_n = 64;    // subdivisions per edge for the sup-norm lattice
};

/// |f|_{W^{m,2}(T)}: quadrature of the squared order-m partials, one term
/// per multi-index.
template <int Dim>
inline double seminorm_l2(const SmoothField<Dim>& f, const Simplex<Dim>& t, int m,
                          const SeminormOptions& opts = {}) {
  int deg = opts.quad_degree > 0 ? opts.quad_degree : default_quad_degree();
  auto rule = simplex_rule<Dim>(deg);
  AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
  double jac = std::abs(det(phi.matrix));
  double total = 0.0;
  for (const auto& beta : multi_indices<Dim>(m, /*homogeneous=*/true)) {
    double s = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double v = f(beta, apply_affine(phi, rule.points[q]));
      s += rule.weights[q] * v * v;
    }
    total += jac * s;
  }
  return std::sqrt(total);
}

/// Exact counterpart for polynomial fields.
template <int Dim>
inline double seminorm_l2(const MultiPoly<Dim>& p, const Simplex<Dim>& t, int m) {
  double total = 0.0;
  for (const auto& beta : multi_indices<Dim>(m, true)) {
    MultiPoly<Dim> d = p.derivative(beta);
    total += integrate_exact(d * d, t);
  }
  return std::sqrt(total);
}

/// |f|_{W^{m,inf}(T)} on the barycentric sample lattice (vertices included).
template <int Dim>
inline double seminorm_inf(const SmoothField<Dim>& f, const Simplex<Dim>& t, int m,
                           const SeminormOptions& opts = {}) {
  auto pts = barycentric_lattice(t, std::max(1, opts.lattice_n));
  double best = 0.0;
  for (const auto& beta : multi_indices<Dim>(m, true))
    for (const auto& p : pts) best = std::max(best, std::abs(f(beta, p)));
  return best;
}

template <int Dim>
inline double seminorm(const SmoothField<Dim>& f, const Simplex<Dim>& t, int m, NormP p,
                       const SeminormOptions& opts = {}) {
  if (f.max_order < m)
    throw std::invalid_argument("field derivatives registered below requested order");
  return p == NormP::Two ? seminorm_l2(f, t, m, opts) : seminorm_inf(f, t, m, opts);
}

struct DoublingCheck {
  double value = 0.0;
  double refined = 0.0;
  bool converged = false;  // relative change under lattice doubling < 0.5%
};

/// Sup-norm seminorm with the lattice-doubling adequacy test.
template <int Dim>
inline DoublingCheck seminorm_inf_doubling(const SmoothField<Dim>& f, const Simplex<Dim>& t,
                                           int m, const SeminormOptions& opts = {}) {
  DoublingCheck c;
  SeminormOptions o2 = opts;
  c.value = seminorm_inf(f, t, m, opts);
  o2.lattice_n = std::max(1, opts.lattice_n) * 2;
  c.refined = seminorm_inf(f, t, m, o2);
  double scale = std::max({std::abs(c.value), std::abs(c.refined), 1e-300});
  c.converged = std::abs(c.refined - c.value) / scale < 5e-3;
  return c;
}

/// L2 norms of scalar and vector fields (order-0 seminorms).
template <int Dim>
inline double l2_norm(const SmoothField<Dim>& f, const Simplex<Dim>& t,
                      const SeminormOptions& opts = {}) {
  return seminorm_l2(f, t, 0, opts);
}

template <int Dim>
inline double seminorm_l2(const VectorSmoothField<Dim>& v, const Simplex<Dim>& t, int m,
                          const SeminormOptions& opts = {}) {
  double s = 0.0;
  for (int i = 0; i < Dim; ++i) {
    double si = seminorm_l2(v.comp[i], t, m, opts);
    s += si * si;
  }
  return std::sqrt(s);
}

template <int Dim>
inline double seminorm_l2(const VectorPoly<Dim>& v, const Simplex<Dim>& t, int m) {
  double s = 0.0;
  for (int i = 0; i < Dim; ++i) {
    double si = seminorm_l2(v[i], t, m);
    s += si * si;
  }
  return std::sqrt(s);
}

}  // namespace anisofem
