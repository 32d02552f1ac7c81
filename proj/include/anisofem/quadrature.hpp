#pragma once

#include <cstdlib>
#include <functional>
#include <type_traits>

#include "anisofem/multipoly.hpp"

namespace anisofem {

/// Gauss-Legendre nodes/weights on [0,1], exact for degree 2n-1.
/// Newton iteration on the recurrence; n stays small here.
inline void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    // nodes of P_n on [-1,1], Chebyshev initial guess
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

/// Positive-weight rule on the reference simplex; weights sum to its
/// measure 1/Dim!.
template <int Dim>
struct QuadratureRule {
  std::vector<Vec<Dim>> points;
  std::vector<double> weights;
  int exactness = 0;
};

/// Collapsed Gauss product rule, exact for all polynomials up to `degree`.
/// The simplex is the image of the unit cube under the Duffy map; the extra
/// Jacobian powers are absorbed by raising the 1D order.
template <int Dim>
inline QuadratureRule<Dim> simplex_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("quadrature degree must be nonnegative");
  QuadratureRule<Dim> rule;
  rule.exactness = degree;
  std::vector<double> x, w;
  if constexpr (Dim == 2) {
    int n = (degree + 2 + 1) / 2;  // integrand degree rises by 1 in u
    gauss_legendre_01(n, x, w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        rule.points.push_back({x[i], x[j] * (1.0 - x[i])});
        rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
      }
  } else {
    int n = (degree + 3 + 1) / 2;  // rises by 2 in u and 1 in v
    gauss_legendre_01(n, x, w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double u = x[i], v = x[j], t = x[k];
          rule.points.push_back({u, v * (1.0 - u), t * (1.0 - u) * (1.0 - v)});
          rule.weights.push_back(w[i] * w[j] * w[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
        }
  }
  return rule;
}

/// Default quadrature degree; ANISOFEM_QUAD_DEGREE overrides.
inline int default_quad_degree() {
  if (const char* env = std::getenv("ANISOFEM_QUAD_DEGREE")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 12;
}

/// Fallback degree for a caller with its own default, still overridable
/// through ANISOFEM_QUAD_DEGREE.
inline int quad_degree_or(int fallback) {
  if (const char* env = std::getenv("ANISOFEM_QUAD_DEGREE")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return fallback;
}

/// Integral of a callable over a simplex: affine change of variables with
/// the |det| Jacobian.
template <int Dim, class F>
inline double integrate(const F& f, const Simplex<Dim>& t, const QuadratureRule<Dim>& rule) {
  AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
  double jac = std::abs(det(phi.matrix));
  double s = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q)
    s += rule.weights[q] * f(apply_affine(phi, rule.points[q]));
  return jac * s;
}

template <int Dim>
inline double integrate(const MultiPoly<Dim>& p, const Simplex<Dim>& t,
                        const QuadratureRule<Dim>& rule) {
  if (p.degree() > rule.exactness)
    throw std::invalid_argument("quadrature rule too weak for requested polynomial");
  return integrate([&](const Vec<Dim>& x) { return p.eval(x); }, t, rule);
}

/// Facet integration: a (Dim-1)-simplex rule mapped onto the facet, with the
/// constant area factor of the parametrization.
template <int Dim>
struct FacetQuadrature {
  std::vector<double> ref_w;                  // reference weights
  std::vector<std::array<double, Dim - 1>> ref_u;  // reference coords
};

template <int Dim>
inline FacetQuadrature<Dim> facet_rule(int degree) {
  FacetQuadrature<Dim> fq;
  if constexpr (Dim == 2) {
    std::vector<double> x, w;
    gauss_legendre_01((degree + 2) / 2 + 1, x, w);
    for (size_t i = 0; i < x.size(); ++i) {
      fq.ref_u.push_back({x[i]});
      fq.ref_w.push_back(w[i]);
    }
  } else {
    auto tri = simplex_rule<2>(degree);
    for (size_t i = 0; i < tri.points.size(); ++i) {
      fq.ref_u.push_back({tri.points[i][0], tri.points[i][1]});
      // normalize to unit reference measure so the area factor is |F|
      fq.ref_w.push_back(tri.weights[i] * 2.0);
    }
  }
  return fq;
}

/// Integral of f over the facet spanned by `fv`.
template <int Dim, class F>
inline double integrate_facet(const F& f,
                              const std::type_identity_t<std::array<Vec<Dim>, Dim>>& fv,
                              const FacetQuadrature<Dim>& fq) {
  double area = facet_measure<Dim>(fv);
  double s = 0.0;
  for (size_t q = 0; q < fq.ref_u.size(); ++q) {
    Vec<Dim> p = fv[0];
    for (int j = 0; j + 1 < Dim; ++j) p = p + fq.ref_u[q][j] * (fv[j + 1] - fv[0]);
    s += fq.ref_w[q] * f(p);
  }
  return area * s;
}

}  // namespace anisofem
