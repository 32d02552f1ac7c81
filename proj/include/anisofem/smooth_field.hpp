#pragma once

#include <functional>
#include <memory>

#include "anisofem/multipoly.hpp"

namespace anisofem {

/// Scalar field with registered closed-form partial derivatives up to
/// max_order.  Evaluation asks for a multi-index; the zero index is the
/// function value.
template <int Dim>
struct SmoothField {
  int max_order = 0;
  std::function<double(const MultiIndex<Dim>&, const Vec<Dim>&)> deriv;

  double operator()(const Vec<Dim>& x) const { return deriv(MultiIndex<Dim>{}, x); }
  double operator()(const MultiIndex<Dim>& beta, const Vec<Dim>& x) const {
    if (beta.order() > max_order)
      throw std::invalid_argument("derivative order beyond the registered order");
    return deriv(beta, x);
  }
};

/// Polynomials carry all their derivatives; they are tabulated up to
/// max_order once so evaluation stays cheap.
template <int Dim>
inline SmoothField<Dim> field_from_poly(const MultiPoly<Dim>& p, int max_order = 8) {
  auto table = std::make_shared<std::map<MultiIndex<Dim>, MultiPoly<Dim>>>();
  for (const auto& mi : multi_indices<Dim>(max_order)) (*table)[mi] = p.derivative(mi);
  SmoothField<Dim> f;
  f.max_order = max_order;
  f.deriv = [table](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
    auto it = table->find(beta);
    if (it == table->end()) return 0.0;
    return it->second.eval(x);
  };
  return f;
}

template <int Dim>
inline SmoothField<Dim> operator-(const SmoothField<Dim>& a, const SmoothField<Dim>& b) {
  SmoothField<Dim> f;
  f.max_order = std::min(a.max_order, b.max_order);
  auto da = a.deriv, db = b.deriv;
  f.deriv = [da, db](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
    return da(beta, x) - db(beta, x);
  };
  return f;
}

namespace detail {

// d^beta (g o Phi) expanded one derivative at a time through the chain rule
// for the affine map Phi(x) = A x + b.
template <int Dim>
inline double composed_deriv(const SmoothField<Dim>& g, const Mat<Dim>& a,
                             const MultiIndex<Dim>& beta, MultiIndex<Dim> inner,
                             const Vec<Dim>& phi_x) {
  int axis = -1;
  MultiIndex<Dim> rest = beta;
  for (int i = 0; i < Dim; ++i)
    if (beta[i] > 0) {
      axis = i;
      rest[i] -= 1;
      break;
    }
  if (axis < 0) return g.deriv(inner, phi_x);
  double s = 0.0;
  for (int j = 0; j < Dim; ++j) {
    if (a[j][axis] == 0.0) continue;
    MultiIndex<Dim> next = inner;
    next[j] += 1;
    s += a[j][axis] * composed_deriv(g, a, rest, next, phi_x);
  }
  return s;
}

}  // namespace detail

/// f(x) = g(A x + b) with exact derivatives via the affine chain rule.
template <int Dim>
inline SmoothField<Dim> compose_affine(const SmoothField<Dim>& g, const AffineMap<Dim>& map) {
  SmoothField<Dim> f;
  f.max_order = g.max_order;
  f.deriv = [g, map](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
    return detail::composed_deriv<Dim>(g, map.matrix, beta, MultiIndex<Dim>{},
                                       apply_affine(map, x));
  };
  return f;
}

template <int Dim>
struct VectorSmoothField {
  std::array<SmoothField<Dim>, Dim> comp;
  Vec<Dim> operator()(const Vec<Dim>& x) const {
    Vec<Dim> r{};
    for (int i = 0; i < Dim; ++i) r[i] = comp[i](x);
    return r;
  }
};

template <int Dim>
inline VectorSmoothField<Dim> field_from_poly(const VectorPoly<Dim>& v, int max_order = 8) {
  VectorSmoothField<Dim> f;
  for (int i = 0; i < Dim; ++i) f.comp[i] = field_from_poly(v[i], max_order);
  return f;
}

template <int Dim>
inline SmoothField<Dim> divergence(const VectorSmoothField<Dim>& v) {
  SmoothField<Dim> f;
  f.max_order = 0;
  for (int i = 0; i < Dim; ++i) f.max_order = std::max(f.max_order, v.comp[i].max_order - 1);
  auto comps = v.comp;
  f.deriv = [comps](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
    double s = 0.0;
    for (int i = 0; i < Dim; ++i) {
      MultiIndex<Dim> b = beta;
      b[i] += 1;
      s += comps[i].deriv(b, x);
    }
    return s;
  };
  return f;
}

}  // namespace anisofem
