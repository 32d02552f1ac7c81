#pragma once

#include <string>

#include "anisofem/smooth_field.hpp"

namespace anisofem {

namespace detail {

// Product of shifted sines: every partial derivative of prod sin(pi x_i)
// is a phase shift times a power of pi.
template <int Dim>
inline SmoothField<Dim> sine_product() {
  SmoothField<Dim> f;
  f.max_order = 12;
  f.deriv = [](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
    double v = std::pow(kPi, beta.order());
    for (int i = 0; i < Dim; ++i) v *= std::sin(kPi * x[i] + beta[i] * kPi / 2.0);
    return v;
  };
  return f;
}

}  // namespace detail

/// Built-in scalar fields addressed by ID.  Registered closed-form
/// derivatives keep differentiation error out of the bound measurements.
template <int Dim>
inline SmoothField<Dim> scalar_field(const std::string& id) {
  using P = MultiPoly<Dim>;
  if (id == "trig") return detail::sine_product<Dim>();
  if (id == "quadric") {
    // x^2 + y^2/4 (+ z^2), the lower-bound experiment's field in 3D
    P p = P::variable(0) * P::variable(0) + 0.25 * (P::variable(1) * P::variable(1));
    if constexpr (Dim == 3) p += P::variable(2) * P::variable(2);
    return field_from_poly(p, 8);
  }
  if (id == "cubic") {
    P p = P::variable(0) * P::variable(0) * P::variable(0) +
          2.0 * (P::variable(0) * P::variable(1) * P::variable(1)) -
          P::variable(1) * P::variable(1) * P::variable(1);
    if constexpr (Dim == 3) p += P::variable(2) * P::variable(2) * P::variable(1);
    return field_from_poly(p, 8);
  }
  throw std::invalid_argument("unknown scalar field id: " + id);
}

/// Built-in vector fields for the H(div) interpolation experiments.
template <int Dim>
inline VectorSmoothField<Dim> vector_field(const std::string& id) {
  using P = MultiPoly<Dim>;
  VectorSmoothField<Dim> v;
  if (id == "vtrig") {
    for (int i = 0; i < Dim; ++i) {
      SmoothField<Dim> comp;
      comp.max_order = 12;
      int axis = (i + 1) % Dim;
      comp.deriv = [axis](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
        for (int j = 0; j < Dim; ++j)
          if (j != axis && beta[j] > 0) return 0.0;
        return std::pow(kPi, beta.order()) *
               std::sin(kPi * x[axis] + beta[axis] * kPi / 2.0);
      };
      v.comp[i] = comp;
    }
    return v;
  }
  if (id == "vquad") {
    // (x^2, x y) and (x^2, y z, z^2)
    v.comp[0] = field_from_poly(P::variable(0) * P::variable(0), 8);
    if constexpr (Dim == 2) {
      v.comp[1] = field_from_poly(P::variable(0) * P::variable(1), 8);
    } else {
      v.comp[1] = field_from_poly(P::variable(1) * P::variable(2), 8);
      v.comp[2] = field_from_poly(P::variable(2) * P::variable(2), 8);
    }
    return v;
  }
  if (id == "vxsq") {
    // (x^2, 0, ...) single-component quadratic
    v.comp[0] = field_from_poly(P::variable(0) * P::variable(0), 8);
    for (int i = 1; i < Dim; ++i) v.comp[i] = field_from_poly(P{}, 8);
    return v;
  }
  throw std::invalid_argument("unknown vector field id: " + id);
}

inline bool is_vector_field_id(const std::string& id) {
  return !id.empty() && id.front() == 'v';
}

}  // namespace anisofem
