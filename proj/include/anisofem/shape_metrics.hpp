#pragma once

#include "anisofem/standard_position.hpp"

namespace anisofem {

/// H_T = (prod alpha_i / |T|) * h_T, evaluated on a standard position.
template <int Dim>
inline double param_h_t(const StandardPosition<Dim>& sp) {
  double prod = 1.0;
  for (double a : sp.alphas) prod *= a;
  return prod * diameter(sp.simplex) / measure(sp.simplex);
}

/// Pose-free surrogate of H_T: h_T^2/|T| times the shortest edge (2D) or the
/// product of the two shortest edges (3D).  Invariant under rigid motion.
template <int Dim>
inline double param_h_t0(const Simplex<Dim>& s) {
  auto edges = edge_lengths(s);
  double h = edges.back().length;
  double m = measure(s);
  double min_part = edges[0].length;
  if constexpr (Dim == 3) min_part *= edges[1].length;
  return h * h / m * min_part;
}

/// Circumradius of a triangle via R = |L1||L2||L3| / (4|T|).
inline double circumradius2d(const Simplex<2>& s) {
  auto edges = edge_lengths(s);
  return edges[0].length * edges[1].length * edges[2].length / (4.0 * measure(s));
}

struct AngleDiagnostics {
  // 2D: theta_max is the largest interior angle (at the first canonical
  // vertex).  3D: theta_t is the base angle at the first or second canonical
  // vertex depending on type, phi_t the inclination of the off-base edge.
  double theta_max = 0.0;
  double theta_t = 0.0;
  double phi_t = 0.0;
  double semiregularity = 0.0;  // H_T / h_T
};

inline AngleDiagnostics angle_diagnostics(const StandardPosition<2>& sp) {
  AngleDiagnostics d;
  d.theta_max = std::atan2(sp.shear.t, sp.shear.s);
  d.semiregularity = param_h_t(sp) / diameter(sp.simplex);
  return d;
}

inline AngleDiagnostics angle_diagnostics(const StandardPosition<3>& sp) {
  AngleDiagnostics d;
  d.theta_t = std::atan2(sp.shear.t1, sp.shear.s1);
  d.phi_t = std::asin(std::min(1.0, sp.shear.t2));
  d.semiregularity = param_h_t(sp) / diameter(sp.simplex);
  return d;
}

/// Semiregularity bound 6/(M1*M2) from angle caps: theta_bar caps the base
/// angles, [phi1_bar, phi2_bar] brackets the inclination angle.
inline double semiregularity_bound_3d(double theta_bar, double phi1_bar, double phi2_bar) {
  if (!(theta_bar > 0.0 && theta_bar < kPi) || !(phi1_bar > 0.0) ||
      !(phi2_bar < kPi) || !(phi1_bar <= phi2_bar))
    throw std::invalid_argument("invalid angle caps");
  double m1 = std::min(std::sin(0.5 * (kPi - theta_bar)), std::sin(theta_bar));
  double m2 = std::min(std::sin(phi1_bar), std::sin(phi2_bar));
  return 6.0 / (m1 * m2);
}

struct EquivalenceReport {
  double h_t = 0.0;
  double h_t0 = 0.0;
  double ratio = 0.0;  // h_t / h_t0, expected within [1/2, 2]
  bool within(double slack = 1e-9) const {
    return ratio >= 0.5 - slack && ratio <= 2.0 + slack;
  }
};

template <int Dim>
inline EquivalenceReport equivalence_check(const Simplex<Dim>& s) {
  EquivalenceReport r;
  r.h_t = param_h_t(to_standard_position(s));
  r.h_t0 = param_h_t0(s);
  r.ratio = r.h_t / r.h_t0;
  return r;
}

/// Full per-simplex metric bundle, as reported by the CLI.
template <int Dim>
struct ShapeMetrics {
  double h_t = 0.0;       // diameter
  double big_h_t = 0.0;   // H_T
  double big_h_t0 = 0.0;  // H_T0
  double circumradius = 0.0;  // 2D only
  double semiregularity = 0.0;
  AngleDiagnostics angles;
  StandardPosition<Dim> position;
};

template <int Dim>
inline ShapeMetrics<Dim> shape_metrics(const Simplex<Dim>& s) {
  ShapeMetrics<Dim> m;
  m.position = to_standard_position(s);
  m.h_t = diameter(s);
  m.big_h_t = param_h_t(m.position);
  m.big_h_t0 = param_h_t0(s);
  if constexpr (Dim == 2) m.circumradius = circumradius2d(s);
  m.semiregularity = m.big_h_t / m.h_t;
  m.angles = angle_diagnostics(m.position);
  return m;
}

}  // namespace anisofem
