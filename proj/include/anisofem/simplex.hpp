#pragma once

#include <algorithm>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

#include "anisofem/linalg.hpp"

namespace anisofem {

struct geometry_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Nondegenerate d-simplex given by its d+1 vertices.
template <int Dim>
struct Simplex {
  static_assert(Dim == 2 || Dim == 3, "only 2- and 3-simplices are supported");
  std::array<Vec<Dim>, Dim + 1> vertices{};
};

template <int Dim>
inline Mat<Dim> edge_matrix(const Simplex<Dim>& s) {
  Mat<Dim> m{};
  for (int j = 0; j < Dim; ++j) {
    Vec<Dim> e = s.vertices[j + 1] - s.vertices[0];
    for (int i = 0; i < Dim; ++i) m[i][j] = e[i];
  }
  return m;
}

template <int Dim>
inline double signed_measure(const Simplex<Dim>& s) {
  double factorial = (Dim == 2) ? 2.0 : 6.0;
  return det(edge_matrix(s)) / factorial;
}

template <int Dim>
inline double diameter_unchecked(const Simplex<Dim>& s) {
  double h = 0.0;
  for (int i = 0; i <= Dim; ++i)
    for (int j = i + 1; j <= Dim; ++j)
      h = std::max(h, norm(s.vertices[i] - s.vertices[j]));
  return h;
}

// Scale-invariant degeneracy gate: |T| < 1e-14 * h_T^d counts as degenerate.
template <int Dim>
inline bool is_degenerate(const Simplex<Dim>& s) {
  double h = diameter_unchecked(s);
  if (h == 0.0) return true;
  double hd = 1.0;
  for (int i = 0; i < Dim; ++i) hd *= h;
  return std::abs(signed_measure(s)) < 1e-14 * hd;
}

template <int Dim>
inline void require_nondegenerate(const Simplex<Dim>& s) {
  if (is_degenerate(s)) throw geometry_error("degenerate simplex");
}

/// |T| (area or volume).
template <int Dim>
inline double measure(const Simplex<Dim>& s) {
  require_nondegenerate(s);
  return std::abs(signed_measure(s));
}

/// h_T, the largest pairwise vertex distance.
template <int Dim>
inline double diameter(const Simplex<Dim>& s) {
  require_nondegenerate(s);
  return diameter_unchecked(s);
}

template <int Dim>
struct Edge {
  int a = 0, b = 0;  // vertex indices, a < b
  double length = 0.0;
};

/// All d(d+1)/2 edges sorted ascending by length; ties keep the
/// lexicographically smaller index pair first.
template <int Dim>
inline std::vector<Edge<Dim>> edge_lengths(const Simplex<Dim>& s) {
  require_nondegenerate(s);
  std::vector<Edge<Dim>> edges;
  for (int i = 0; i <= Dim; ++i)
    for (int j = i + 1; j <= Dim; ++j)
      edges.push_back({i, j, norm(s.vertices[i] - s.vertices[j])});
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge<Dim>& x, const Edge<Dim>& y) {
                     if (x.length != y.length) return x.length < y.length;
                     if (x.a != y.a) return x.a < y.a;
                     return x.b < y.b;
                   });
  return edges;
}

template <int Dim>
inline Vec<Dim> centroid(const Simplex<Dim>& s) {
  Vec<Dim> c{};
  for (const auto& v : s.vertices) c = c + v;
  return (1.0 / (Dim + 1)) * c;
}

/// Facet opposite vertex `opposite`: the Dim remaining vertices in index order.
template <int Dim>
inline std::array<Vec<Dim>, Dim> facet_vertices(const Simplex<Dim>& s, int opposite) {
  std::array<Vec<Dim>, Dim> f{};
  int k = 0;
  for (int i = 0; i <= Dim; ++i)
    if (i != opposite) f[k++] = s.vertices[i];
  return f;
}

template <int Dim>
inline double facet_measure(const std::type_identity_t<std::array<Vec<Dim>, Dim>>& f) {
  if constexpr (Dim == 2) {
    return norm(f[1] - f[0]);
  } else {
    return 0.5 * norm(cross(f[1] - f[0], f[2] - f[0]));
  }
}

/// Unit normal of the facet opposite `opposite`, oriented outward.
template <int Dim>
inline Vec<Dim> outward_normal(const Simplex<Dim>& s, int opposite) {
  auto f = facet_vertices(s, opposite);
  Vec<Dim> n{};
  if constexpr (Dim == 2) {
    Vec<2> e = f[1] - f[0];
    n = {e[1], -e[0]};
  } else {
    n = cross(f[1] - f[0], f[2] - f[0]);
  }
  n = normalized(n);
  if (dot(n, f[0] - s.vertices[opposite]) < 0.0) n = -1.0 * n;
  return n;
}

/// Barycentric coordinates of p with respect to s.
template <int Dim>
inline std::array<double, Dim + 1> barycentric(const Simplex<Dim>& s, const Vec<Dim>& p) {
  Mat<Dim> inv = inverse(edge_matrix(s));
  Vec<Dim> lam = mat_vec(inv, p - s.vertices[0]);
  std::array<double, Dim + 1> b{};
  double l0 = 1.0;
  for (int i = 0; i < Dim; ++i) {
    b[i + 1] = lam[i];
    l0 -= lam[i];
  }
  b[0] = l0;
  return b;
}

/// Points of the order-n barycentric lattice (all index combinations summing
/// to n), mapped into the simplex.  n=1 gives the vertices.
template <int Dim>
inline std::vector<Vec<Dim>> barycentric_lattice(const Simplex<Dim>& s, int n) {
  if (n < 1) throw std::invalid_argument("lattice order must be positive");
  std::vector<Vec<Dim>> pts;
  if constexpr (Dim == 2) {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j) {
        double l1 = double(i) / n, l2 = double(j) / n;
        pts.push_back((1.0 - l1 - l2) * s.vertices[0] + l1 * s.vertices[1] +
                      l2 * s.vertices[2]);
      }
  } else {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n - i; ++j)
        for (int k = 0; k <= n - i - j; ++k) {
          double l1 = double(i) / n, l2 = double(j) / n, l3 = double(k) / n;
          pts.push_back((1.0 - l1 - l2 - l3) * s.vertices[0] +
                        l1 * s.vertices[1] + l2 * s.vertices[2] +
                        l3 * s.vertices[3]);
        }
  }
  return pts;
}

/// Reference simplex conv{0, e_1, ..., e_d}.
template <int Dim>
inline Simplex<Dim> reference_simplex() {
  Simplex<Dim> s;
  for (int j = 0; j < Dim; ++j) s.vertices[j + 1][j] = 1.0;
  return s;
}

/// Second 3D reference tetrahedron conv{0, e_1, e_1 + e_2, e_3}.
inline Simplex<3> reference_simplex_type2() {
  Simplex<3> s;
  s.vertices[1] = {1.0, 0.0, 0.0};
  s.vertices[2] = {1.0, 1.0, 0.0};
  s.vertices[3] = {0.0, 0.0, 1.0};
  return s;
}

}  // namespace anisofem
