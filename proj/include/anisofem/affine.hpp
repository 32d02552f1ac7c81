#pragma once

#include "anisofem/simplex.hpp"

namespace anisofem {

/// x = matrix * x_hat + offset.
template <int Dim>
struct AffineMap {
  Mat<Dim> matrix = identity_mat<Dim>();
  Vec<Dim> offset{};
};

template <int Dim>
inline Vec<Dim> apply_affine(const AffineMap<Dim>& map, const Vec<Dim>& p) {
  return mat_vec(map.matrix, p) + map.offset;
}

template <int Dim>
inline AffineMap<Dim> invert_affine(const AffineMap<Dim>& map) {
  if (det(map.matrix) == 0.0) throw geometry_error("singular affine map");
  AffineMap<Dim> inv;
  inv.matrix = inverse(map.matrix);
  inv.offset = -1.0 * mat_vec(inv.matrix, map.offset);
  return inv;
}

/// first(second(x)), i.e. the composition applying `second` first.
template <int Dim>
inline AffineMap<Dim> compose_affine(const AffineMap<Dim>& first,
                                     const AffineMap<Dim>& second) {
  AffineMap<Dim> c;
  c.matrix = mat_mul(first.matrix, second.matrix);
  c.offset = mat_vec(first.matrix, second.offset) + first.offset;
  return c;
}

/// The unique affine map taking the vertices of `from` onto those of `to`
/// in order.
template <int Dim>
inline AffineMap<Dim> affine_from_simplices(const Simplex<Dim>& from,
                                            const Simplex<Dim>& to) {
  Mat<Dim> ef = edge_matrix(from);
  Mat<Dim> et = edge_matrix(to);
  AffineMap<Dim> map;
  map.matrix = mat_mul(et, inverse(ef));
  map.offset = to.vertices[0] - mat_vec(map.matrix, from.vertices[0]);
  return map;
}

template <int Dim>
inline Simplex<Dim> apply_affine(const AffineMap<Dim>& map, const Simplex<Dim>& s) {
  Simplex<Dim> r;
  for (int i = 0; i <= Dim; ++i) r.vertices[i] = apply_affine(map, s.vertices[i]);
  return r;
}

}  // namespace anisofem
