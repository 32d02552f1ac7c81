#pragma once

#include "anisofem/fields.hpp"
#include "anisofem/finite_element.hpp"

namespace anisofem {

/// dim RT^k: (k+1)(k+3) for d=2, (k+1)(k+2)(k+4)/2 for d=3.
inline int rt_dimension(int dim, int k) {
  if (k < 0) throw std::invalid_argument("RT order must be nonnegative");
  if (dim == 2) return (k + 1) * (k + 3);
  if (dim == 3) return (k + 1) * (k + 2) * (k + 4) / 2;
  throw std::invalid_argument("RT spaces exist here for dim 2 and 3 only");
}

/// RT^k on the reference simplex: vector polynomials of degree <= k plus
/// x times the homogeneous degree-k scalars, L2-orthonormalized.
template <int Dim>
struct RTSpace {
  int order = 0;
  std::vector<VectorPoly<Dim>> basis;
  int dimension() const { return static_cast<int>(basis.size()); }
};

template <int Dim>
inline double l2_inner_ref(const VectorPoly<Dim>& a, const VectorPoly<Dim>& b) {
  double s = 0.0;
  for (int i = 0; i < Dim; ++i) s += integrate_reference(a[i] * b[i]);
  return s;
}

template <int Dim>
inline RTSpace<Dim> build_rt_space(int k) {
  RTSpace<Dim> space;
  space.order = k;
  std::vector<VectorPoly<Dim>> raw;
  for (int i = 0; i < Dim; ++i)
    for (const auto& mi : multi_indices<Dim>(k)) {
      VectorPoly<Dim> v;
      v[i] = MultiPoly<Dim>::monomial(mi);
      raw.push_back(v);
    }
  for (const auto& mi : multi_indices<Dim>(k, /*homogeneous=*/true)) {
    VectorPoly<Dim> v;
    for (int i = 0; i < Dim; ++i) {
      MultiIndex<Dim> e = mi;
      e[i] += 1;
      v[i] = MultiPoly<Dim>::monomial(e);
    }
    raw.push_back(v);
  }
  if (static_cast<int>(raw.size()) != rt_dimension(Dim, k))
    throw std::logic_error("RT basis construction count mismatch");

  // modified Gram-Schmidt in the exact L2 inner product; the direct sum
  // rules out redundancy but rank is asserted anyway
  for (auto& v : raw) {
    for (const auto& u : space.basis) {
      double proj = l2_inner_ref(v, u);
      for (int i = 0; i < Dim; ++i) v[i] -= proj * u[i];
    }
    double nrm = std::sqrt(l2_inner_ref(v, v));
    if (nrm < 1e-10) throw std::logic_error("RT basis is rank deficient");
    for (int i = 0; i < Dim; ++i) v[i] = (1.0 / nrm) * v[i];
    space.basis.push_back(v);
  }
  return space;
}

/// Determinant-weighted pushforward v(x) = A vhat(xhat) / |det A|.
template <int Dim>
struct PiolaMap {
  AffineMap<Dim> affine;  // x = A xhat + b
};

template <int Dim>
inline PiolaMap<Dim> piola_between(const Simplex<Dim>& from, const Simplex<Dim>& to) {
  return {affine_from_simplices(from, to)};
}

template <int Dim>
inline PiolaMap<Dim> piola_inverse(const PiolaMap<Dim>& map) {
  return {invert_affine(map.affine)};
}

template <int Dim>
inline VectorPoly<Dim> piola_push(const PiolaMap<Dim>& map, const VectorPoly<Dim>& vhat) {
  double jac = det(map.affine.matrix);
  if (jac == 0.0) throw geometry_error("singular Piola map");
  AffineMap<Dim> inv = invert_affine(map.affine);
  VectorPoly<Dim> out;
  for (int i = 0; i < Dim; ++i) {
    for (int j = 0; j < Dim; ++j) {
      if (map.affine.matrix[i][j] == 0.0) continue;
      out[i] += (map.affine.matrix[i][j] / std::abs(jac)) * vhat[j].compose_affine(inv);
    }
  }
  return out;
}

template <int Dim>
inline VectorPoly<Dim> piola_pull(const PiolaMap<Dim>& map, const VectorPoly<Dim>& v) {
  return piola_push(piola_inverse(map), v);
}

template <int Dim>
inline VectorSmoothField<Dim> piola_push(const PiolaMap<Dim>& map,
                                         const VectorSmoothField<Dim>& vhat) {
  double jac = std::abs(det(map.affine.matrix));
  AffineMap<Dim> inv = invert_affine(map.affine);
  VectorSmoothField<Dim> out;
  for (int i = 0; i < Dim; ++i) {
    SmoothField<Dim> comp;
    comp.max_order = vhat.comp[0].max_order;
    Mat<Dim> a = map.affine.matrix;
    auto components = vhat.comp;
    comp.deriv = [i, a, jac, inv, components](const MultiIndex<Dim>& beta, const Vec<Dim>& x) {
      double s = 0.0;
      for (int j = 0; j < Dim; ++j) {
        if (a[i][j] == 0.0) continue;
        s += a[i][j] * detail::composed_deriv<Dim>(components[j], inv.matrix, beta,
                                                   MultiIndex<Dim>{}, apply_affine(inv, x));
      }
      return s / jac;
    };
    out.comp[i] = comp;
  }
  return out;
}

template <int Dim>
inline VectorSmoothField<Dim> piola_pull(const PiolaMap<Dim>& map,
                                         const VectorSmoothField<Dim>& v) {
  return piola_push(piola_inverse(map), v);
}

/// The local RT degrees of freedom on a simplex: normal moments against
/// P^k on every facet, then interior moments against P^(k-1)^d for k >= 1.
/// Interior monomials use centered, diameter-scaled coordinates.
template <int Dim>
class RTDofSet {
 public:
  RTDofSet(int k, const Simplex<Dim>& t, int quad_degree = 0)
      : order_(k), simplex_(t) {
    int fdeg = quad_degree > 0 ? quad_degree : std::max(2 * k + 4, default_quad_degree());
    facet_rule_ = facet_rule<Dim>(fdeg);
    volume_rule_ = simplex_rule<Dim>(fdeg);
    for (int i = 0; i <= Dim; ++i) {
      facets_.push_back(facet_vertices(t, i));
      normals_.push_back(outward_normal(t, i));
    }
    facet_monomials_ = multi_indices<Dim == 2 ? 1 : 2>(k);
    if (k >= 1) interior_monomials_ = multi_indices<Dim>(k - 1);
    center_ = centroid(t);
    scale_ = diameter_unchecked(t);
  }

  int count() const {
    int nf = static_cast<int>(facet_monomials_.size()) * (Dim + 1);
    int ni = static_cast<int>(interior_monomials_.size()) * Dim;
    return nf + ni;
  }

  int order() const { return order_; }
  const Simplex<Dim>& simplex() const { return simplex_; }

  /// Apply every functional to a vector-valued callable.
  template <class V>
  std::vector<double> apply(const V& v) const {
    std::vector<double> out;
    out.reserve(count());
    for (int f = 0; f <= Dim; ++f) {
      for (const auto& gamma : facet_monomials_) {
        const auto& fv = facets_[f];
        const auto& n = normals_[f];
        double area = facet_measure<Dim>(fv);
        double s = 0.0;
        for (size_t q = 0; q < facet_rule_.ref_u.size(); ++q) {
          Vec<Dim> p = fv[0];
          double qval = 1.0;
          for (int j = 0; j + 1 < Dim; ++j) {
            p = p + facet_rule_.ref_u[q][j] * (fv[j + 1] - fv[0]);
            for (int k2 = 0; k2 < gamma[j]; ++k2) qval *= facet_rule_.ref_u[q][j];
          }
          s += facet_rule_.ref_w[q] * dot(eval_vec(v, p), n) * qval;
        }
        out.push_back(area * s);
      }
    }
    if (order_ >= 1) {
      AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), simplex_);
      double jac = std::abs(det(phi.matrix));
      for (int i = 0; i < Dim; ++i) {
        for (const auto& beta : interior_monomials_) {
          double s = 0.0;
          for (size_t q = 0; q < volume_rule_.points.size(); ++q) {
            Vec<Dim> p = apply_affine(phi, volume_rule_.points[q]);
            double mono = 1.0;
            for (int j = 0; j < Dim; ++j)
              for (int k2 = 0; k2 < beta[j]; ++k2) mono *= (p[j] - center_[j]) / scale_;
            s += volume_rule_.weights[q] * eval_vec(v, p)[i] * mono;
          }
          out.push_back(jac * s);
        }
      }
    }
    return out;
  }

 private:
  template <class V>
  static Vec<Dim> eval_vec(const V& v, const Vec<Dim>& p) {
    if constexpr (std::is_invocable_v<V, const Vec<Dim>&>) {
      return v(p);
    } else {
      return eval(v, p);
    }
  }

  int order_;
  Simplex<Dim> simplex_;
  FacetQuadrature<Dim> facet_rule_;
  QuadratureRule<Dim> volume_rule_;
  std::vector<std::array<Vec<Dim>, Dim>> facets_;
  std::vector<Vec<Dim>> normals_;
  std::vector<MultiIndex<Dim == 2 ? 1 : 2>> facet_monomials_;
  std::vector<MultiIndex<Dim>> interior_monomials_;
  Vec<Dim> center_{};
  double scale_ = 1.0;
};

/// Evaluates the Piola image of a reference polynomial at ambient points by
/// pulling the point back; no coefficient expansion, so thin simplices do
/// not lose digits.
template <int Dim>
struct PiolaEvaluator {
  const VectorPoly<Dim>* vhat = nullptr;
  Mat<Dim> a{};
  AffineMap<Dim> inv{};
  double inv_absdet = 1.0;
  Vec<Dim> operator()(const Vec<Dim>& x) const {
    Vec<Dim> value = eval(*vhat, apply_affine(inv, x));
    return inv_absdet * mat_vec(a, value);
  }
};

template <int Dim>
inline PiolaEvaluator<Dim> piola_evaluator(const PiolaMap<Dim>& map, const VectorPoly<Dim>& vhat) {
  PiolaEvaluator<Dim> ev;
  ev.vhat = &vhat;
  ev.a = map.affine.matrix;
  ev.inv = invert_affine(map.affine);
  ev.inv_absdet = 1.0 / std::abs(det(map.affine.matrix));
  return ev;
}

/// DOF matrix of the Piola-mapped reference basis on T, with its LU factors.
template <int Dim>
struct RTElement {
  RTDofSet<Dim> dofs;
  PiolaMap<Dim> piola;             // reference -> T
  std::vector<VectorPoly<Dim>> basis_ref;  // copy of the space basis
  LuFactors lu;
  double det = 0.0;
  double pivot_ratio = 0.0;
};

template <int Dim>
inline RTElement<Dim> rt_element(const RTSpace<Dim>& space, const Simplex<Dim>& t,
                                 int quad_degree = 0) {
  RTElement<Dim> el{RTDofSet<Dim>(space.order, t, quad_degree),
                    piola_between(reference_simplex<Dim>(), t),
                    space.basis,
                    {},
                    0.0,
                    0.0};
  int n = space.dimension();
  if (el.dofs.count() != n) throw std::logic_error("RT DOF count mismatch");
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) {
    auto column = el.dofs.apply(piola_evaluator(el.piola, space.basis[j]));
    for (int i = 0; i < n; ++i) m(i, j) = column[i];
  }
  el.lu = lu_factor(std::move(m));
  el.det = el.lu.det;
  el.pivot_ratio = el.lu.pivot_ratio;
  if (el.det == 0.0) throw std::logic_error("RT DOF matrix is singular");
  return el;
}

/// RT interpolant, represented by reference-basis coefficients and the
/// Piola map that carries them onto T.
template <int Dim>
struct RTInterpolant {
  std::vector<double> coefficients;
  PiolaMap<Dim> piola;
  const RTSpace<Dim>* space = nullptr;

  VectorPoly<Dim> ref_combination() const {
    VectorPoly<Dim> v;
    for (size_t j = 0; j < coefficients.size(); ++j)
      for (int i = 0; i < Dim; ++i) v[i] += coefficients[j] * space->basis[j][i];
    return v;
  }
  /// Expanded polynomial on T; fine for moderate shapes.
  VectorPoly<Dim> expanded() const { return piola_push(piola, ref_combination()); }
  Vec<Dim> eval_at(const Vec<Dim>& x) const {
    AffineMap<Dim> inv = invert_affine(piola.affine);
    Vec<Dim> vhat = eval(ref_combination(), apply_affine(inv, x));
    Vec<Dim> pushed = mat_vec(piola.affine.matrix, vhat);
    return (1.0 / std::abs(det(piola.affine.matrix))) * pushed;
  }
  VectorSmoothField<Dim> as_field(int max_order = 8) const {
    return piola_push(piola, field_from_poly(ref_combination(), max_order));
  }
};

template <int Dim, class V>
inline RTInterpolant<Dim> rt_interpolate(const RTSpace<Dim>& space, const RTElement<Dim>& el,
                                         const V& v) {
  RTInterpolant<Dim> out;
  out.piola = el.piola;
  out.space = &space;
  out.coefficients = lu_solve(el.lu, el.dofs.apply(v));
  return out;
}

template <int Dim, class V>
inline RTInterpolant<Dim> rt_interpolate(const RTSpace<Dim>& space, const Simplex<Dim>& t,
                                         const V& v, int quad_degree = 0) {
  auto el = rt_element(space, t, quad_degree);
  return rt_interpolate(space, el, v);
}

/// || I_ref(vhat) - Piola^{-1} I_T (Piola vhat) ||_{L2(ref)} / ||vhat||_{L2(ref)}.
template <int Dim>
inline double rt_commutation_residual(const RTSpace<Dim>& space,
                                      const VectorSmoothField<Dim>& vhat,
                                      const AffineMap<Dim>& map, int quad_degree = 0) {
  auto ref = reference_simplex<Dim>();
  Simplex<Dim> t = apply_affine(map, ref);
  PiolaMap<Dim> piola{map};

  auto i_ref = rt_interpolate(space, ref, vhat, quad_degree);
  auto on_t = rt_interpolate(space, t, piola_push(piola, vhat), quad_degree);
  auto pulled = piola_pull(piola, on_t.expanded());
  auto direct = i_ref.expanded();

  VectorPoly<Dim> diff;
  for (int i = 0; i < Dim; ++i) diff[i] = pulled[i] - direct[i];
  double num = 0.0;
  for (int i = 0; i < Dim; ++i) num += integrate_reference(diff[i] * diff[i]);

  auto rule = simplex_rule<Dim>(quad_degree > 0 ? quad_degree : default_quad_degree());
  double den = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    Vec<Dim> val = vhat(rule.points[q]);
    den += rule.weights[q] * dot(val, val);
  }
  if (den <= 0.0) return 0.0;
  return std::sqrt(num / den);
}

/// Relative L2 residual of reproducing a field already in RT^k.
template <int Dim>
inline double rt_projection_residual(const RTSpace<Dim>& space, const RTElement<Dim>& el,
                                     const std::vector<double>& ref_coeffs) {
  RTInterpolant<Dim> member;
  member.piola = el.piola;
  member.space = &space;
  member.coefficients = ref_coeffs;
  auto ref_comb = member.ref_combination();
  auto redo = rt_interpolate(space, el, piola_evaluator(el.piola, ref_comb));
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < ref_coeffs.size(); ++i) {
    double d = redo.coefficients[i] - ref_coeffs[i];
    num += d * d;
    den += ref_coeffs[i] * ref_coeffs[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct RTErrorRatio {
  double error = 0.0;
  double bound_factor = 0.0;
  double ratio = 0.0;
  bool ratio_defined = false;
  double h_t = 0.0;
  double big_h_t = 0.0;
};

/// L2 interpolation error against H_T * h_T^l * |v|_{H^(l+1)}.
template <int Dim>
inline RTErrorRatio rt_error_ratio(const RTSpace<Dim>& space, const RTElement<Dim>& el,
                                   const VectorSmoothField<Dim>& v, int l,
                                   const SeminormOptions& opts = {}) {
  if (l < 0 || l > space.order)
    throw std::invalid_argument("rt_error_ratio: need 0 <= l <= k");
  const Simplex<Dim>& t = el.dofs.simplex();
  RTErrorRatio out;
  auto interp = rt_interpolate(space, el, v);

  int deg = opts.quad_degree > 0 ? opts.quad_degree : default_quad_degree();
  auto rule = simplex_rule<Dim>(deg);
  AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
  double jac = std::abs(det(phi.matrix));
  AffineMap<Dim> inv = invert_affine(phi);
  auto ref_comb = interp.ref_combination();
  double pfac = 1.0 / std::abs(det(interp.piola.affine.matrix));
  double err2 = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    Vec<Dim> x = apply_affine(phi, rule.points[q]);
    Vec<Dim> vhat = eval(ref_comb, apply_affine(inv, x));
    Vec<Dim> iv = pfac * mat_vec(interp.piola.affine.matrix, vhat);
    Vec<Dim> d = v(x) - iv;
    err2 += rule.weights[q] * dot(d, d);
  }
  out.error = std::sqrt(jac * err2);

  auto sp = to_standard_position(t);
  out.h_t = diameter(t);
  out.big_h_t = param_h_t(sp);
  double vnorm = seminorm_l2(v, t, l + 1, opts);
  out.bound_factor = out.big_h_t * std::pow(out.h_t, l) * vnorm;
  if (vnorm >= 1e-14) {
    out.ratio = out.error / out.bound_factor;
    out.ratio_defined = true;
  }
  return out;
}

struct StabilityReport {
  // measured suprema per component, first over the first half of the
  // corpus, then over all of it
  std::vector<double> sup_half;
  std::vector<double> sup_full;
  bool stable = false;  // relative change under doubling < 10%
};

enum class StabilityKind { DivSum, DiagonalSum };  // rt4 vs rt5 denominators

/// Component-wise stability measurements of the reference RT interpolation:
/// sup over a corpus of random polynomial fields of
///   ||(I u)_i|| / (||u_i||_{H^1} + ||div u||)           (DivSum)
///   ||(I u)_i|| / (||u_i||_{H^1} + sum_{j!=i} ||d_j u_j||)  (DiagonalSum)
///
/// All norms are quadratic forms in the monomial coefficients, so they are
/// assembled once and each draw is polished by an annealed random ascent.
/// The maximizers sit in a thin cone of coefficient space (small
/// i-component, small divergence) that plain sampling rarely reaches;
/// without the polish the measured sup creeps with the corpus size.
template <int Dim>
inline StabilityReport component_stability(const RTSpace<Dim>& space, const Simplex<Dim>& ref,
                                           StabilityKind kind, int corpus, std::uint64_t seed,
                                           int field_degree = -1, int polish_steps = 400) {
  if (field_degree < 0) field_degree = space.order + 2;
  RTElement<Dim> el = rt_element(space, ref);
  const auto monos = multi_indices<Dim>(field_degree);
  const int nm = static_cast<int>(monos.size());
  const int n = Dim * nm;
  const int nrt = space.dimension();

  // interpolation matrix in coefficient space: column (i,j) holds the RT
  // coefficients of interpolating monomial j placed in component i
  Matrix interp_mat(nrt, n);
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < nm; ++j) {
      VectorPoly<Dim> e;
      e[i] = MultiPoly<Dim>::monomial(monos[j]);
      auto coeffs = rt_interpolate(space, el, e).coefficients;
      for (int r = 0; r < nrt; ++r) interp_mat(r, i * nm + j) = coeffs[r];
    }

  // per-component Gram of the Piola-mapped RT basis on `ref`
  std::vector<VectorPoly<Dim>> pushed;
  for (int r = 0; r < nrt; ++r) pushed.push_back(piola_push(el.piola, space.basis[r]));
  std::array<Matrix, Dim> rt_gram;
  for (int i = 0; i < Dim; ++i) {
    rt_gram[i] = Matrix(nrt, nrt);
    for (int r = 0; r < nrt; ++r)
      for (int t = r; t < nrt; ++t) {
        double v = integrate_exact(pushed[r][i] * pushed[t][i], ref);
        rt_gram[i](r, t) = v;
        rt_gram[i](t, r) = v;
      }
  }

  // monomial H^1 Gram, diagonal-derivative Grams, and the divergence Gram
  Matrix mono_h1(nm, nm);
  std::array<Matrix, Dim> mono_diag;
  for (int i = 0; i < Dim; ++i) mono_diag[i] = Matrix(nm, nm);
  std::vector<std::array<MultiPoly<Dim>, Dim>> dmono(nm);
  std::vector<MultiPoly<Dim>> mono_poly(nm);
  for (int j = 0; j < nm; ++j) {
    mono_poly[j] = MultiPoly<Dim>::monomial(monos[j]);
    for (int a = 0; a < Dim; ++a) dmono[j][a] = mono_poly[j].derivative(a);
  }
  for (int j1 = 0; j1 < nm; ++j1)
    for (int j2 = j1; j2 < nm; ++j2) {
      double v = integrate_exact(mono_poly[j1] * mono_poly[j2], ref);
      for (int a = 0; a < Dim; ++a)
        v += integrate_exact(dmono[j1][a] * dmono[j2][a], ref);
      mono_h1(j1, j2) = v;
      mono_h1(j2, j1) = v;
      for (int a = 0; a < Dim; ++a) {
        double w = integrate_exact(dmono[j1][a] * dmono[j2][a], ref);
        mono_diag[a](j1, j2) = w;
        mono_diag[a](j2, j1) = w;
      }
    }
  Matrix div_gram(n, n);
  for (int i1 = 0; i1 < Dim; ++i1)
    for (int j1 = 0; j1 < nm; ++j1)
      for (int i2 = 0; i2 < Dim; ++i2)
        for (int j2 = 0; j2 < nm; ++j2)
          div_gram(i1 * nm + j1, i2 * nm + j2) =
              integrate_exact(dmono[j1][i1] * dmono[j2][i2], ref);

  std::vector<double> y(nrt);
  auto ratio_of = [&](const std::vector<double>& c, int i) {
    for (int r = 0; r < nrt; ++r) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s += interp_mat(r, a) * c[a];
      y[r] = s;
    }
    double num2 = 0.0;
    for (int r = 0; r < nrt; ++r)
      for (int t = 0; t < nrt; ++t) num2 += y[r] * rt_gram[i](r, t) * y[t];
    double h1 = 0.0;
    for (int j1 = 0; j1 < nm; ++j1)
      for (int j2 = 0; j2 < nm; ++j2)
        h1 += c[i * nm + j1] * mono_h1(j1, j2) * c[i * nm + j2];
    double den = std::sqrt(std::max(0.0, h1));
    if (kind == StabilityKind::DivSum) {
      double d2 = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d2 += c[a] * div_gram(a, b) * c[b];
      den += std::sqrt(std::max(0.0, d2));
    } else {
      for (int j = 0; j < Dim; ++j) {
        if (j == i) continue;
        double d2 = 0.0;
        for (int j1 = 0; j1 < nm; ++j1)
          for (int j2 = 0; j2 < nm; ++j2)
            d2 += c[j * nm + j1] * mono_diag[j](j1, j2) * c[j * nm + j2];
        den += std::sqrt(std::max(0.0, d2));
      }
    }
    if (den < 1e-12) return 0.0;
    return std::sqrt(std::max(0.0, num2)) / den;
  };

  Rng rng(seed);
  StabilityReport rep;
  rep.sup_half.assign(Dim, 0.0);
  rep.sup_full.assign(Dim, 0.0);
  auto record = [&](int trial, int i, double ratio) {
    if (trial < corpus / 2) rep.sup_half[i] = std::max(rep.sup_half[i], ratio);
    rep.sup_full[i] = std::max(rep.sup_full[i], ratio);
  };

  std::vector<double> c(n), candidate(n);
  for (int trial = 0; trial < corpus; ++trial) {
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < Dim; ++i) record(trial, i, ratio_of(c, i));
    int target = trial % Dim;
    double best = ratio_of(c, target);
    for (int step = 0; step < polish_steps; ++step) {
      double sigma = 0.5 * std::pow(0.99, step);
      for (int a = 0; a < n; ++a) candidate[a] = c[a] + sigma * rng.uniform(-1.0, 1.0);
      double r = ratio_of(candidate, target);
      if (r > best) {
        best = r;
        c = candidate;
      }
    }
    record(trial, target, best);
  }

  rep.stable = true;
  for (int i = 0; i < Dim; ++i) {
    if (rep.sup_half[i] <= 0.0 || rep.sup_full[i] / rep.sup_half[i] > 1.10)
      rep.stable = false;
  }
  return rep;
}

}  // namespace anisofem
