#pragma once

#include <map>

#include "anisofem/affine.hpp"
#include "anisofem/simplex.hpp"

namespace anisofem {

template <int Dim>
struct MultiIndex {
  std::array<int, Dim> e{};
  int order() const {
    int s = 0;
    for (int v : e) s += v;
    return s;
  }
  int operator[](int i) const { return e[i]; }
  int& operator[](int i) { return e[i]; }
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    return a.e < b.e;
  }
};

/// All multi-indices with |beta| <= degree (or == degree when homogeneous),
/// graded-lexicographic.
template <int Dim>
inline std::vector<MultiIndex<Dim>> multi_indices(int degree, bool homogeneous = false) {
  std::vector<MultiIndex<Dim>> out;
  for (int total = homogeneous ? degree : 0; total <= degree; ++total) {
    if constexpr (Dim == 1) {
      MultiIndex<1> mi;
      mi.e = {total};
      out.push_back(mi);
    } else if constexpr (Dim == 2) {
      for (int a = total; a >= 0; --a) {
        MultiIndex<2> mi;
        mi.e = {a, total - a};
        out.push_back(mi);
      }
    } else {
      for (int a = total; a >= 0; --a)
        for (int b = total - a; b >= 0; --b) {
          MultiIndex<3> mi;
          mi.e = {a, b, total - a - b};
          out.push_back(mi);
        }
    }
  }
  return out;
}

/// Sparse polynomial in Dim variables with real coefficients.
template <int Dim>
class MultiPoly {
 public:
  MultiPoly() = default;

  static MultiPoly constant(double c) {
    MultiPoly p;
    if (c != 0.0) p.terms_[MultiIndex<Dim>{}] = c;
    return p;
  }

  static MultiPoly monomial(const MultiIndex<Dim>& mi, double c = 1.0) {
    MultiPoly p;
    if (c != 0.0) p.terms_[mi] = c;
    return p;
  }

  static MultiPoly variable(int axis) {
    MultiIndex<Dim> mi;
    mi[axis] = 1;
    return monomial(mi);
  }

  const std::map<MultiIndex<Dim>, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [mi, c] : terms_) d = std::max(d, mi.order());
    return d;
  }

  double eval(const Vec<Dim>& x) const {
    double s = 0.0;
    for (const auto& [mi, c] : terms_) {
      double t = c;
      for (int i = 0; i < Dim; ++i)
        for (int k = 0; k < mi[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  MultiPoly derivative(int axis) const {
    MultiPoly p;
    for (const auto& [mi, c] : terms_) {
      if (mi[axis] == 0) continue;
      MultiIndex<Dim> d = mi;
      d[axis] -= 1;
      p.terms_[d] += c * mi[axis];
    }
    p.compact();
    return p;
  }

  MultiPoly derivative(const MultiIndex<Dim>& beta) const {
    MultiPoly p = *this;
    for (int i = 0; i < Dim; ++i)
      for (int k = 0; k < beta[i]; ++k) p = p.derivative(i);
    return p;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    for (const auto& [mi, c] : o.terms_) terms_[mi] += c;
    compact();
    return *this;
  }

  MultiPoly& operator-=(const MultiPoly& o) {
    for (const auto& [mi, c] : o.terms_) terms_[mi] -= c;
    compact();
    return *this;
  }

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

  friend MultiPoly operator*(double s, const MultiPoly& p) {
    MultiPoly r;
    if (s == 0.0) return r;
    r.terms_ = p.terms_;
    for (auto& [mi, c] : r.terms_) c *= s;
    return r;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        MultiIndex<Dim> m = ma;
        for (int i = 0; i < Dim; ++i) m[i] += mb[i];
        r.terms_[m] += ca * cb;
      }
    r.compact();
    return r;
  }

  /// p(A x + b): exact substitution of an affine change of variables.
  MultiPoly compose_affine(const AffineMap<Dim>& map) const {
    std::array<MultiPoly, Dim> lin;
    for (int i = 0; i < Dim; ++i) {
      lin[i] = constant(map.offset[i]);
      for (int j = 0; j < Dim; ++j)
        if (map.matrix[i][j] != 0.0)
          lin[i] += map.matrix[i][j] * variable(j);
    }
    MultiPoly r;
    for (const auto& [mi, c] : terms_) {
      MultiPoly t = constant(c);
      for (int i = 0; i < Dim; ++i)
        for (int k = 0; k < mi[i]; ++k) t = t * lin[i];
      r += t;
    }
    return r;
  }

 private:
  void compact() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
  }

  std::map<MultiIndex<Dim>, double> terms_;
};

/// Monomial basis of the polynomials of degree <= k.
template <int Dim>
inline std::vector<MultiPoly<Dim>> poly_space_basis(int k) {
  if (k < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
  std::vector<MultiPoly<Dim>> basis;
  for (const auto& mi : multi_indices<Dim>(k)) basis.push_back(MultiPoly<Dim>::monomial(mi));
  return basis;
}

namespace detail {

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Exact integral of a monomial over the reference simplex:
/// beta! / (|beta| + Dim)! componentwise.
template <int Dim>
inline double reference_monomial_integral(const MultiIndex<Dim>& mi) {
  double num = 1.0;
  for (int i = 0; i < Dim; ++i) num *= detail::factorial(mi[i]);
  return num / detail::factorial(mi.order() + Dim);
}

template <int Dim>
inline double integrate_reference(const MultiPoly<Dim>& p) {
  double s = 0.0;
  for (const auto& [mi, c] : p.terms()) s += c * reference_monomial_integral<Dim>(mi);
  return s;
}

/// Exact integral of a polynomial over an arbitrary simplex via the affine
/// change of variables onto the reference simplex.
template <int Dim>
inline double integrate_exact(const MultiPoly<Dim>& p, const Simplex<Dim>& t) {
  AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
  return std::abs(det(phi.matrix)) * integrate_reference(p.compose_affine(phi));
}

template <int Dim>
struct VectorPoly {
  std::array<MultiPoly<Dim>, Dim> c{};
  MultiPoly<Dim>& operator[](int i) { return c[i]; }
  const MultiPoly<Dim>& operator[](int i) const { return c[i]; }
};

template <int Dim>
inline MultiPoly<Dim> divergence(const VectorPoly<Dim>& v) {
  MultiPoly<Dim> d;
  for (int i = 0; i < Dim; ++i) d += v[i].derivative(i);
  return d;
}

template <int Dim>
inline Vec<Dim> eval(const VectorPoly<Dim>& v, const Vec<Dim>& x) {
  Vec<Dim> r{};
  for (int i = 0; i < Dim; ++i) r[i] = v[i].eval(x);
  return r;
}

}  // namespace anisofem
