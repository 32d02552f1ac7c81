#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace anisofem {

inline constexpr double kPi = 3.14159265358979323846;

template <int Dim>
struct Vec {
  std::array<double, Dim> c{};
  double& operator[](int i) { return c[i]; }
  double operator[](int i) const { return c[i]; }
  friend bool operator==(const Vec&, const Vec&) = default;
};

// Dense row-major fixed-size matrix, Dim in {2,3} throughout the library.
template <int Dim>
struct Mat {
  std::array<Vec<Dim>, Dim> rows{};
  Vec<Dim>& operator[](int i) { return rows[i]; }
  const Vec<Dim>& operator[](int i) const { return rows[i]; }
};

inline Mat<2> make_mat2(double a00, double a01, double a10, double a11) {
  Mat<2> m;
  m[0][0] = a00;
  m[0][1] = a01;
  m[1][0] = a10;
  m[1][1] = a11;
  return m;
}

inline Mat<3> make_mat3(double a00, double a01, double a02, double a10, double a11,
                        double a12, double a20, double a21, double a22) {
  Mat<3> m;
  m[0][0] = a00;
  m[0][1] = a01;
  m[0][2] = a02;
  m[1][0] = a10;
  m[1][1] = a11;
  m[1][2] = a12;
  m[2][0] = a20;
  m[2][1] = a21;
  m[2][2] = a22;
  return m;
}

template <int Dim>
inline Vec<Dim> operator+(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> r{};
  for (int i = 0; i < Dim; ++i) r[i] = a[i] + b[i];
  return r;
}

template <int Dim>
inline Vec<Dim> operator-(const Vec<Dim>& a, const Vec<Dim>& b) {
  Vec<Dim> r{};
  for (int i = 0; i < Dim; ++i) r[i] = a[i] - b[i];
  return r;
}

template <int Dim>
inline Vec<Dim> operator*(double s, const Vec<Dim>& a) {
  Vec<Dim> r{};
  for (int i = 0; i < Dim; ++i) r[i] = s * a[i];
  return r;
}

template <int Dim>
inline double dot(const Vec<Dim>& a, const Vec<Dim>& b) {
  double s = 0.0;
  for (int i = 0; i < Dim; ++i) s += a[i] * b[i];
  return s;
}

template <int Dim>
inline double norm(const Vec<Dim>& a) {
  return std::sqrt(dot(a, a));
}

inline Vec<3> cross(const Vec<3>& a, const Vec<3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <int Dim>
inline Vec<Dim> normalized(const Vec<Dim>& a) {
  double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return (1.0 / n) * a;
}

template <int Dim>
inline Vec<Dim> mat_vec(const Mat<Dim>& m, const Vec<Dim>& v) {
  Vec<Dim> r{};
  for (int i = 0; i < Dim; ++i) r[i] = dot(m[i], v);
  return r;
}

template <int Dim>
inline Mat<Dim> mat_mul(const Mat<Dim>& a, const Mat<Dim>& b) {
  Mat<Dim> r{};
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < Dim; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

template <int Dim>
inline Mat<Dim> transpose(const Mat<Dim>& a) {
  Mat<Dim> r{};
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) r[i][j] = a[j][i];
  return r;
}

template <int Dim>
inline Mat<Dim> identity_mat() {
  Mat<Dim> r{};
  for (int i = 0; i < Dim; ++i) r[i][i] = 1.0;
  return r;
}

inline double det(const Mat<2>& m) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

inline double det(const Mat<3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline Mat<2> inverse(const Mat<2>& m) {
  double d = det(m);
  if (d == 0.0) throw std::invalid_argument("singular matrix");
  return make_mat2(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d);
}

inline Mat<3> inverse(const Mat<3>& m) {
  double d = det(m);
  if (d == 0.0) throw std::invalid_argument("singular matrix");
  Mat<3> r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
  return r;
}

// Eigenvalues of a symmetric matrix by closed form: quadratic formula for
// 2x2, trigonometric solution of the characteristic cubic for 3x3.  Returned
// ascending.  Sizes here never justify an iterative solver.
inline std::array<double, 2> sym_eigenvalues(const Mat<2>& m) {
  double tr = m[0][0] + m[1][1];
  double diff = m[0][0] - m[1][1];
  double disc = std::sqrt(diff * diff + 4.0 * m[0][1] * m[1][0]);
  return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

inline std::array<double, 3> sym_eigenvalues(const Mat<3>& m) {
  double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> ev = {m[0][0], m[1][1], m[2][2]};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
  }
  double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
              (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
  double p = std::sqrt(p2 / 6.0);
  Mat<3> b{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  double r = det(b) / 2.0;
  r = std::max(-1.0, std::min(1.0, r));
  double phi = std::acos(r) / 3.0;
  double e1 = q + 2.0 * p * std::cos(phi);
  double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  double e2 = 3.0 * q - e1 - e3;
  return {e3, e2, e1};
}

template <int Dim>
inline double spectral_norm(const Mat<Dim>& m) {
  auto ev = sym_eigenvalues(mat_mul(transpose(m), m));
  return std::sqrt(std::max(0.0, ev.back()));
}

// Computed as the largest singular value of the explicit inverse; going
// through the smallest eigenvalue of the Gram matrix cancels catastrophically
// for thin shears.
template <int Dim>
inline double spectral_norm_inverse(const Mat<Dim>& m) {
  return spectral_norm(inverse(m));
}

// Heap-allocated dense matrix for DOF systems, Vandermonde solves and least
// squares.  Row-major.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

 private:
  int rows_, cols_;
  std::vector<double> a_;
};

struct LuFactors {
  Matrix lu;
  std::vector<int> perm;
  double det = 0.0;
  // max |pivot| / min |pivot|, a cheap conditioning proxy
  double pivot_ratio = 0.0;
};

inline LuFactors lu_factor(Matrix m) {
  int n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("lu_factor: square matrix required");
  LuFactors f;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  double d = 1.0;
  double pmax = 0.0, pmin = 0.0;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      d = -d;
    }
    double pk = m(k, k);
    if (pk == 0.0) {
      f.det = 0.0;
      f.pivot_ratio = std::numeric_limits<double>::infinity();
      f.lu = std::move(m);
      return f;
    }
    pmax = std::max(pmax, std::abs(pk));
    pmin = (k == 0) ? std::abs(pk) : std::min(pmin, std::abs(pk));
    d *= pk;
    for (int i = k + 1; i < n; ++i) {
      m(i, k) /= pk;
      for (int j = k + 1; j < n; ++j) m(i, j) -= m(i, k) * m(k, j);
    }
  }
  f.det = d;
  f.pivot_ratio = (pmin > 0.0) ? pmax / pmin : std::numeric_limits<double>::infinity();
  f.lu = std::move(m);
  return f;
}

inline std::vector<double> lu_solve(const LuFactors& f, const std::vector<double>& b) {
  int n = f.lu.rows();
  if (f.det == 0.0) throw std::runtime_error("lu_solve: singular system");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

inline std::vector<double> solve(const Matrix& m, const std::vector<double>& b) {
  return lu_solve(lu_factor(m), b);
}

struct LeastSquaresResult {
  std::vector<double> x;
  int rank = 0;
  // estimated from pivot magnitudes of the rank-revealing QR
  double condition = 0.0;
};

// Householder QR with column pivoting.  Rank-deficient columns beyond the
// numerical rank get zero coefficients (pivoted minimum-residual solution).
inline LeastSquaresResult least_squares(Matrix a, std::vector<double> b,
                                        double rank_tol = 1e-12) {
  int m = a.rows(), n = a.cols();
  if (static_cast<int>(b.size()) != m)
    throw std::invalid_argument("least_squares: size mismatch");
  std::vector<int> colperm(n);
  for (int j = 0; j < n; ++j) colperm[j] = j;
  std::vector<double> colnorm(n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) colnorm[j] += a(i, j) * a(i, j);

  int kmax = std::min(m, n);
  std::vector<double> rdiag;
  int rank = 0;
  for (int k = 0; k < kmax; ++k) {
    int piv = k;
    double best = -1.0;
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += a(i, j) * a(i, j);
      if (s > best) {
        best = s;
        piv = j;
      }
    }
    if (piv != k) {
      for (int i = 0; i < m; ++i) std::swap(a(i, k), a(i, piv));
      std::swap(colperm[k], colperm[piv]);
    }
    double alpha = 0.0;
    for (int i = k; i < m; ++i) alpha += a(i, k) * a(i, k);
    alpha = std::sqrt(alpha);
    if (rank == 0 && alpha > 0.0) {
      // first pivot fixes the scale for the rank tolerance
    }
    double scale = rdiag.empty() ? alpha : std::abs(rdiag[0]);
    if (alpha <= rank_tol * std::max(scale, 1e-300)) break;
    if (a(k, k) > 0.0) alpha = -alpha;
    std::vector<double> v(m - k);
    for (int i = k; i < m; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 > 0.0) {
      for (int j = k; j < n; ++j) {
        double s = 0.0;
        for (int i = k; i < m; ++i) s += v[i - k] * a(i, j);
        s *= 2.0 / vnorm2;
        for (int i = k; i < m; ++i) a(i, j) -= s * v[i - k];
      }
      double s = 0.0;
      for (int i = k; i < m; ++i) s += v[i - k] * b[i];
      s *= 2.0 / vnorm2;
      for (int i = k; i < m; ++i) b[i] -= s * v[i - k];
    }
    a(k, k) = alpha;
    rdiag.push_back(alpha);
    ++rank;
  }

  std::vector<double> y(n, 0.0);
  for (int i = rank - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < rank; ++j) s -= a(i, j) * y[j];
    y[i] = s / a(i, i);
  }
  LeastSquaresResult res;
  res.x.assign(n, 0.0);
  for (int j = 0; j < rank; ++j) res.x[colperm[j]] = y[j];
  res.rank = rank;
  res.condition =
      rank > 0 ? std::abs(rdiag.front()) / std::abs(rdiag[rank - 1]) : 0.0;
  return res;
}

}  // namespace anisofem
