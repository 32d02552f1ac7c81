#pragma once

#include "anisofem/sobolev.hpp"

namespace anisofem {

struct BestApproxResult {
  int rank = 0;
  double condition = 0.0;
  double error = 0.0;  // achieved (semi)norm of f - eta
  bool condition_warning = false;
};

template <int Dim>
struct BestApprox {
  MultiPoly<Dim> eta;
  BestApproxResult info;
};

/// Best polynomial approximation of degree <= target_degree.
///
/// p = 2 minimizes the W^{j,2} seminorm of the residual by least squares on
/// quadrature points (rank-revealing QR; j >= 1 leaves the low-degree kernel
/// at zero).  p = inf minimizes a discretized sup norm on the sample lattice
/// by Lawson's iteratively reweighted least squares (order j = 0 only).
template <int Dim>
inline BestApprox<Dim> best_poly_approx(const SmoothField<Dim>& f, const Simplex<Dim>& t,
                                        int target_degree, int seminorm_order, NormP p,
                                        const SeminormOptions& opts = {}) {
  if (target_degree < 0) throw std::invalid_argument("negative target degree");
  auto basis = poly_space_basis<Dim>(target_degree);
  const int n = static_cast<int>(basis.size());
  BestApprox<Dim> out;

  if (p == NormP::Two) {
    int deg = opts.quad_degree > 0 ? opts.quad_degree : default_quad_degree();
    auto rule = simplex_rule<Dim>(deg);
    AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
    auto betas = multi_indices<Dim>(seminorm_order, true);
    const int rows = static_cast<int>(rule.points.size() * betas.size());

    // rows: sqrt(w) * d^beta(.) at each quadrature point
    Matrix a(rows, n);
    std::vector<double> b(rows, 0.0);
    std::vector<std::vector<MultiPoly<Dim>>> dbasis(n);
    for (int c = 0; c < n; ++c)
      for (const auto& beta : betas) dbasis[c].push_back(basis[c].derivative(beta));
    int r = 0;
    for (size_t bi = 0; bi < betas.size(); ++bi) {
      for (size_t q = 0; q < rule.points.size(); ++q, ++r) {
        Vec<Dim> x = apply_affine(phi, rule.points[q]);
        double sw = std::sqrt(rule.weights[q]);
        for (int c = 0; c < n; ++c) a(r, c) = sw * dbasis[c][bi].eval(x);
        b[r] = sw * f(betas[bi], x);
      }
    }
    auto ls = least_squares(std::move(a), std::move(b));
    out.info.rank = ls.rank;
    out.info.condition = ls.condition;
    out.info.condition_warning = ls.condition > 1e12;
    for (int c = 0; c < n; ++c) out.eta += ls.x[c] * basis[c];
    out.info.error = seminorm(f - field_from_poly(out.eta), t, seminorm_order, p, opts);
    return out;
  }

  if (seminorm_order != 0)
    throw std::invalid_argument("sup-norm best approximation supports order 0 only");
  auto pts = barycentric_lattice(t, std::max(8, opts.lattice_n / 4));
  const int rows = static_cast<int>(pts.size());
  std::vector<double> fi(rows), weight(rows, 1.0 / rows);
  std::vector<std::vector<double>> bval(rows, std::vector<double>(n));
  for (int r = 0; r < rows; ++r) {
    fi[r] = f(MultiIndex<Dim>{}, pts[r]);
    for (int c = 0; c < n; ++c) bval[r][c] = basis[c].eval(pts[r]);
  }
  std::vector<double> coeff(n, 0.0);
  for (int iter = 0; iter < 60; ++iter) {
    Matrix a(rows, n);
    std::vector<double> b(rows);
    for (int r = 0; r < rows; ++r) {
      double sw = std::sqrt(weight[r]);
      for (int c = 0; c < n; ++c) a(r, c) = sw * bval[r][c];
      b[r] = sw * fi[r];
    }
    auto ls = least_squares(std::move(a), std::move(b));
    coeff = ls.x;
    out.info.rank = ls.rank;
    out.info.condition = ls.condition;
    // Lawson update: reweight by residual magnitude
    double total = 0.0;
    std::vector<double> resid(rows);
    for (int r = 0; r < rows; ++r) {
      double e = fi[r];
      for (int c = 0; c < n; ++c) e -= coeff[c] * bval[r][c];
      resid[r] = std::abs(e);
      weight[r] *= resid[r] + 1e-300;
      total += weight[r];
    }
    if (total <= 0.0) break;
    for (int r = 0; r < rows; ++r) weight[r] /= total;
  }
  for (int c = 0; c < n; ++c) out.eta += coeff[c] * basis[c];
  out.info.condition_warning = out.info.condition > 1e12;
  out.info.error = seminorm(f - field_from_poly(out.eta), t, 0, NormP::Inf, opts);
  return out;
}

/// Upper bound on the L2 best-approximation constant:
/// pi^(k-m) * binom(d+k-1, k)^(1/2) * ((m-k)!)^(1/2) / (floor((m-k)/d)!)^(d/2).
inline double verfurth_bound(int d, int k, int m) {
  if (d < 1 || k < 0 || m < 1 || k > m - 1)
    throw std::invalid_argument("verfurth_bound: need 0 <= k <= m-1");
  auto binom = [](int n, int r) {
    double v = 1.0;
    for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
    return v;
  };
  double value = std::pow(kPi, k - m);
  value *= std::sqrt(binom(d + k - 1, k));
  value *= std::sqrt(detail::factorial(m - k));
  value /= std::pow(detail::factorial((m - k) / d), d / 2.0);
  return value;
}

}  // namespace anisofem
