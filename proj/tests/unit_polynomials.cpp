#include <doctest.h>

#include <anisofem/best_approx.hpp>
#include <anisofem/quadrature.hpp>
#include <anisofem/rng.hpp>
#include <anisofem/sobolev.hpp>

using namespace anisofem;

namespace {

Simplex<2> unit_right_triangle() {
  return {{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}};
}

template <int Dim>
MultiPoly<Dim> random_poly(Rng& rng, int degree) {
  MultiPoly<Dim> p;
  for (const auto& mi : multi_indices<Dim>(degree))
    p += rng.uniform(-1.0, 1.0) * MultiPoly<Dim>::monomial(mi);
  return p;
}

}  // namespace

TEST_CASE("monomial basis sizes") {
  CHECK(poly_space_basis<2>(1).size() == 3);
  CHECK(poly_space_basis<3>(2).size() == 10);
  CHECK(poly_space_basis<2>(4).size() == 15);
}

TEST_CASE("basis is linearly independent (Gram rank)") {
  auto basis = poly_space_basis<3>(3);
  int n = static_cast<int>(basis.size());
  Matrix gram(n, n);
  auto ref = reference_simplex<3>();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gram(i, j) = integrate_exact(basis[i] * basis[j], ref);
  auto lu = lu_factor(gram);
  CHECK(lu.det != 0.0);
}

TEST_CASE("integration against analytic values") {
  auto tri = unit_right_triangle();
  auto rule = simplex_rule<2>(4);
  CHECK(integrate(MultiPoly<2>::constant(1.0), tri, rule) == doctest::Approx(0.5));
  // analytic: int_T x dA over the unit right triangle is 1/6
  CHECK(integrate(MultiPoly<2>::variable(0), tri, rule) == doctest::Approx(1.0 / 6.0));

  // Dirichlet formula oracle: 2! 1! 0! / 6! = 1/360
  MultiIndex<3> mi;
  mi.e = {2, 1, 0};
  CHECK(reference_monomial_integral<3>(mi) == doctest::Approx(2.0 / 720.0));
  auto tet = reference_simplex<3>();
  CHECK(integrate_exact(MultiPoly<3>::monomial(mi), tet) == doctest::Approx(1.0 / 360.0));

  Rng deg_rng(1);
  CHECK_THROWS_AS(integrate(random_poly<2>(deg_rng, 6), tri, simplex_rule<2>(3)),
                  std::invalid_argument);
}

TEST_CASE("quadrature exactness across degrees") {
  for (int deg = 0; deg <= 20; deg += 4) {
    auto r2 = simplex_rule<2>(deg);
    for (const auto& mi : multi_indices<2>(deg)) {
      double exact = reference_monomial_integral<2>(mi);
      double got = 0.0;
      for (size_t q = 0; q < r2.points.size(); ++q) {
        double t = r2.weights[q];
        for (int i = 0; i < 2; ++i)
          for (int k = 0; k < mi[i]; ++k) t *= r2.points[q][i];
        got += t;
      }
      CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    }
    auto r3 = simplex_rule<3>(deg);
    for (const auto& mi : multi_indices<3>(deg)) {
      double exact = reference_monomial_integral<3>(mi);
      double got = 0.0;
      for (size_t q = 0; q < r3.points.size(); ++q) {
        double t = r3.weights[q];
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < mi[i]; ++k) t *= r3.points[q][i];
        got += t;
      }
      CHECK(got == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("facet integration") {
  auto tri = unit_right_triangle();
  auto fq = facet_rule<2>(4);
  // hypotenuse of the unit right triangle: int of 1 is its length
  auto hyp = facet_vertices(tri, 0);
  CHECK(integrate_facet([](const Vec<2>&) { return 1.0; }, hyp, fq) ==
        doctest::Approx(std::sqrt(2.0)));

  auto tet = reference_simplex<3>();
  auto fq3 = facet_rule<3>(4);
  auto base = facet_vertices(tet, 3);  // z = 0 facet, area 1/2
  CHECK(integrate_facet([](const Vec<3>&) { return 1.0; }, base, fq3) ==
        doctest::Approx(0.5));
  CHECK(integrate_facet([](const Vec<3>& p) { return p[0]; }, base, fq3) ==
        doctest::Approx(1.0 / 6.0));
}

TEST_CASE("Sobolev seminorms") {
  auto tri = unit_right_triangle();
  MultiPoly<2> f = MultiPoly<2>::variable(0) * MultiPoly<2>::variable(0) +
                   MultiPoly<2>::variable(1) * MultiPoly<2>::variable(1);
  // second partials are (2, 0, 2); squared sum times |T| = 8/2 = 4
  CHECK(seminorm_l2(f, tri, 2) == doctest::Approx(2.0));
  CHECK(seminorm_l2(field_from_poly(f), tri, 2) == doctest::Approx(2.0));

  MultiPoly<2> affine = MultiPoly<2>::constant(3.0) + 2.0 * MultiPoly<2>::variable(1);
  CHECK(seminorm_l2(affine, tri, 2) == doctest::Approx(0.0).scale(1.0));

  MultiPoly<3> phi = MultiPoly<3>::variable(0) * MultiPoly<3>::variable(0) +
                     0.25 * (MultiPoly<3>::variable(1) * MultiPoly<3>::variable(1)) +
                     MultiPoly<3>::variable(2) * MultiPoly<3>::variable(2);
  auto tet = reference_simplex<3>();
  SeminormOptions opts;
  opts.lattice_n = 16;
  CHECK(seminorm(field_from_poly(phi), tet, 2, NormP::Inf, opts) == doctest::Approx(2.0));

  auto dc = seminorm_inf_doubling(field_from_poly(phi), tet, 2, opts);
  CHECK(dc.converged);
}

TEST_CASE("seminorm covariance under diagonal scaling") {
  // With x = diag(alpha) * xhat, derivatives pick up alpha^{-beta}.
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto phat = random_poly<3>(rng, 3);
    Vec<3> alpha = {rng.uniform(0.1, 4.0), rng.uniform(0.1, 4.0), rng.uniform(0.1, 4.0)};
    AffineMap<3> inv_scale;  // xhat = diag(1/alpha) x
    for (int i = 0; i < 3; ++i) inv_scale.matrix[i][i] = 1.0 / alpha[i];
    MultiPoly<3> ptilde = phat.compose_affine(inv_scale);
    for (const auto& beta : multi_indices<3>(2, true)) {
      Vec<3> x = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
      Vec<3> xhat = apply_affine(inv_scale, x);
      double scale = 1.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < beta[i]; ++k) scale /= alpha[i];
      double lhs = ptilde.derivative(beta).eval(x);
      double rhs = scale * phat.derivative(beta).eval(xhat);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("best approximation reproduces polynomials and projects means") {
  auto tri = unit_right_triangle();
  Rng rng(9);
  auto f = random_poly<2>(rng, 2);
  auto rep = best_poly_approx(field_from_poly(f), tri, 2, 0, NormP::Two);
  CHECK(rep.info.error <= 1e-10);

  // L2 projection of x^2 onto constants is its mean value 1/6
  MultiPoly<2> x2 = MultiPoly<2>::variable(0) * MultiPoly<2>::variable(0);
  auto proj = best_poly_approx(field_from_poly(x2), tri, 0, 0, NormP::Two);
  CHECK(proj.eta.eval({0.3, 0.3}) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));

  // the residual is L2-orthogonal to the approximating space
  auto res_poly = x2 - proj.eta;
  CHECK(integrate_exact(res_poly, tri) == doctest::Approx(0.0).scale(1.0));

  auto cubic = random_poly<2>(rng, 3);
  auto approx = best_poly_approx(field_from_poly(cubic), tri, 1, 0, NormP::Two);
  auto resid = cubic - approx.eta;
  for (const auto& q : poly_space_basis<2>(1))
    CHECK(std::abs(integrate_exact(resid * q, tri)) < 1e-10);
}

TEST_CASE("sup-norm best approximation (Lawson) on a simple case") {
  auto tri = unit_right_triangle();
  // minimax constant approximation of x on T: c = 1/2, error 1/2
  auto r = best_poly_approx(field_from_poly(MultiPoly<2>::variable(0)), tri, 0, 0,
                            NormP::Inf);
  CHECK(r.eta.eval({0.0, 0.0}) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(r.info.error == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("Verfurth constants") {
  CHECK(verfurth_bound(3, 1, 2) == doctest::Approx(std::sqrt(3.0) / kPi).epsilon(1e-12));
  CHECK(verfurth_bound(2, 0, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  // H1 factor on the reference tetra (diameter sqrt(2))
  CHECK(std::sqrt(2.0) * verfurth_bound(3, 1, 2) ==
        doctest::Approx(std::sqrt(6.0) / kPi).epsilon(1e-12));
  CHECK_THROWS_AS(verfurth_bound(3, 2, 2), std::invalid_argument);
}

TEST_CASE("measured best-approximation constants stay below the bound") {
  auto tet = reference_simplex<3>();
  double bound = std::sqrt(6.0) / kPi;
  Rng rng(13);
  double measured_max = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_poly<3>(rng, 2 + trial % 3);
    double h2 = seminorm_l2(f, tet, 2);
    if (h2 < 1e-12) continue;
    auto best = best_poly_approx(field_from_poly(f), tet, 1, 1, NormP::Two);
    double err = seminorm_l2(f - best.eta, tet, 1);
    measured_max = std::max(measured_max, err / h2);
    CHECK(err <= bound * h2 * (1.0 + 1e-9));
  }
  CHECK(measured_max > 0.0);
  CHECK(measured_max <= bound);
}

TEST_CASE("registered derivatives agree with finite differences") {
  // cross-check only; the library itself never differentiates numerically
  auto check = [](const anisofem::SmoothField<2>& f, const Vec<2>& x) {
    for (int axis = 0; axis < 2; ++axis) {
      MultiIndex<2> beta;
      beta[axis] = 1;
      double h = 1e-6;
      Vec<2> xp = x, xm = x;
      xp[axis] += h;
      xm[axis] -= h;
      double fd = (f(xp) - f(xm)) / (2.0 * h);
      CHECK(f(beta, x) == doctest::Approx(fd).epsilon(1e-6));
    }
  };
  auto trig = [] {
    anisofem::SmoothField<2> f;
    f.max_order = 4;
    f.deriv = [](const MultiIndex<2>& beta, const Vec<2>& x) {
      return std::pow(kPi, beta.order()) * std::sin(kPi * x[0] + beta[0] * kPi / 2.0) *
             std::sin(kPi * x[1] + beta[1] * kPi / 2.0);
    };
    return f;
  }();
  check(trig, {0.31, 0.17});
  check(field_from_poly(MultiPoly<2>::variable(0) * MultiPoly<2>::variable(1)), {0.4, 0.2});
}

TEST_CASE("seminorm of a field with too few registered derivatives") {
  auto tri = unit_right_triangle();
  auto f = field_from_poly(MultiPoly<2>::variable(0), 1);
  CHECK_THROWS_AS(seminorm(f, tri, 2, NormP::Two), std::invalid_argument);
}
