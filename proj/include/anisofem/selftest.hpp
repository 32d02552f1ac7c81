#pragma once

#include "anisofem/report.hpp"

namespace anisofem {

struct SuiteResult {
  std::string id;
  bool pass = true;
  std::string detail;
};

namespace detail {

struct SuiteRunner {
  std::vector<SuiteResult> results;
  std::string forced_fail;

  SuiteRunner() {
    if (const char* env = std::getenv("ANISOFEM_SELFTEST_FAIL")) forced_fail = env;
  }

  template <class F>
  void run(const std::string& id, F&& body) {
    SuiteResult r;
    r.id = id;
    try {
      if (id == forced_fail) throw std::runtime_error("injected fault");
      body(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  }
};

inline void expect(SuiteResult& r, bool ok, const std::string& what) {
  if (!ok) {
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += what;
  }
}

}  // namespace detail

/// Every invariant suite with fixed seeds; deterministic for a given seed.
inline std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
  detail::SuiteRunner runner;
  using detail::expect;

  runner.run("standard-position-roundtrip", [&](SuiteResult& r) {
    Rng rng(seed + 1);
    for (int trial = 0; trial < 5000; ++trial) {
      auto s2 = random_simplex<2>(rng, 4.0);
      auto sp2 = to_standard_position(s2);
      auto moved = apply_motion(sp2.motion, s2);
      double h = diameter_unchecked(s2);
      for (int i = 0; i <= 2; ++i)
        expect(r, norm(moved.vertices[sp2.labels[i]] - sp2.simplex.vertices[i]) <= 1e-10 * h,
               "2d roundtrip drift");
      auto s3 = random_simplex<3>(rng, 5.0);
      auto sp3 = to_standard_position(s3);
      auto moved3 = apply_motion(sp3.motion, s3);
      double h3 = diameter_unchecked(s3);
      for (int i = 0; i <= 3; ++i)
        expect(r, norm(moved3.vertices[sp3.labels[i]] - sp3.simplex.vertices[i]) <= 1e-10 * h3,
               "3d roundtrip drift");
    }
  });

  runner.run("condition-conformance", [&](SuiteResult& r) {
    Rng rng(seed + 2);
    for (int trial = 0; trial < 2000; ++trial) {
      auto sp2 = to_standard_position(random_simplex<2>(rng, 6.0));
      expect(r, sp2.alphas[1] <= sp2.alphas[0] * (1.0 + 1e-12) + 1e-12,
             "alpha ordering (2d)");
      auto sp3 = to_standard_position(random_simplex<3>(rng, 6.0));
      double h = diameter_unchecked(sp3.simplex);
      expect(r, sp3.alphas[1] * sp3.shear.s1 <= 0.5 * sp3.alphas[0] + 1e-12 * h,
             "alpha2*s1 constraint");
      expect(r, sp3.alphas[2] * sp3.shear.s21 <= 0.5 * sp3.alphas[0] + 1e-12 * h,
             "alpha3*s21 constraint");
      expect(r, sp3.alphas[2] <= 2.0 * sp3.alphas[0] * (1.0 + 1e-12), "alpha3 <= 2 alpha1");
    }
  });

  runner.run("shear-norm-bounds", [&](SuiteResult& r) {
    Rng rng(seed + 3);
    auto slack = [](double b) { return b + 1e-9 * std::max(1.0, b); };
    for (int trial = 0; trial < 400; ++trial) {
      auto sp2 = to_standard_position(random_simplex<2>(rng, 5.0));
      auto d2 = decompose_affine(sp2);
      double n2 = spectral_norm(d2.shear);
      expect(r, n2 <= slack(std::sqrt(2.0)), "2d shear norm");
      expect(r,
             n2 * spectral_norm_inverse(d2.shear) <=
                 slack(sp2.alphas[0] * sp2.alphas[1] / measure(sp2.simplex)),
             "2d norm product");
      auto sp3 = to_standard_position(random_simplex<3>(rng, 4.0));
      auto d3 = decompose_affine(sp3);
      double n3 = spectral_norm(d3.shear);
      expect(r, n3 <= slack(2.0), "3d shear norm");
      expect(r,
             n3 * spectral_norm_inverse(d3.shear) <=
                 slack((2.0 / 3.0) * sp3.alphas[0] * sp3.alphas[1] * sp3.alphas[2] /
                       measure(sp3.simplex)),
             "3d norm product");
    }
  });

  runner.run("equivalence-constants", [&](SuiteResult& r) {
    Rng rng(seed + 4);
    for (int trial = 0; trial < 400; ++trial) {
      double q2 = equivalence_check(random_simplex<2>(rng, 6.0)).ratio;
      expect(r, q2 >= 0.5 - 1e-9 && q2 <= 2.0 + 1e-9, "2d equivalence");
      double q3 = equivalence_check(random_simplex<3>(rng, 4.0)).ratio;
      expect(r, q3 >= 0.5 - 1e-9 && q3 <= 2.0 + 1e-9, "3d equivalence");
    }
  });

  runner.run("circumradius-bracket", [&](SuiteResult& r) {
    Rng rng(seed + 5);
    for (int trial = 0; trial < 400; ++trial) {
      auto s = random_simplex<2>(rng, 6.0);
      double r2 = circumradius2d(s), ht0 = param_h_t0(s);
      expect(r, 2.0 * r2 <= ht0 * (1.0 + 1e-9) && ht0 <= 8.0 * r2 * (1.0 + 1e-9),
             "circumradius bracket");
    }
  });

  runner.run("closed-form-ratio-identities", [&](SuiteResult& r) {
    Rng rng(seed + 6);
    for (int trial = 0; trial < 400; ++trial) {
      auto sp2 = to_standard_position(random_simplex<2>(rng, 5.0));
      double lhs = param_h_t(sp2) / diameter(sp2.simplex);
      expect(r, std::abs(lhs - 2.0 / sp2.shear.t) <= 1e-10 * lhs, "2d ratio identity");
      auto sp3 = to_standard_position(random_simplex<3>(rng, 3.0));
      double lhs3 = param_h_t(sp3) / diameter(sp3.simplex);
      expect(r, std::abs(lhs3 - 6.0 / (sp3.shear.t1 * sp3.shear.t2)) <= 1e-10 * lhs3,
             "3d ratio identity");
    }
  });

  runner.run("quadrature-exactness", [&](SuiteResult& r) {
    for (int deg : {2, 6, 12, 20}) {
      auto r2 = shared_simplex_rule<2>(deg);
      for (const auto& mi : multi_indices<2>(deg)) {
        double ex = reference_monomial_integral<2>(mi), got = 0.0;
        for (size_t q = 0; q < r2.points.size(); ++q) {
          double t = r2.weights[q];
          for (int i = 0; i < 2; ++i)
            for (int k = 0; k < mi[i]; ++k) t *= r2.points[q][i];
          got += t;
        }
        expect(r, std::abs(got - ex) <= 1e-12 * std::abs(ex), "2d rule");
      }
      auto r3 = shared_simplex_rule<3>(deg);
      for (const auto& mi : multi_indices<3>(deg)) {
        double ex = reference_monomial_integral<3>(mi), got = 0.0;
        for (size_t q = 0; q < r3.points.size(); ++q) {
          double t = r3.weights[q];
          for (int i = 0; i < 3; ++i)
            for (int k = 0; k < mi[i]; ++k) t *= r3.points[q][i];
          got += t;
        }
        expect(r, std::abs(got - ex) <= 1e-12 * std::abs(ex), "3d rule");
      }
    }
  });

  runner.run("diagonal-scaling-covariance", [&](SuiteResult& r) {
    Rng rng(seed + 7);
    for (int trial = 0; trial < 100; ++trial) {
      MultiPoly<3> p;
      for (const auto& mi : multi_indices<3>(3))
        p += rng.uniform(-1.0, 1.0) * MultiPoly<3>::monomial(mi);
      Vec<3> alpha = {rng.uniform(0.1, 4.0), rng.uniform(0.1, 4.0), rng.uniform(0.1, 4.0)};
      AffineMap<3> inv_scale;
      for (int i = 0; i < 3; ++i) inv_scale.matrix[i][i] = 1.0 / alpha[i];
      MultiPoly<3> ptilde = p.compose_affine(inv_scale);
      for (const auto& beta : multi_indices<3>(2, true)) {
        Vec<3> x = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        double scale = 1.0;
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < beta[i]; ++k) scale /= alpha[i];
        double lhs = ptilde.derivative(beta).eval(x);
        double rhs = scale * p.derivative(beta).eval(apply_affine(inv_scale, x));
        expect(r, std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)), "chain rule");
      }
    }
  });

  runner.run("best-approx-orthogonality", [&](SuiteResult& r) {
    Rng rng(seed + 8);
    auto tri = reference_simplex<2>();
    for (int trial = 0; trial < 25; ++trial) {
      MultiPoly<2> f;
      for (const auto& mi : multi_indices<2>(3))
        f += rng.uniform(-1.0, 1.0) * MultiPoly<2>::monomial(mi);
      auto best = best_poly_approx(field_from_poly(f), tri, 1, 0, NormP::Two);
      auto resid = f - best.eta;
      for (const auto& q : poly_space_basis<2>(1))
        expect(r, std::abs(integrate_exact(resid * q, tri)) < 1e-10, "residual orthogonality");
    }
  });

  runner.run("verfurth-domination", [&](SuiteResult& r) {
    Rng rng(seed + 9);
    auto tet = reference_simplex<3>();
    double bound = std::sqrt(6.0) / kPi;
    for (int trial = 0; trial < 100; ++trial) {
      MultiPoly<3> f;
      for (const auto& mi : multi_indices<3>(2 + trial % 3))
        f += rng.uniform(-1.0, 1.0) * MultiPoly<3>::monomial(mi);
      double h2 = seminorm_l2(f, tet, 2);
      if (h2 < 1e-12) continue;
      auto best = best_poly_approx(field_from_poly(f), tet, 1, 1, NormP::Two);
      double err = seminorm_l2(f - best.eta, tet, 1);
      expect(r, err <= bound * h2 * (1.0 + 1e-9), "measured constant above the bound");
    }
  });

  runner.run("element-unisolvence", [&](SuiteResult& r) {
    for (int k = 1; k <= 4; ++k)
      expect(r, dof_shape_residual(build_lagrange<2>(k)) < 1e-9, "2d lagrange");
    for (int k = 1; k <= 3; ++k)
      expect(r, dof_shape_residual(build_lagrange<3>(k)) < 1e-9, "3d lagrange");
    expect(r, dof_shape_residual(build_crouzeix_raviart<2>()) < 1e-10, "2d cr");
    expect(r, dof_shape_residual(build_crouzeix_raviart<3>()) < 1e-10, "3d cr");
  });

  runner.run("polynomial-reproduction", [&](SuiteResult& r) {
    Rng rng(seed + 10);
    for (int trial = 0; trial < 30; ++trial) {
      auto t = random_simplex<2>(rng, 2.0);
      for (int k = 1; k <= 3; ++k) {
        auto fe = build_lagrange<2>(k);
        MultiPoly<2> q;
        for (const auto& mi : multi_indices<2>(k))
          q += rng.uniform(-1.0, 1.0) * MultiPoly<2>::monomial(mi);
        auto interp = local_interpolate(fe, field_from_poly(q), t);
        auto diff = field_from_poly(q) - interp.as_field();
        double scale = std::max(1.0, seminorm_inf(field_from_poly(q), t, 0, {0, 8}));
        expect(r, seminorm_inf(diff, t, 0, {0, 8}) <= 1e-10 * scale, "lagrange reproduction");
      }
    }
  });

  runner.run("pullback-commutation", [&](SuiteResult& r) {
    Rng rng(seed + 11);
    for (int trial = 0; trial < 10; ++trial) {
      auto t2 = random_simplex<2>(rng, 2.0);
      expect(r,
             commutation_residual(build_lagrange<2>(2), scalar_field<2>("trig"), t2, rng) <
                 1e-10,
             "lagrange commutation");
      expect(r,
             commutation_residual(build_crouzeix_raviart<2>(), scalar_field<2>("trig"), t2,
                                  rng) < 1e-10,
             "cr commutation");
    }
  });

  runner.run("rt-dimension-unisolvence", [&](SuiteResult& r) {
    for (int k = 0; k <= 3; ++k) {
      auto s2 = build_rt_space<2>(k);
      expect(r, s2.dimension() == (k + 1) * (k + 3), "2d dimension");
      expect(r, rt_element(s2, reference_simplex<2>()).det != 0.0, "2d unisolvence");
      auto s3 = build_rt_space<3>(k);
      expect(r, s3.dimension() == (k + 1) * (k + 2) * (k + 4) / 2, "3d dimension");
      expect(r, rt_element(s3, reference_simplex<3>()).det != 0.0, "3d unisolvence");
    }
  });

  runner.run("piola-identities", [&](SuiteResult& r) {
    Rng rng(seed + 12);
    auto ref = reference_simplex<2>();
    auto fq = shared_facet_rule<2>(14);
    for (int trial = 0; trial < 40; ++trial) {
      AffineMap<2> map;
      do {
        for (int i = 0; i < 2; ++i) {
          map.offset[i] = rng.uniform(-1.0, 1.0);
          for (int j = 0; j < 2; ++j) map.matrix[i][j] = rng.uniform(-1.0, 1.0);
        }
      } while (std::abs(det(map.matrix)) < 0.05);
      PiolaMap<2> piola{map};
      Simplex<2> t = apply_affine(map, ref);
      VectorPoly<2> vhat;
      MultiPoly<2> phihat;
      for (const auto& mi : multi_indices<2>(2)) {
        phihat += rng.uniform(-1.0, 1.0) * MultiPoly<2>::monomial(mi);
        for (int i = 0; i < 2; ++i)
          vhat[i] += rng.uniform(-1.0, 1.0) * MultiPoly<2>::monomial(mi);
      }
      auto vt = piola_push(piola, vhat);
      MultiPoly<2> phit = phihat.compose_affine(invert_affine(map));
      double lhs = integrate_exact(divergence(vt) * phit, t);
      double rhs = integrate_reference(divergence(vhat) * phihat);
      expect(r, std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)), "divergence pairing");
      MultiPoly<2> g, ghat;
      for (int i = 0; i < 2; ++i) {
        g += vt[i] * phit.derivative(i);
        ghat += vhat[i] * phihat.derivative(i);
      }
      expect(r,
             std::abs(integrate_exact(g, t) - integrate_reference(ghat)) <=
                 1e-10 * (1.0 + std::abs(integrate_reference(ghat))),
             "gradient pairing");
      double ft = 0.0, fr = 0.0;
      for (int f = 0; f <= 2; ++f) {
        auto fv = facet_vertices(t, f);
        auto n = outward_normal(t, f);
        ft += integrate_facet<2>(
            [&](const Vec<2>& x) { return dot(eval(vt, x), n) * phit.eval(x); }, fv, fq);
        auto fvr = facet_vertices(ref, f);
        auto nr = outward_normal(ref, f);
        fr += integrate_facet<2>(
            [&](const Vec<2>& x) { return dot(eval(vhat, x), nr) * phihat.eval(x); }, fvr, fq);
      }
      expect(r, std::abs(ft - fr) <= 1e-10 * (1.0 + std::abs(fr)), "boundary pairing");
    }
  });

  runner.run("rt-projection", [&](SuiteResult& r) {
    Rng rng(seed + 13);
    for (int k = 0; k <= 2; ++k) {
      auto space = build_rt_space<2>(k);
      for (int trial = 0; trial < 10; ++trial) {
        auto t = random_simplex<2>(rng, 1.0);
        auto el = rt_element(space, t);
        std::vector<double> coeffs(space.dimension());
        for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
        expect(r, rt_projection_residual(space, el, coeffs) < 1e-10, "2d projection");
      }
    }
    auto s3 = build_rt_space<3>(1);
    for (int trial = 0; trial < 5; ++trial) {
      auto t = random_simplex<3>(rng, 0.7);
      auto el = rt_element(s3, t);
      std::vector<double> coeffs(s3.dimension());
      for (auto& c : coeffs) c = rng.uniform(-1.0, 1.0);
      expect(r, rt_projection_residual(s3, el, coeffs) < 1e-10, "3d projection");
    }
  });

  runner.run("rt-commutation", [&](SuiteResult& r) {
    Rng rng(seed + 14);
    auto s0 = build_rt_space<2>(0);
    for (int trial = 0; trial < 10; ++trial) {
      AffineMap<2> map;
      do {
        for (int i = 0; i < 2; ++i) {
          map.offset[i] = rng.uniform(-1.0, 1.0);
          for (int j = 0; j < 2; ++j) map.matrix[i][j] = rng.uniform(-1.0, 1.0);
        }
      } while (std::abs(det(map.matrix)) < 0.05);
      VectorPoly<2> quad;
      quad[0] = MultiPoly<2>::variable(0) * MultiPoly<2>::variable(0);
      quad[1] = MultiPoly<2>::variable(1) * MultiPoly<2>::variable(1);
      expect(r, rt_commutation_residual(s0, field_from_poly(quad, 4), map) < 1e-9,
             "rt0 commutation");
    }
  });

  runner.run("rt-component-stability", [&](SuiteResult& r) {
    auto rep = component_stability(build_rt_space<3>(0), reference_simplex<3>(),
                                   StabilityKind::DivSum, 100, seed + 15);
    for (double s : rep.sup_full) expect(r, std::isfinite(s) && s > 0.0, "rt4 supremum");
    auto rep2 = component_stability(build_rt_space<3>(0), reference_simplex_type2(),
                                    StabilityKind::DiagonalSum, 100, seed + 16);
    for (double s : rep2.sup_full) expect(r, std::isfinite(s) && s > 0.0, "rt5 supremum");
  });

  runner.run("optimality-lower-bound", [&](SuiteResult& r) {
    for (double s : {0.25, 1.0 / 16.0, 1.0 / 64.0}) {
      for (double eps : {1.25, 1.5, 1.75}) {
        auto res = optimality_check(s, eps);
        expect(r, res.pass, "lower bound violated");
        expect(r, res.sampling_converged, "sampling not converged");
      }
    }
  });

  runner.run("mesh-conformity-io", [&](SuiteResult& r) {
    auto levels = generate_family(FamilySpec::parse("aniso-strip-2d;gamma=2;levels=2"));
    for (const auto& level : levels) {
      const auto& m = std::get<Mesh<2>>(level.mesh);
      expect(r, conformity_check(m).ok, "strip conformity");
      std::stringstream ss;
      write_mesh(m, ss);
      auto back = read_mesh(ss);
      expect(r, std::get<Mesh<2>>(back) == m, "round trip");
    }
    Mesh<2> tj;
    tj.vertices = {{0, 0}, {2, 0}, {1, 1}, {1, 0}};
    tj.cells = {{0, 1, 2}, {0, 3, 2}};
    expect(r, !conformity_check(tj).ok, "t-junction must fail");
  });

  return runner.results;
}

}  // namespace anisofem
