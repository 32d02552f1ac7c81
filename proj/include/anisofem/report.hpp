#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include "anisofem/families.hpp"
#include "anisofem/finite_element.hpp"
#include "anisofem/raviart_thomas.hpp"

namespace anisofem {

/// Shared quadrature tables; Gauss nodes are computed once per degree.
/// Returned references stay valid for the process lifetime, so callers may
/// map over elements in parallel.
template <int Dim>
inline const QuadratureRule<Dim>& shared_simplex_rule(int degree) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule<Dim>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, simplex_rule<Dim>(degree)).first;
  return it->second;
}

template <int Dim>
inline const FacetQuadrature<Dim>& shared_facet_rule(int degree) {
  static std::mutex mutex;
  static std::map<int, FacetQuadrature<Dim>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, facet_rule<Dim>(degree)).first;
  return it->second;
}

struct ConvergenceConfig {
  std::string element = "lagrange";  // lagrange | cr | rt
  int k = 1;                         // element order
  int l = -1;                        // smoothness index; -1 means k
  int m = 0;                         // error seminorm order (scalar elements)
  NormP p = NormP::Two;
  std::string field = "trig";
  std::string family_text = "uniform-ref;seed=unit-triangle;levels=3";
  int quad_degree = 0;
  std::uint64_t seed = 0;
  double stability_tol = 0.05;  // allowed growth of the ratio sup at the last level
  double order_tol = 0.2;

  int smoothness() const { return l < 0 ? k : l; }
};

struct BoundRow {
  double h = 0.0;
  double big_h = 0.0;       // H(h) of the mesh
  double error = 0.0;       // global broken seminorm over the mesh
  double max_error = 0.0;   // largest per-element error
  double max_bound = 0.0;   // largest per-element bound factor
  double max_ratio = 0.0;   // largest per-element error/bound ratio
  std::optional<double> observed_order;
};

struct BoundReport {
  ConvergenceConfig config;
  std::vector<BoundRow> rows;
  double ratio_sup = 0.0;
  bool ratio_stable = true;     // last level grows the running sup by < tol
  double expected_order = 0.0;  // l+1-m (scalar) or l+1 (rt)
  bool order_applicable = false;  // H_T/h_T level-constant across the family
  bool order_in_range = true;
};

namespace detail {

// Fast per-level evaluation for scalar elements, p = 2, m in {0,1}: shape
// values and gradients are tabulated on the reference quadrature points once
// and pushed through each element's affine map.
template <int Dim>
struct ScalarLevelStats {
  double global_sq = 0.0;
  double global_max = 0.0;
  double max_error = 0.0;
  double max_bound = 0.0;
  double max_ratio = 0.0;
};

template <int Dim>
inline ScalarLevelStats<Dim> scalar_level_pass(const FiniteElement<Dim>& fe,
                                               const SmoothField<Dim>& f, const Mesh<Dim>& mesh,
                                               int m, NormP p, int l, int quad_degree,
                                               const SeminormOptions& inf_opts) {
  ScalarLevelStats<Dim> stats;
  const int deg = quad_degree > 0 ? quad_degree : quad_degree_or(8);
  const auto& rule = shared_simplex_rule<Dim>(deg);
  const auto& frule = shared_facet_rule<Dim>(deg);
  const size_t nq = rule.points.size();
  const int n = fe.dof_count;
  const auto betas_err = multi_indices<Dim>(m, true);
  const auto betas_src = multi_indices<Dim>(l + 1, true);

  // reference tables
  std::vector<std::vector<double>> sval(n, std::vector<double>(nq));
  std::vector<std::vector<Vec<Dim>>> sgrad(n, std::vector<Vec<Dim>>(nq));
  for (int i = 0; i < n; ++i) {
    std::array<MultiPoly<Dim>, Dim> d;
    for (int a = 0; a < Dim; ++a) d[a] = fe.shape[i].derivative(a);
    for (size_t q = 0; q < nq; ++q) {
      sval[i][q] = fe.shape[i].eval(rule.points[q]);
      for (int a = 0; a < Dim; ++a) sgrad[i][q][a] = d[a].eval(rule.points[q]);
    }
  }

  const bool fast = (p == NormP::Two) && (m <= 1);
  std::vector<double> coeff(n);
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    Simplex<Dim> t = mesh.cell_simplex(static_cast<int>(c));
    AffineMap<Dim> phi = affine_from_simplices(reference_simplex<Dim>(), t);
    double jac = std::abs(det(phi.matrix));
    Mat<Dim> ainv_t = transpose(inverse(phi.matrix));

    double err = 0.0;
    if (fast) {
      if (fe.family == ElementFamily::Lagrange) {
        for (int i = 0; i < n; ++i) coeff[i] = f(apply_affine(phi, fe.nodes[i]));
      } else {
        for (int i = 0; i <= Dim; ++i) {
          auto fv = facet_vertices(t, i);
          coeff[i] = integrate_facet<Dim>([&](const Vec<Dim>& x) { return f(x); }, fv, frule) /
                     facet_measure<Dim>(fv);
        }
      }
      double acc = 0.0;
      for (size_t q = 0; q < nq; ++q) {
        Vec<Dim> x = apply_affine(phi, rule.points[q]);
        if (m == 0) {
          double iv = 0.0;
          for (int i = 0; i < n; ++i) iv += coeff[i] * sval[i][q];
          double e = f(x) - iv;
          acc += rule.weights[q] * e * e;
        } else {
          Vec<Dim> gref{};
          for (int i = 0; i < n; ++i)
            for (int a = 0; a < Dim; ++a) gref[a] += coeff[i] * sgrad[i][q][a];
          Vec<Dim> gi = mat_vec(ainv_t, gref);
          double e2 = 0.0;
          for (int a = 0; a < Dim; ++a) {
            MultiIndex<Dim> beta;
            beta[a] = 1;
            double d = f(beta, x) - gi[a];
            e2 += d * d;
          }
          acc += rule.weights[q] * e2;
        }
      }
      err = std::sqrt(jac * acc);
    } else {
      auto interp = local_interpolate(fe, f, t, quad_degree);
      auto err_field = f - interp.as_field(f.max_order);
      SeminormOptions o = inf_opts;
      o.quad_degree = deg;
      err = seminorm(err_field, t, m, p, o);
    }

    // source-term seminorm on this element
    double src = 0.0;
    if (p == NormP::Two) {
      double acc = 0.0;
      for (const auto& beta : betas_src) {
        for (size_t q = 0; q < nq; ++q) {
          double v = f(beta, apply_affine(phi, rule.points[q]));
          acc += rule.weights[q] * v * v;
        }
      }
      src = std::sqrt(jac * acc);
    } else {
      src = seminorm_inf(f, t, l + 1, inf_opts);
    }

    auto sp = to_standard_position(t);
    double ht = diameter_unchecked(t);
    double semi = param_h_t(sp) / ht;
    double bound = std::pow(semi, m) * std::pow(ht, l + 1 - m) * src;

    stats.global_sq += err * err;
    stats.global_max = std::max(stats.global_max, err);
    stats.max_error = std::max(stats.max_error, err);
    stats.max_bound = std::max(stats.max_bound, bound);
    if (src >= 1e-14) stats.max_ratio = std::max(stats.max_ratio, err / bound);
  }
  return stats;
}

// RT level pass with a DOF-matrix cache keyed by the element's edge matrix;
// generated families repeat congruent elements up to translation.
template <int Dim>
inline ScalarLevelStats<Dim> rt_level_pass(const RTSpace<Dim>& space,
                                           const VectorSmoothField<Dim>& v,
                                           const Mesh<Dim>& mesh, int l, int quad_degree) {
  ScalarLevelStats<Dim> stats;
  const int deg = quad_degree > 0 ? quad_degree : quad_degree_or(std::max(2 * space.order + 4, 8));
  const auto& rule = shared_simplex_rule<Dim>(deg);
  const auto betas_src = multi_indices<Dim>(l + 1, true);

  std::map<std::array<double, Dim * Dim>, std::shared_ptr<RTElement<Dim>>> cache;
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    Simplex<Dim> t = mesh.cell_simplex(static_cast<int>(c));
    std::array<double, Dim * Dim> key{};
    {
      Mat<Dim> em = edge_matrix(t);
      int idx = 0;
      for (int i = 0; i < Dim; ++i)
        for (int j = 0; j < Dim; ++j) key[idx++] = em[i][j];
    }
    std::shared_ptr<RTElement<Dim>> el;
    auto it = cache.find(key);
    if (it != cache.end()) {
      el = it->second;
      // translate the cached element onto this cell
      auto fresh = std::make_shared<RTElement<Dim>>(*el);
      fresh->dofs = RTDofSet<Dim>(space.order, t, deg);
      fresh->piola = piola_between(reference_simplex<Dim>(), t);
      el = fresh;
    } else {
      el = std::make_shared<RTElement<Dim>>(rt_element(space, t, deg));
      cache.emplace(key, el);
    }

    auto interp = rt_interpolate(space, *el, v);
    auto ref_comb = interp.ref_combination();
    AffineMap<Dim> phi = interp.piola.affine;
    AffineMap<Dim> inv = invert_affine(phi);
    double jac = std::abs(det(phi.matrix));
    double pfac = 1.0 / jac;

    double acc = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Vec<Dim> x = apply_affine(phi, rule.points[q]);
      Vec<Dim> iv = pfac * mat_vec(phi.matrix, eval(ref_comb, rule.points[q]));
      Vec<Dim> d = v(x) - iv;
      acc += rule.weights[q] * dot(d, d);
    }
    double err = std::sqrt(jac * acc);

    double src_acc = 0.0;
    for (const auto& beta : betas_src)
      for (int i = 0; i < Dim; ++i)
        for (size_t q = 0; q < rule.points.size(); ++q) {
          double val = v.comp[i].deriv(beta, apply_affine(phi, rule.points[q]));
          src_acc += rule.weights[q] * val * val;
        }
    double src = std::sqrt(jac * src_acc);

    auto sp = to_standard_position(t);
    double ht = diameter_unchecked(t);
    double bound = param_h_t(sp) * std::pow(ht, l) * src;

    stats.global_sq += err * err;
    stats.max_error = std::max(stats.max_error, err);
    stats.max_bound = std::max(stats.max_bound, bound);
    if (src >= 1e-14) stats.max_ratio = std::max(stats.max_ratio, err / bound);
  }
  return stats;
}

}  // namespace detail

/// Runs the whole family for one configuration and assembles the report.
inline BoundReport run_convergence(const ConvergenceConfig& cfg) {
  BoundReport report;
  report.config = cfg;
  int l = cfg.smoothness();
  if (cfg.element == "rt") {
    if (cfg.m != 0 || cfg.p != NormP::Two)
      throw std::invalid_argument("rt convergence uses the L2 norm (m=0, p=2)");
    if (l > cfg.k) throw std::invalid_argument("need l <= k");
    report.expected_order = l + 1;
  } else {
    if (cfg.m > l + 1 || l > cfg.k)
      throw std::invalid_argument("need m <= l+1 <= k+1");
    report.expected_order = l + 1 - cfg.m;
  }

  auto family = generate_family(FamilySpec::parse(cfg.family_text));
  std::vector<double> semis_min, semis_max;

  for (const auto& level : family) {
    BoundRow row;
    row.h = level.h;
    row.big_h = std::visit([](const auto& m) { return mesh_h_param(m); }, level.mesh);

    if (std::holds_alternative<Mesh<2>>(level.mesh)) {
      const auto& mesh = std::get<Mesh<2>>(level.mesh);
      double semi_lo = std::numeric_limits<double>::infinity(), semi_hi = 0.0;
      for (size_t c = 0; c < mesh.cells.size(); ++c) {
        auto sp = to_standard_position(mesh.cell_simplex(static_cast<int>(c)));
        double semi = param_h_t(sp) / diameter_unchecked(sp.simplex);
        semi_lo = std::min(semi_lo, semi);
        semi_hi = std::max(semi_hi, semi);
      }
      semis_min.push_back(semi_lo);
      semis_max.push_back(semi_hi);

      detail::ScalarLevelStats<2> stats;
      if (cfg.element == "rt") {
        auto space = build_rt_space<2>(cfg.k);
        stats = detail::rt_level_pass<2>(space, vector_field<2>(cfg.field), mesh, l,
                                         cfg.quad_degree);
      } else {
        auto fe = cfg.element == "cr" ? build_crouzeix_raviart<2>()
                                      : build_lagrange<2>(cfg.k);
        stats = detail::scalar_level_pass<2>(fe, scalar_field<2>(cfg.field), mesh, cfg.m,
                                             cfg.p, l, cfg.quad_degree, {cfg.quad_degree, 32});
      }
      row.error = cfg.p == NormP::Two ? std::sqrt(stats.global_sq) : stats.global_max;
      if (cfg.element == "rt") row.error = std::sqrt(stats.global_sq);
      row.max_error = stats.max_error;
      row.max_bound = stats.max_bound;
      row.max_ratio = stats.max_ratio;
    } else {
      const auto& mesh = std::get<Mesh<3>>(level.mesh);
      double semi_lo = std::numeric_limits<double>::infinity(), semi_hi = 0.0;
      for (size_t c = 0; c < mesh.cells.size(); ++c) {
        auto sp = to_standard_position(mesh.cell_simplex(static_cast<int>(c)));
        double semi = param_h_t(sp) / diameter_unchecked(sp.simplex);
        semi_lo = std::min(semi_lo, semi);
        semi_hi = std::max(semi_hi, semi);
      }
      semis_min.push_back(semi_lo);
      semis_max.push_back(semi_hi);

      detail::ScalarLevelStats<3> stats;
      if (cfg.element == "rt") {
        auto space = build_rt_space<3>(cfg.k);
        stats = detail::rt_level_pass<3>(space, vector_field<3>(cfg.field), mesh, l,
                                         cfg.quad_degree);
      } else {
        auto fe = cfg.element == "cr" ? build_crouzeix_raviart<3>()
                                      : build_lagrange<3>(cfg.k);
        stats = detail::scalar_level_pass<3>(fe, scalar_field<3>(cfg.field), mesh, cfg.m,
                                             cfg.p, l, cfg.quad_degree, {cfg.quad_degree, 32});
      }
      row.error = cfg.p == NormP::Two ? std::sqrt(stats.global_sq) : stats.global_max;
      if (cfg.element == "rt") row.error = std::sqrt(stats.global_sq);
      row.max_error = stats.max_error;
      row.max_bound = stats.max_bound;
      row.max_ratio = stats.max_ratio;
    }
    report.rows.push_back(row);
  }

  // observed orders from the global error column
  for (size_t n = 1; n < report.rows.size(); ++n) {
    double e0 = report.rows[n - 1].error, e1 = report.rows[n].error;
    double h0 = report.rows[n - 1].h, h1 = report.rows[n].h;
    if (e0 > 0.0 && e1 > 0.0 && h0 > h1)
      report.rows[n].observed_order = std::log2(e0 / e1) / std::log2(h0 / h1);
  }

  // ratio-sup stability: the last level must not push the running sup up by
  // more than the tolerance
  double running = 0.0;
  for (size_t n = 0; n + 1 < report.rows.size(); ++n)
    running = std::max(running, report.rows[n].max_ratio);
  report.ratio_sup = std::max(running, report.rows.empty() ? 0.0 : report.rows.back().max_ratio);
  if (report.rows.size() >= 2 && running > 0.0)
    report.ratio_stable =
        report.rows.back().max_ratio <= (1.0 + cfg.stability_tol) * running;

  // the order check applies when H_T/h_T is level-constant
  double lo = *std::min_element(semis_min.begin(), semis_min.end());
  double hi = *std::max_element(semis_max.begin(), semis_max.end());
  report.order_applicable = hi <= lo * 1.01;
  if (report.order_applicable) {
    int checked = 0;
    for (size_t n = report.rows.size() >= 3 ? report.rows.size() - 2 : 1;
         n < report.rows.size(); ++n) {
      if (!report.rows[n].observed_order) continue;
      ++checked;
      if (std::abs(*report.rows[n].observed_order - report.expected_order) > cfg.order_tol)
        report.order_in_range = false;
    }
    if (checked == 0) report.order_in_range = false;
  }
  return report;
}

/// CSV with a frozen header; the observed-order cell is empty on the first
/// level.
inline std::string to_csv(const BoundReport& report) {
  std::string out = "h,H,error,max_error,max_bound_factor,max_ratio,observed_order\n";
  char buf[256];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,", row.h,
                  row.big_h, row.error, row.max_error, row.max_bound, row.max_ratio);
    out += buf;
    if (row.observed_order) {
      std::snprintf(buf, sizeof(buf), "%.6g", *row.observed_order);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace anisofem
