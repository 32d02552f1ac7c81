// Command-line front end: per-simplex analysis, mesh quality reports,
// convergence studies and the thin-tetra lower-bound experiment.
//
// Exit codes: 0 success, 1 invariant failure, 2 bad input geometry,
// 3 nonconforming mesh, 64 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include <anisofem/anisofem.hpp>

using json = nlohmann::ordered_json;
using namespace anisofem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitBadGeometry = 2;
constexpr int kExitNonconforming = 3;
constexpr int kExitUsage = 64;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("cannot open output file: " + out_path);
  os << text;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ','))
    if (!piece.empty()) out.push_back(std::stod(piece));
  if (out.empty()) throw CLI::ValidationError("empty numeric list");
  return out;
}

template <int Dim>
Vec<Dim> parse_vertex(const std::string& text) {
  Vec<Dim> v{};
  std::stringstream ss(text);
  std::string piece;
  int i = 0;
  while (std::getline(ss, piece, ',')) {
    if (i >= Dim) throw std::invalid_argument("too many coordinates: " + text);
    v[i++] = std::stod(piece);
  }
  if (i != Dim)
    throw std::invalid_argument("expected " + std::to_string(Dim) + " coordinates: " + text);
  return v;
}

int cmd_analyze_simplex(const std::vector<std::string>& vertices, const std::string& out) {
  json j;
  if (vertices.size() == 3) {
    Simplex<2> s;
    for (int i = 0; i < 3; ++i) s.vertices[i] = parse_vertex<2>(vertices[i]);
    auto m = shape_metrics(s);
    j["dim"] = 2;
    j["alphas"] = {m.position.alphas[0], m.position.alphas[1]};
    j["shear"] = {{"s", m.position.shear.s}, {"t", m.position.shear.t}};
    j["type"] = "i";
    j["h_T"] = m.h_t;
    j["H_T"] = m.big_h_t;
    j["H_T0"] = m.big_h_t0;
    j["circumradius"] = m.circumradius;
    j["semiregularity"] = m.semiregularity;
    j["theta_max"] = m.angles.theta_max;
  } else if (vertices.size() == 4) {
    Simplex<3> s;
    for (int i = 0; i < 4; ++i) s.vertices[i] = parse_vertex<3>(vertices[i]);
    auto m = shape_metrics(s);
    j["dim"] = 3;
    j["alphas"] = {m.position.alphas[0], m.position.alphas[1], m.position.alphas[2]};
    j["shear"] = {{"s1", m.position.shear.s1},
                  {"t1", m.position.shear.t1},
                  {"s21", m.position.shear.s21},
                  {"s22", m.position.shear.s22},
                  {"t2", m.position.shear.t2}};
    j["type"] = m.position.type == SimplexType::TypeI ? "i" : "ii";
    j["h_T"] = m.h_t;
    j["H_T"] = m.big_h_t;
    j["H_T0"] = m.big_h_t0;
    j["semiregularity"] = m.semiregularity;
    j["theta_T"] = m.angles.theta_t;
    j["phi_T"] = m.angles.phi_t;
  } else {
    throw CLI::ValidationError("analyze-simplex expects 3 or 4 vertices");
  }
  emit(j.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_mesh_quality(const std::string& path, bool allow_nonconforming,
                     const std::string& out, const std::string& format) {
  auto mesh = read_mesh(path);
  bool conforming = std::visit([](const auto& m) { return conformity_check(m).ok; }, mesh);
  if (!conforming && !allow_nonconforming) {
    std::cerr << "nonconforming mesh: " << path << " (use --allow-nonconforming to force)\n";
    return kExitNonconforming;
  }

  struct Row {
    double ht0 = 0.0, h = 0.0;
  };
  std::vector<Row> rows;
  std::visit(
      [&](const auto& m) {
        for (size_t c = 0; c < m.cells.size(); ++c) {
          auto s = m.cell_simplex(static_cast<int>(c));
          rows.push_back({param_h_t0(s), diameter(s)});
        }
      },
      mesh);
  double big_h = 0.0, max_ratio = 0.0;
  for (const auto& r : rows) {
    big_h = std::max(big_h, r.ht0);
    max_ratio = std::max(max_ratio, r.ht0 / r.h);
  }

  if (format == "json") {
    json j;
    j["elements"] = json::array();
    for (const auto& r : rows)
      j["elements"].push_back({{"H_T0", r.ht0}, {"h_T0", r.h}, {"ratio", r.ht0 / r.h}});
    j["summary"] = {{"H", big_h}, {"max_ratio", max_ratio}, {"conforming", conforming}};
    emit(j.dump(2) + "\n", out);
  } else {
    std::string text = "H_T0,h_T0,ratio\n";
    char buf[128];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", r.ht0, r.h, r.ht0 / r.h);
      text += buf;
    }
    std::snprintf(buf, sizeof(buf), "summary,H=%.12g,max_ratio=%.12g\n", big_h, max_ratio);
    text += buf;
    emit(text, out);
  }
  return kExitOk;
}

json report_to_json(const BoundReport& rep) {
  json j;
  j["config"] = {{"element", rep.config.element},
                 {"k", rep.config.k},
                 {"l", rep.config.smoothness()},
                 {"m", rep.config.m},
                 {"p", rep.config.p == NormP::Two ? "2" : "inf"},
                 {"field", rep.config.field},
                 {"family", rep.config.family_text},
                 {"seed", rep.config.seed}};
  j["rows"] = json::array();
  for (const auto& row : rep.rows) {
    json r = {{"h", row.h},
              {"H", row.big_h},
              {"error", row.error},
              {"max_error", row.max_error},
              {"max_bound_factor", row.max_bound},
              {"max_ratio", row.max_ratio}};
    if (row.observed_order)
      r["observed_order"] = *row.observed_order;
    else
      r["observed_order"] = nullptr;
    j["rows"].push_back(r);
  }
  j["ratio_sup"] = rep.ratio_sup;
  j["ratio_stable"] = rep.ratio_stable;
  j["expected_order"] = rep.expected_order;
  j["order_applicable"] = rep.order_applicable;
  j["order_in_range"] = rep.order_in_range;
  return j;
}

int cmd_convergence(ConvergenceConfig cfg, const std::string& out, const std::string& format) {
  if (cfg.p == NormP::Inf && cfg.element != "rt") {
    // refuse when the sup-norm sampling lattice cannot certify itself
    auto family = generate_family(FamilySpec::parse(cfg.family_text));
    bool ok = std::visit(
        [&](const auto& mesh) {
          constexpr int Dim = std::decay_t<decltype(mesh.vertices[0])>{}.c.size();
          auto f = scalar_field<Dim>(cfg.field);
          auto t = mesh.cell_simplex(0);
          SeminormOptions o;
          o.lattice_n = 32;
          auto dc = seminorm_inf_doubling(f, t, cfg.smoothness() + 1, o);
          return dc.converged;
        },
        family.front().mesh);
    if (!ok) {
      std::cerr << "sup-norm sampling did not pass the lattice-doubling check for this "
                   "field/family; refusing p=inf\n";
      return kExitInvariant;
    }
  }
  auto rep = run_convergence(cfg);
  if (format == "json") {
    emit(report_to_json(rep).dump(2) + "\n", out);
  } else {
    emit(to_csv(rep), out);
  }
  return rep.ratio_stable ? kExitOk : kExitInvariant;
}

int cmd_optimality(const std::string& s_list, const std::string& eps_list,
                   const std::string& out, const std::string& format) {
  auto ss = parse_list(s_list);
  auto es = parse_list(eps_list);
  for (double s : ss)
    if (!(s > 0.0 && s < 1.0)) throw CLI::ValidationError("s must lie in (0,1)");
  for (double e : es)
    if (!(e > 1.0 && e < 2.0)) throw CLI::ValidationError("eps must lie in (1,2)");

  bool all_pass = true;
  std::vector<OptimalityResult> results;
  for (double s : ss)
    for (double e : es) {
      auto r = optimality_check(s, e);
      all_pass = all_pass && r.pass;
      results.push_back(r);
    }

  if (format == "json") {
    json j = json::array();
    for (const auto& r : results)
      j.push_back({{"s", r.s},
                   {"eps", r.eps},
                   {"I_T", r.i_t_measured},
                   {"I_T_closed_form", r.i_t_closed},
                   {"H_T", r.h_t_closed},
                   {"ratio", r.ratio_measured},
                   {"pass", r.pass}});
    emit(j.dump(2) + "\n", out);
  } else {
    std::string text = "s,eps,I_T,H_T,ratio,pass\n";
    char buf[160];
    for (const auto& r : results) {
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%d\n", r.s, r.eps,
                    r.i_t_measured, r.h_t_closed, r.ratio_measured, r.pass ? 1 : 0);
      text += buf;
    }
    emit(text, out);
  }
  return all_pass ? kExitOk : kExitInvariant;
}

int cmd_selftest(std::uint64_t seed, const std::string& out) {
  auto results = run_selftest(seed);
  json j;
  j["seed"] = seed;
  j["suites"] = json::array();
  int failures = 0;
  for (const auto& r : results) {
    j["suites"].push_back({{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}});
    if (!r.pass) ++failures;
  }
  j["total"] = results.size();
  j["failures"] = failures;
  emit(j.dump(2) + "\n", out);
  if (failures > 0) {
    for (const auto& r : results)
      if (!r.pass) std::cerr << "selftest failure: " << r.id << "\n";
  }
  return failures == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic simplex interpolation toolbox"};
  app.require_subcommand(1);

  std::string out, format = "csv";

  auto* analyze = app.add_subcommand("analyze-simplex", "shape parameters of one simplex");
  std::vector<std::string> vertices;
  analyze->add_option("vertices", vertices, "3 or 4 comma-separated vertices, e.g. 0,0 1,0 0,1")
      ->required();
  analyze->add_option("--out", out, "output path (default stdout)");

  auto* quality = app.add_subcommand("mesh-quality", "per-element quality report");
  std::string mesh_path;
  bool allow_nonconforming = false;
  quality->add_option("mesh", mesh_path, "anisomesh file")->required();
  quality->add_flag("--allow-nonconforming", allow_nonconforming,
                    "report even if the mesh has conformity defects");
  quality->add_option("--out", out, "output path (default stdout)");
  quality->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* conv = app.add_subcommand("convergence", "interpolation error study over a family");
  ConvergenceConfig cfg;
  std::string p_text = "2";
  conv->add_option("--element", cfg.element, "lagrange|cr|rt")
      ->check(CLI::IsMember({"lagrange", "cr", "rt"}));
  conv->add_option("--k", cfg.k, "element order");
  conv->add_option("--l", cfg.l, "smoothness index (default k)");
  conv->add_option("--m", cfg.m, "error seminorm order");
  conv->add_option("--p", p_text, "2|inf")->check(CLI::IsMember({"2", "inf"}));
  conv->add_option("--family", cfg.family_text,
                   "family spec, e.g. aniso-strip-2d;gamma=2;levels=5");
  conv->add_option("--field", cfg.field, "field id (trig, quadric, cubic, vtrig, vquad, vxsq)");
  conv->add_option("--seed", cfg.seed, "rng seed echoed into the report");
  conv->add_option("--stability-tol", cfg.stability_tol, "ratio-sup stability tolerance");
  conv->add_option("--order-tol", cfg.order_tol, "observed-order tolerance");
  conv->add_option("--out", out, "output path (default stdout)");
  conv->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* opt = app.add_subcommand("optimality", "thin-tetra lower-bound experiment");
  std::string s_list = "0.25,0.125,0.0625", eps_list = "1.25,1.5,1.75";
  opt->add_option("--s-list", s_list, "comma-separated s values in (0,1)");
  opt->add_option("--eps-list", eps_list, "comma-separated eps values in (1,2)");
  opt->add_option("--out", out, "output path (default stdout)");
  opt->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* self = app.add_subcommand("selftest", "run every invariant suite");
  std::uint64_t seed = 2024;
  self->add_option("--seed", seed, "seed for the randomized suites");
  self->add_option("--out", out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze_simplex(vertices, out);
    if (*quality) return cmd_mesh_quality(mesh_path, allow_nonconforming, out, format);
    if (*conv) {
      cfg.p = p_text == "inf" ? NormP::Inf : NormP::Two;
      return cmd_convergence(cfg, out, format);
    }
    if (*opt) return cmd_optimality(s_list, eps_list, out, format);
    if (*self) return cmd_selftest(seed, out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const geometry_error& e) {
    std::cerr << "degenerate simplex: " << e.what() << "\n";
    return kExitBadGeometry;
  } catch (const mesh_format_error& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kExitBadGeometry;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitUsage;
}
