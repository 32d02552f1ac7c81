#pragma once

#include "anisofem/mesh.hpp"

namespace anisofem {

/// Parsed family request: generator kind plus key=value parameters.
/// Text grammar: kind;key=value;key=v1:v2:...  Example:
///   aniso-strip-2d;gamma=2;levels=5
///   remark-tetra;eps=1.5;s=pow2:4:8
struct FamilySpec {
  std::string kind;
  std::map<std::string, std::string> params;

  static FamilySpec parse(const std::string& text) {
    FamilySpec spec;
    std::stringstream ss(text);
    std::string piece;
    bool first = true;
    while (std::getline(ss, piece, ';')) {
      if (first) {
        spec.kind = piece;
        first = false;
        continue;
      }
      auto eq = piece.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("family parameter without '=': " + piece);
      spec.params[piece.substr(0, eq)] = piece.substr(eq + 1);
    }
    if (spec.kind.empty()) throw std::invalid_argument("empty family spec");
    return spec;
  }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  double get_num(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : std::stod(it->second);
  }
};

struct FamilyLevel {
  double h = 0.0;  // max cell diameter
  MeshAny mesh;
};

namespace detail {

/// "pow2:a:b" expands to 2^-a .. 2^-b; otherwise a ':'-separated list.
inline std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  if (text.rfind("pow2:", 0) == 0) {
    std::stringstream ss(text.substr(5));
    std::string a, b;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':'))
      throw std::invalid_argument("pow2 schedule needs two exponents");
    int lo = std::stoi(a), hi = std::stoi(b);
    if (hi < lo) throw std::invalid_argument("pow2 schedule must descend");
    for (int e = lo; e <= hi; ++e) out.push_back(std::pow(2.0, -e));
    return out;
  }
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ':'))
    if (!piece.empty()) out.push_back(std::stod(piece));
  if (out.empty()) throw std::invalid_argument("empty schedule");
  return out;
}

inline Mesh<2> strip_mesh_2d(int nx, int ny) {
  Mesh<2> m;
  double hx = 1.0 / nx, hy = 1.0 / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices.push_back({i * hx, j * hy});
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.cells.push_back({v00, v10, v11});
      m.cells.push_back({v00, v11, v01});
    }
  return m;
}

inline Mesh<3> kuhn_box_3d(int nx, int ny, int nz) {
  Mesh<3> m;
  double hx = 1.0 / nx, hy = 1.0 / ny, hz = 1.0 / nz;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) m.vertices.push_back({i * hx, j * hy, k * hz});
  auto vid = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> at = {i, j, k};
          std::array<int, 4> cell{};
          cell[0] = vid(at[0], at[1], at[2]);
          for (int step = 0; step < 3; ++step) {
            at[p[step]] += 1;
            cell[step + 1] = vid(at[0], at[1], at[2]);
          }
          m.cells.push_back(cell);
        }
      }
  return m;
}

inline Mesh<2> refine_red(const Mesh<2>& m) {
  Mesh<2> out;
  out.vertices = m.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
    midpoint[key] = id;
    return id;
  };
  for (const auto& c : m.cells) {
    int m01 = mid(c[0], c[1]), m12 = mid(c[1], c[2]), m02 = mid(c[0], c[2]);
    out.cells.push_back({c[0], m01, m02});
    out.cells.push_back({m01, c[1], m12});
    out.cells.push_back({m02, m12, c[2]});
    out.cells.push_back({m01, m12, m02});
  }
  return out;
}

/// Red refinement of a tetrahedron into eight children with a fixed interior
/// diagonal choice, so meshes refine deterministically and conformingly.
inline Mesh<3> refine_red(const Mesh<3>& m) {
  Mesh<3> out;
  out.vertices = m.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
    midpoint[key] = id;
    return id;
  };
  for (const auto& c : m.cells) {
    int m01 = mid(c[0], c[1]), m02 = mid(c[0], c[2]), m03 = mid(c[0], c[3]);
    int m12 = mid(c[1], c[2]), m13 = mid(c[1], c[3]), m23 = mid(c[2], c[3]);
    out.cells.push_back({c[0], m01, m02, m03});
    out.cells.push_back({m01, c[1], m12, m13});
    out.cells.push_back({m02, m12, c[2], m23});
    out.cells.push_back({m03, m13, m23, c[3]});
    out.cells.push_back({m01, m02, m03, m13});
    out.cells.push_back({m01, m02, m12, m13});
    out.cells.push_back({m02, m03, m13, m23});
    out.cells.push_back({m02, m12, m13, m23});
  }
  return out;
}

template <int Dim>
inline double mesh_h(const Mesh<Dim>& m) {
  return m.max_diameter();
}

}  // namespace detail

/// Generates the level sequence for a family spec.  Every produced mesh is
/// conforming by construction; generation is deterministic for a fixed spec.
inline std::vector<FamilyLevel> generate_family(const FamilySpec& spec) {
  std::vector<FamilyLevel> levels;

  if (spec.kind == "remark-tetra") {
    double eps = spec.get_num("eps", 1.5);
    if (!(eps > 1.0 && eps < 2.0))
      throw std::invalid_argument("remark-tetra: need 1 < eps < 2");
    auto schedule = detail::parse_schedule(spec.get("s", "pow2:2:6"));
    for (double s : schedule) {
      if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("remark-tetra: need 0 < s < 1");
      Mesh<3> m;
      m.vertices = {{0.0, 0.0, 0.0},
                    {s, 0.0, 0.0},
                    {s / 2.0, std::pow(s, eps), 0.0},
                    {0.0, 0.0, s}};
      m.cells = {{0, 1, 2, 3}};
      levels.push_back({detail::mesh_h(m), std::move(m)});
    }
    return levels;
  }

  if (spec.kind == "aniso-strip-2d") {
    double gamma = spec.get_num("gamma", 1.0);
    if (gamma < 1.0) throw std::invalid_argument("aniso-strip-2d: need gamma >= 1");
    int nlevels = static_cast<int>(spec.get_num("levels", 4));
    int first = static_cast<int>(spec.get_num("first", 1));
    for (int j = first; j < first + nlevels; ++j) {
      int nx = 1 << j;
      long ny = std::lround(std::pow(2.0, gamma * j));
      auto m = detail::strip_mesh_2d(nx, static_cast<int>(ny));
      levels.push_back({detail::mesh_h(m), std::move(m)});
    }
    return levels;
  }

  if (spec.kind == "aniso-box-3d") {
    double g2 = spec.get_num("gamma2", 1.0), g3 = spec.get_num("gamma3", 1.0);
    if (g2 < 1.0 || g3 < 1.0) throw std::invalid_argument("aniso-box-3d: need gamma >= 1");
    int nlevels = static_cast<int>(spec.get_num("levels", 3));
    int first = static_cast<int>(spec.get_num("first", 1));
    for (int j = first; j < first + nlevels; ++j) {
      int nx = 1 << j;
      long ny = std::lround(std::pow(2.0, g2 * j));
      long nz = std::lround(std::pow(2.0, g3 * j));
      auto m = detail::kuhn_box_3d(nx, static_cast<int>(ny), static_cast<int>(nz));
      levels.push_back({detail::mesh_h(m), std::move(m)});
    }
    return levels;
  }

  if (spec.kind == "uniform-ref") {
    std::string seed = spec.get("seed", "unit-triangle");
    int nlevels = static_cast<int>(spec.get_num("levels", 3));
    if (seed == "unit-triangle" || seed == "unit-square") {
      Mesh<2> m;
      if (seed == "unit-triangle") {
        m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
        m.cells = {{0, 1, 2}};
      } else {
        m = detail::strip_mesh_2d(1, 1);
      }
      levels.push_back({detail::mesh_h(m), m});
      for (int l = 1; l <= nlevels; ++l) {
        m = detail::refine_red(m);
        levels.push_back({detail::mesh_h(m), m});
      }
      return levels;
    }
    if (seed == "unit-tet" || seed == "unit-cube") {
      Mesh<3> m;
      if (seed == "unit-tet") {
        m.vertices = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
        m.cells = {{0, 1, 2, 3}};
      } else {
        m = detail::kuhn_box_3d(1, 1, 1);
      }
      levels.push_back({detail::mesh_h(m), m});
      for (int l = 1; l <= nlevels; ++l) {
        m = detail::refine_red(m);
        levels.push_back({detail::mesh_h(m), m});
      }
      return levels;
    }
    throw std::invalid_argument("uniform-ref: unknown seed " + seed);
  }

  throw std::invalid_argument("unknown family kind: " + spec.kind);
}

}  // namespace anisofem
