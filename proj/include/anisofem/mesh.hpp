#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>

#include "anisofem/shape_metrics.hpp"

namespace anisofem {

struct mesh_format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Conforming simplicial mesh: vertices plus (Dim+1)-tuples of indices.
template <int Dim>
struct Mesh {
  std::vector<Vec<Dim>> vertices;
  std::vector<std::array<int, Dim + 1>> cells;

  Simplex<Dim> cell_simplex(int c) const {
    Simplex<Dim> s;
    for (int i = 0; i <= Dim; ++i) s.vertices[i] = vertices[cells[c][i]];
    return s;
  }

  /// h: the largest cell diameter.
  double max_diameter() const {
    double h = 0.0;
    for (size_t c = 0; c < cells.size(); ++c)
      h = std::max(h, diameter_unchecked(cell_simplex(static_cast<int>(c))));
    return h;
  }

  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// H(h) = max over cells of the pose-free shape parameter.
template <int Dim>
inline double mesh_h_param(const Mesh<Dim>& m) {
  if (m.cells.empty()) throw std::invalid_argument("empty mesh");
  double big = 0.0;
  for (size_t c = 0; c < m.cells.size(); ++c)
    big = std::max(big, param_h_t0(m.cell_simplex(static_cast<int>(c))));
  return big;
}

template <int Dim>
using Facet = std::array<int, Dim>;

template <int Dim>
struct ConformityReport {
  bool ok = true;
  // offending pairs: an over-shared or hanging facet plus the facet (or
  // vertex-carrying facet) it clashes with
  std::vector<std::pair<Facet<Dim>, Facet<Dim>>> offending;
  std::vector<std::string> messages;
};

namespace detail {

template <int Dim>
inline Facet<Dim> sorted_facet(const std::array<int, Dim + 1>& cell, int opposite) {
  Facet<Dim> f{};
  int k = 0;
  for (int i = 0; i <= Dim; ++i)
    if (i != opposite) f[k++] = cell[i];
  std::sort(f.begin(), f.end());
  return f;
}

// Strict interior (or edge-interior) containment of a vertex in a facet.
template <int Dim>
inline bool vertex_inside_facet(const std::vector<Vec<Dim>>& verts, const Facet<Dim>& f,
                                int v) {
  for (int idx : f)
    if (idx == v) return false;
  const Vec<Dim>& p = verts[v];
  if constexpr (Dim == 2) {
    Vec<2> a = verts[f[0]], b = verts[f[1]];
    Vec<2> ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return false;
    double t = dot(p - a, ab) / len2;
    double off = std::abs((p[0] - a[0]) * ab[1] - (p[1] - a[1]) * ab[0]) / std::sqrt(len2);
    double tol = 1e-10 * std::sqrt(len2);
    return off <= tol && t > 1e-10 && t < 1.0 - 1e-10;
  } else {
    Vec<3> a = verts[f[0]], b = verts[f[1]], c = verts[f[2]];
    Vec<3> n = cross(b - a, c - a);
    double n2 = norm(n);
    if (n2 == 0.0) return false;
    double dist = std::abs(dot(p - a, n)) / n2;
    double scale = std::sqrt(n2);
    if (dist > 1e-10 * scale) return false;
    // barycentric containment inside the triangle, excluding its corners
    Vec<3> v0 = b - a, v1 = c - a, v2 = p - a;
    double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1);
    double d20 = dot(v2, v0), d21 = dot(v2, v1);
    double denom = d00 * d11 - d01 * d01;
    if (denom == 0.0) return false;
    double l1 = (d11 * d20 - d01 * d21) / denom;
    double l2 = (d00 * d21 - d01 * d20) / denom;
    double l0 = 1.0 - l1 - l2;
    double eps = 1e-10;
    bool inside = l0 >= -eps && l1 >= -eps && l2 >= -eps;
    bool at_corner = (l0 > 1.0 - eps) || (l1 > 1.0 - eps) || (l2 > 1.0 - eps);
    return inside && !at_corner;
  }
}

}  // namespace detail

/// Detects over-shared facets, mismatched interfaces and hanging nodes
/// (a vertex lying strictly inside another cell's facet).
template <int Dim>
inline ConformityReport<Dim> conformity_check(const Mesh<Dim>& m) {
  ConformityReport<Dim> rep;
  const int nv = static_cast<int>(m.vertices.size());
  for (const auto& cell : m.cells) {
    for (int idx : cell)
      if (idx < 0 || idx >= nv) throw std::out_of_range("cell index out of range");
  }
  for (size_t c = 0; c < m.cells.size(); ++c) {
    if (is_degenerate(m.cell_simplex(static_cast<int>(c)))) {
      rep.ok = false;
      rep.messages.push_back("degenerate cell " + std::to_string(c));
    }
  }

  std::map<Facet<Dim>, int> multiplicity;
  for (const auto& cell : m.cells)
    for (int i = 0; i <= Dim; ++i) multiplicity[detail::sorted_facet<Dim>(cell, i)] += 1;

  std::vector<Facet<Dim>> boundary;
  for (const auto& [facet, count] : multiplicity) {
    if (count > 2) {
      rep.ok = false;
      rep.offending.push_back({facet, facet});
      rep.messages.push_back("facet shared by more than two cells");
    } else if (count == 1) {
      boundary.push_back(facet);
    }
  }

  // vertex -> boundary facets it belongs to, for reporting the partner
  std::multimap<int, const Facet<Dim>*> by_vertex;
  for (const auto& f : boundary)
    for (int idx : f) by_vertex.insert({idx, &f});

  // grid hash of vertices so the facet-interior scan stays near-linear
  double h = m.max_diameter();
  if (h <= 0.0) return rep;
  double cell_size = h;
  auto key_of = [&](const Vec<Dim>& p) {
    std::array<long long, Dim> k{};
    for (int i = 0; i < Dim; ++i) k[i] = static_cast<long long>(std::floor(p[i] / cell_size));
    return k;
  };
  std::map<std::array<long long, Dim>, std::vector<int>> grid;
  for (int v = 0; v < nv; ++v) grid[key_of(m.vertices[v])].push_back(v);

  for (const auto& facet : boundary) {
    // bounding box of the facet, expanded by one grid cell
    std::array<long long, Dim> lo{}, hi{};
    for (int i = 0; i < Dim; ++i) {
      double mn = m.vertices[facet[0]][i], mx = mn;
      for (int j = 1; j < Dim; ++j) {
        mn = std::min(mn, m.vertices[facet[j]][i]);
        mx = std::max(mx, m.vertices[facet[j]][i]);
      }
      lo[i] = static_cast<long long>(std::floor(mn / cell_size)) - 1;
      hi[i] = static_cast<long long>(std::floor(mx / cell_size)) + 1;
    }
    auto visit = [&](const std::array<long long, Dim>& key) {
      auto it = grid.find(key);
      if (it == grid.end()) return;
      for (int v : it->second) {
        if (!detail::vertex_inside_facet<Dim>(m.vertices, facet, v)) continue;
        rep.ok = false;
        Facet<Dim> partner = facet;
        auto range = by_vertex.equal_range(v);
        if (range.first != range.second) partner = *range.first->second;
        rep.offending.push_back({facet, partner});
        rep.messages.push_back("hanging node " + std::to_string(v) + " inside a facet");
      }
    };
    std::array<long long, Dim> key = lo;
    for (;;) {
      visit(key);
      int axis = 0;
      while (axis < Dim) {
        if (++key[axis] <= hi[axis]) break;
        key[axis] = lo[axis];
        ++axis;
      }
      if (axis == Dim) break;
    }
  }
  return rep;
}

using MeshAny = std::variant<Mesh<2>, Mesh<3>>;

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Line-oriented text format:
///   anisomesh <dim>
///   vertices <n>
///   <n coordinate lines>
///   cells <m>
///   <m zero-based index lines>
/// Comment lines start with '#'.  Coordinates are written with 17
/// significant digits so a round trip is exact.
template <int Dim>
inline void write_mesh(const Mesh<Dim>& m, std::ostream& os) {
  os << "anisomesh " << Dim << "\n";
  os << "vertices " << m.vertices.size() << "\n";
  for (const auto& v : m.vertices) {
    for (int i = 0; i < Dim; ++i) os << (i ? " " : "") << detail::format_double(v[i]);
    os << "\n";
  }
  os << "cells " << m.cells.size() << "\n";
  for (const auto& c : m.cells) {
    for (int i = 0; i <= Dim; ++i) os << (i ? " " : "") << c[i];
    os << "\n";
  }
}

template <int Dim>
inline void write_mesh(const Mesh<Dim>& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw mesh_format_error("cannot open for writing: " + path);
  write_mesh(m, os);
}

inline void write_mesh(const MeshAny& m, std::ostream& os) {
  std::visit([&](const auto& mesh) { write_mesh(mesh, os); }, m);
}

inline void write_mesh(const MeshAny& m, const std::string& path) {
  std::visit([&](const auto& mesh) { write_mesh(mesh, path); }, m);
}

namespace detail {

inline bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

template <int Dim>
inline Mesh<Dim> read_mesh_body(std::istream& is) {
  Mesh<Dim> m;
  std::string line, word;
  if (!next_content_line(is, line)) throw mesh_format_error("missing vertices header");
  std::istringstream vh(line);
  size_t nv = 0;
  if (!(vh >> word >> nv) || word != "vertices")
    throw mesh_format_error("expected 'vertices <count>'");
  m.vertices.reserve(nv);
  for (size_t i = 0; i < nv; ++i) {
    if (!next_content_line(is, line)) throw mesh_format_error("truncated vertex list");
    std::istringstream vs(line);
    Vec<Dim> v{};
    for (int j = 0; j < Dim; ++j)
      if (!(vs >> v[j])) throw mesh_format_error("malformed vertex line");
    double extra;
    if (vs >> extra) throw mesh_format_error("too many coordinates on vertex line");
    m.vertices.push_back(v);
  }
  if (!next_content_line(is, line)) throw mesh_format_error("missing cells header");
  std::istringstream ch(line);
  size_t nc = 0;
  if (!(ch >> word >> nc) || word != "cells")
    throw mesh_format_error("expected 'cells <count>'");
  std::set<std::array<int, Dim + 1>> seen;
  m.cells.reserve(nc);
  for (size_t i = 0; i < nc; ++i) {
    if (!next_content_line(is, line)) throw mesh_format_error("truncated cell list");
    std::istringstream cs(line);
    std::array<int, Dim + 1> c{};
    for (int j = 0; j <= Dim; ++j)
      if (!(cs >> c[j])) throw mesh_format_error("malformed cell line");
    int extra;
    if (cs >> extra) throw mesh_format_error("too many indices on cell line");
    for (int idx : c)
      if (idx < 0 || idx >= static_cast<int>(m.vertices.size()))
        throw mesh_format_error("cell index out of range");
    auto key = c;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) throw mesh_format_error("duplicate cell");
    m.cells.push_back(c);
  }
  return m;
}

}  // namespace detail

inline MeshAny read_mesh(std::istream& is) {
  std::string line;
  if (!detail::next_content_line(is, line)) throw mesh_format_error("empty mesh file");
  std::istringstream hs(line);
  std::string magic;
  int dim = 0;
  if (!(hs >> magic >> dim) || magic != "anisomesh")
    throw mesh_format_error("expected 'anisomesh <dim>' header");
  if (dim == 2) return detail::read_mesh_body<2>(is);
  if (dim == 3) return detail::read_mesh_body<3>(is);
  throw mesh_format_error("unsupported dimension");
}

inline MeshAny read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw mesh_format_error("cannot open mesh file: " + path);
  return read_mesh(is);
}

}  // namespace anisofem
