#pragma once

// Plain-text mesh format, version token "meshv1":
//
//   meshv1
//   vertices N
//   x y                 (N lines)
//   triangles M
//   i j k               (M lines, 0-based)
//   p2 K
//   i j x y             (K lines: edge endpoints and node position)
//   bedges L
//   i j TAG             (L lines)
//
// Round trips preserve coordinates to 17 significant digits.

#include <fstream>
#include <sstream>
#include <string>

#include "screensig/mesh.hpp"

namespace screensig {

namespace detail {

struct LineReader {
  std::istream& in;
  int line_no = 0;
  std::string line;

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("mesh parse error at line " + std::to_string(line_no) +
                                ": " + msg);
  }
  [[noreturn]] void fail_eof(const std::string& what) const {
    throw std::invalid_argument("mesh parse error: unexpected end of file, expected " + what);
  }
};

} // namespace detail

inline void write_mesh(const Mesh2D& m, std::ostream& out) {
  out << "meshv1\n";
  char buf[80];
  out << "vertices " << m.n_vertices() << "\n";
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  out << "triangles " << m.n_triangles() << "\n";
  for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "p2 " << m.n_p2() << "\n";
  for (int i = 0; i < m.n_p2(); ++i) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", m.p2_edges[i][0], m.p2_edges[i][1],
                  m.p2_positions[i].x(), m.p2_positions[i].y());
    out << buf;
  }
  out << "bedges " << m.boundary_edges.size() << "\n";
  for (const auto& e : m.boundary_edges)
    out << e.a << " " << e.b << " " << to_string(e.tag) << "\n";
}

inline void write_mesh(const Mesh2D& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open mesh file for writing: " + path);
  write_mesh(m, f);
}

inline Mesh2D read_mesh(std::istream& in) {
  detail::LineReader r{in};
  if (!r.next()) r.fail_eof("header");
  if (r.line != "meshv1") r.fail("unknown format version '" + r.line + "'");

  auto expect_count = [&](const char* keyword) -> int {
    if (!r.next()) r.fail_eof(keyword);
    std::istringstream ss(r.line);
    std::string kw;
    long n = -1;
    ss >> kw >> n;
    if (kw != keyword || n < 0) r.fail(std::string("expected '") + keyword + " N'");
    return static_cast<int>(n);
  };

  Mesh2D m;
  const int nv = expect_count("vertices");
  m.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!r.next()) r.fail_eof("vertex line");
    std::istringstream ss(r.line);
    double x, y;
    if (!(ss >> x >> y)) r.fail("bad vertex line");
    m.vertices.emplace_back(x, y);
  }

  const int nt = expect_count("triangles");
  m.triangles.reserve(nt);
  for (int i = 0; i < nt; ++i) {
    if (!r.next()) r.fail_eof("triangle line");
    std::istringstream ss(r.line);
    int a, b, c;
    if (!(ss >> a >> b >> c)) r.fail("bad triangle line");
    if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
      r.fail("triangle vertex index out of range");
    m.triangles.push_back({a, b, c});
  }

  const int np = expect_count("p2");
  m.p2_edges.reserve(np);
  m.p2_positions.reserve(np);
  for (int i = 0; i < np; ++i) {
    if (!r.next()) r.fail_eof("p2 line");
    std::istringstream ss(r.line);
    int a, b;
    double x, y;
    if (!(ss >> a >> b >> x >> y)) r.fail("bad p2 line");
    if (a < 0 || b < 0 || a >= nv || b >= nv) r.fail("p2 edge index out of range");
    m.p2_edges.push_back({std::min(a, b), std::max(a, b)});
    m.p2_positions.emplace_back(x, y);
  }

  const int nb = expect_count("bedges");
  m.boundary_edges.reserve(nb);
  for (int i = 0; i < nb; ++i) {
    if (!r.next()) r.fail_eof("bedge line");
    std::istringstream ss(r.line);
    int a, b;
    std::string tag;
    if (!(ss >> a >> b >> tag)) r.fail("bad bedge line");
    if (a < 0 || b < 0 || a >= nv || b >= nv) r.fail("bedge index out of range");
    BoundaryTag t;
    try {
      t = tag_from_string(tag);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    m.boundary_edges.push_back({a, b, t});
  }

  m.finalize();
  return m;
}

inline Mesh2D read_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(f);
}

} // namespace screensig
