#pragma once

// Tagged P2 triangulations of the computational domains: circular sectors,
// annular sectors, disks, and "exterior" meshes (a disk of radius R_pml_outer
// with the scatterer boundary, far field circle and PML interface embedded as
// unions of mesh edges). Generation is structured-parametric in polar
// coordinates: deterministic, conforming, with every node that belongs to a
// circular arc (vertices and P2 edge midpoints) placed on the exact circle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "screensig/specfun.hpp"

namespace screensig {

enum class BoundaryTag { GAMMA, NEUMANN_REST, FARFIELD_CIRCLE, PML_OUTER };

inline const char* to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::GAMMA: return "GAMMA";
    case BoundaryTag::NEUMANN_REST: return "NEUMANN_REST";
    case BoundaryTag::FARFIELD_CIRCLE: return "FARFIELD_CIRCLE";
    case BoundaryTag::PML_OUTER: return "PML_OUTER";
  }
  return "?";
}

inline BoundaryTag tag_from_string(const std::string& s) {
  if (s == "GAMMA") return BoundaryTag::GAMMA;
  if (s == "NEUMANN_REST") return BoundaryTag::NEUMANN_REST;
  if (s == "FARFIELD_CIRCLE") return BoundaryTag::FARFIELD_CIRCLE;
  if (s == "PML_OUTER") return BoundaryTag::PML_OUTER;
  throw std::invalid_argument("unknown boundary tag '" + s + "'");
}

struct DomainSpec {
  enum class Kind { Sector, AnnularSector, Disk, Exterior };

  Kind kind = Kind::Sector;
  double alpha = pi;   // opening angle of sector / annular sector
  double r1 = 0.0;     // inner radius (annular sector)
  double r2 = 1.0;     // outer radius (sector, annular sector) or disk radius
  // exterior-only parameters; `inner_kind` is Sector or Disk and describes D
  Kind inner_kind = Kind::Sector;
  double R_farfield = 0.0;
  double R_pml_inner = 0.0;
  double R_pml_outer = 0.0;

  static DomainSpec sector(double alpha, double r2) {
    DomainSpec s;
    s.kind = Kind::Sector;
    s.alpha = alpha;
    s.r2 = r2;
    s.validate();
    return s;
  }
  static DomainSpec annular_sector(double alpha, double r1, double r2) {
    DomainSpec s;
    s.kind = Kind::AnnularSector;
    s.alpha = alpha;
    s.r1 = r1;
    s.r2 = r2;
    s.validate();
    return s;
  }
  static DomainSpec disk(double R) {
    DomainSpec s;
    s.kind = Kind::Disk;
    s.alpha = 2.0 * pi;
    s.r2 = R;
    s.validate();
    return s;
  }
  static DomainSpec exterior_of(const DomainSpec& inner, double R_farfield,
                                double R_pml_inner, double R_pml_outer) {
    if (inner.kind != Kind::Sector && inner.kind != Kind::Disk)
      throw std::invalid_argument("exterior_of: inner domain must be a sector or a disk");
    DomainSpec s = inner;
    s.kind = Kind::Exterior;
    s.inner_kind = inner.kind;
    s.R_farfield = R_farfield;
    s.R_pml_inner = R_pml_inner;
    s.R_pml_outer = R_pml_outer;
    s.validate();
    return s;
  }

  // Radius of the screen-bearing boundary of D.
  double screen_radius() const { return r2; }

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("DomainSpec: " + m); };
    switch (kind) {
      case Kind::Sector:
        if (!(alpha > 0.0 && alpha < 2.0 * pi)) fail("sector needs 0 < alpha < 2*pi");
        if (!(r2 > 0.0)) fail("sector needs r2 > 0");
        break;
      case Kind::AnnularSector:
        if (!(alpha > 0.0 && alpha < 2.0 * pi)) fail("annular sector needs 0 < alpha < 2*pi");
        if (!(r1 > 0.0 && r1 < r2)) fail("annular sector needs 0 < r1 < r2");
        break;
      case Kind::Disk:
        if (!(r2 > 0.0)) fail("disk needs R > 0");
        break;
      case Kind::Exterior:
        if (inner_kind == Kind::Sector && !(alpha > 0.0 && alpha < 2.0 * pi))
          fail("exterior sector needs 0 < alpha < 2*pi");
        if (!(r2 > 0.0)) fail("exterior needs inner radius > 0");
        if (!(r2 < R_farfield && R_farfield < R_pml_inner && R_pml_inner < R_pml_outer))
          fail("exterior needs r2 < R_farfield < R_pml_inner < R_pml_outer");
        break;
    }
  }
};

// Is p inside the bounded scatterer domain D described by `inner`
// (Sector or Disk kinds; used to split exterior meshes and to place z points).
inline bool domain_contains(const DomainSpec& d, const Vec2& p) {
  const double r = p.norm();
  switch (d.kind == DomainSpec::Kind::Exterior ? d.inner_kind : d.kind) {
    case DomainSpec::Kind::Disk:
      return r < d.r2;
    case DomainSpec::Kind::Sector: {
      if (r >= d.r2) return false;
      double th = std::atan2(p.y(), p.x());
      if (th < 0.0) th += 2.0 * pi;
      return th > 0.0 && th < d.alpha;
    }
    case DomainSpec::Kind::AnnularSector: {
      if (r <= d.r1 || r >= d.r2) return false;
      double th = std::atan2(p.y(), p.x());
      if (th < 0.0) th += 2.0 * pi;
      return th > 0.0 && th < d.alpha;
    }
    default:
      return false;
  }
}

// Centroid of D (sectors and disks).
inline Vec2 domain_centroid(const DomainSpec& d) {
  const DomainSpec::Kind k = d.kind == DomainSpec::Kind::Exterior ? d.inner_kind : d.kind;
  if (k == DomainSpec::Kind::Disk) return Vec2::Zero();
  const double dist = 4.0 * d.r2 * std::sin(0.5 * d.alpha) / (3.0 * d.alpha);
  const double ang = 0.5 * d.alpha;
  return {dist * std::cos(ang), dist * std::sin(ang)};
}

// Radius of the largest inscribed disk of D.
inline double domain_inradius(const DomainSpec& d) {
  const DomainSpec::Kind k = d.kind == DomainSpec::Kind::Exterior ? d.inner_kind : d.kind;
  if (k == DomainSpec::Kind::Disk) return d.r2;
  const double s = std::sin(0.5 * std::min(d.alpha, pi));
  return d.r2 * s / (1.0 + s);
}

struct BoundaryEdge {
  int a = 0, b = 0;  // vertex indices
  BoundaryTag tag = BoundaryTag::GAMMA;
};

struct Mesh2D {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW
  std::vector<Vec2> p2_positions;             // one node per unique edge
  std::vector<std::array<int, 2>> p2_edges;   // sorted endpoint pair per node
  std::vector<BoundaryEdge> boundary_edges;   // tagged edges (may be interior interfaces)
  double h_max = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_p2() const { return static_cast<int>(p2_positions.size()); }
  int n_dofs() const { return n_vertices() + n_p2(); }

  int p2_index(int a, int b) const {
    auto it = edge_lookup_.find(edge_key(a, b));
    if (it == edge_lookup_.end())
      throw std::runtime_error("Mesh2D: edge without p2 node");
    return it->second;
  }

  // Global dof ids of a triangle: vertices then opposite-ordered midpoints
  // (local edges: (0,1), (1,2), (2,0)).
  std::array<int, 6> element_dofs(int t) const {
    const auto& tri = triangles[t];
    return {tri[0], tri[1], tri[2],
            n_vertices() + p2_index(tri[0], tri[1]),
            n_vertices() + p2_index(tri[1], tri[2]),
            n_vertices() + p2_index(tri[2], tri[0])};
  }

  Vec2 node_position(int dof) const {
    return dof < n_vertices() ? vertices[dof] : p2_positions[dof - n_vertices()];
  }

  // Rebuild the edge->p2 lookup and h_max; call after manual construction.
  void finalize() {
    edge_lookup_.clear();
    edge_lookup_.reserve(p2_edges.size() * 2);
    for (int i = 0; i < n_p2(); ++i)
      edge_lookup_.emplace(edge_key(p2_edges[i][0], p2_edges[i][1]), i);
    h_max = 0.0;
    for (const auto& tri : triangles)
      for (int e = 0; e < 3; ++e)
        h_max = std::max(h_max, (vertices[tri[e]] - vertices[tri[(e + 1) % 3]]).norm());
  }

  static std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (lo << 32) | hi;
  }

 private:
  std::unordered_map<std::uint64_t, int> edge_lookup_;
};

inline double triangle_area(const Mesh2D& m, int t) {
  const auto& tri = m.triangles[t];
  const Vec2 a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

inline double mesh_area(const Mesh2D& m) {
  double s = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) s += triangle_area(m, t);
  return s;
}

inline double tagged_length(const Mesh2D& m, BoundaryTag tag) {
  double s = 0.0;
  for (const auto& e : m.boundary_edges)
    if (e.tag == tag) s += (m.vertices[e.a] - m.vertices[e.b]).norm();
  return s;
}

namespace detail {

// Subdivide [a,b] into ceil((b-a)/h) uniform pieces, at least n_min.
inline void fill_band(std::vector<double>& out, double a, double b, double h, int n_min = 1) {
  const int n = std::max(n_min, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
  for (int i = 1; i <= n; ++i) out.push_back(a + (b - a) * i / n);
}

struct PolarBuilder {
  std::vector<double> radii;   // ascending, radii[0] may be 0
  std::vector<double> thetas;  // ascending; if `wrap`, covers [0, 2pi)
  bool wrap = false;

  Mesh2D build() const {
    Mesh2D m;
    const int nr = static_cast<int>(radii.size());
    const int nt = static_cast<int>(thetas.size());
    const int ncol = nt;  // vertices per ring
    const bool has_center = radii[0] == 0.0;

    std::vector<std::vector<int>> ring(nr);
    if (has_center) {
      ring[0].assign(ncol, 0);
      m.vertices.emplace_back(0.0, 0.0);
    }
    for (int i = has_center ? 1 : 0; i < nr; ++i) {
      ring[i].resize(ncol);
      for (int j = 0; j < ncol; ++j) {
        ring[i][j] = static_cast<int>(m.vertices.size());
        m.vertices.emplace_back(radii[i] * std::cos(thetas[j]), radii[i] * std::sin(thetas[j]));
      }
    }

    const int nseg = wrap ? nt : nt - 1;
    auto col = [&](int j) { return wrap ? j % nt : j; };

    for (int i = 0; i + 1 < nr; ++i) {
      for (int j = 0; j < nseg; ++j) {
        const int a0 = ring[i][col(j)], a1 = ring[i][col(j + 1)];
        const int b0 = ring[i + 1][col(j)], b1 = ring[i + 1][col(j + 1)];
        if (i == 0 && has_center) {
          m.triangles.push_back({a0, b0, b1});
        } else {
          m.triangles.push_back({a0, b0, b1});
          m.triangles.push_back({a0, b1, a1});
        }
      }
    }
    return m;
  }
};

// Assign the P2 node of every edge; midpoints of circumferential edges
// (both endpoints at the same distance from the origin) are projected onto
// the exact circle. Radial and diagonal edges keep straight midpoints.
inline void populate_p2(Mesh2D& m) {
  std::unordered_map<std::uint64_t, int> seen;
  m.p2_positions.clear();
  m.p2_edges.clear();
  for (const auto& tri : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      const auto key = Mesh2D::edge_key(a, b);
      if (seen.count(key)) continue;
      seen.emplace(key, static_cast<int>(m.p2_positions.size()));
      const Vec2 pa = m.vertices[a], pb = m.vertices[b];
      Vec2 mid = 0.5 * (pa + pb);
      const double ra = pa.norm(), rb = pb.norm();
      if (ra > 0.0 && std::abs(ra - rb) < 1e-12 * std::max(1.0, ra) && mid.norm() > 0.0)
        mid *= ra / mid.norm();
      m.p2_positions.push_back(mid);
      m.p2_edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
}

inline bool near(double a, double b) { return std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(b)); }

} // namespace detail

// Generate a conforming tagged P2 mesh for `spec` with target diameter
// `h_target` (achieved h_max <= 1.5*h_target). Throws std::invalid_argument
// for invalid specs and std::runtime_error if the domain degenerates.
inline Mesh2D generate_mesh(const DomainSpec& spec, double h_target) {
  spec.validate();
  if (!(h_target > 0.0)) throw std::invalid_argument("generate_mesh: h_target must be positive");
  const double h = h_target / 1.15;  // keeps cell diagonals below 1.5*h_target

  detail::PolarBuilder pb;
  std::vector<double> mandatory_r;
  double r_ref = 0.0;  // radius at which the angular spacing equals h

  using K = DomainSpec::Kind;
  switch (spec.kind) {
    case K::Sector:
      mandatory_r = {0.0, spec.r2};
      r_ref = spec.r2;
      break;
    case K::AnnularSector:
      mandatory_r = {spec.r1, spec.r2};
      r_ref = spec.r2;
      break;
    case K::Disk:
      mandatory_r = {0.0, spec.r2};
      r_ref = spec.r2;
      pb.wrap = true;
      break;
    case K::Exterior:
      mandatory_r = {0.0, spec.r2, spec.R_farfield, spec.R_pml_inner, spec.R_pml_outer};
      r_ref = spec.R_pml_outer;
      pb.wrap = true;
      break;
  }

  pb.radii.push_back(mandatory_r.front());
  for (std::size_t i = 0; i + 1 < mandatory_r.size(); ++i)
    detail::fill_band(pb.radii, mandatory_r[i], mandatory_r[i + 1], h);

  const bool split_angle =
      spec.kind == K::Sector || spec.kind == K::AnnularSector ||
      (spec.kind == K::Exterior && spec.inner_kind == K::Sector);
  pb.thetas.push_back(0.0);
  if (pb.wrap) {
    if (split_angle && spec.alpha < 2.0 * pi) {
      detail::fill_band(pb.thetas, 0.0, spec.alpha, h / r_ref, 2);
      detail::fill_band(pb.thetas, spec.alpha, 2.0 * pi, h / r_ref, 2);
      pb.thetas.pop_back();  // 2*pi duplicates theta = 0
    } else {
      detail::fill_band(pb.thetas, 0.0, 2.0 * pi, h / r_ref, 4);
      pb.thetas.pop_back();
    }
  } else {
    detail::fill_band(pb.thetas, 0.0, spec.alpha, h / r_ref, 2);
  }

  Mesh2D m = pb.build();
  if (m.n_triangles() < 8)
    throw std::runtime_error("generate_mesh: h_target too coarse, domain not resolved");

  // Unique undirected edges, in deterministic first-seen order.
  std::vector<std::array<int, 2>> edges;
  {
    std::unordered_map<std::uint64_t, int> seen;
    for (const auto& tri : m.triangles)
      for (int e = 0; e < 3; ++e) {
        const int a = tri[e], b = tri[(e + 1) % 3];
        const auto key = Mesh2D::edge_key(a, b);
        if (seen.emplace(key, 1).second)
          edges.push_back({std::min(a, b), std::max(a, b)});
      }
  }

  // Tag edges directly from the grid structure.
  auto add_ring_tags = [&](double radius, double theta_lo, double theta_hi, BoundaryTag tag) {
    for (const auto& ed : edges) {
      const Vec2 pa = m.vertices[ed[0]], pb2 = m.vertices[ed[1]];
      if (!detail::near(pa.norm(), radius) || !detail::near(pb2.norm(), radius)) continue;
      auto angle = [](const Vec2& p) {
        double t = std::atan2(p.y(), p.x());
        if (t < -1e-12) t += 2.0 * pi;
        return t;
      };
      const double ta = angle(pa), tb = angle(pb2);
      const double lo = theta_lo - 1e-9, hi = theta_hi + 1e-9;
      if (ta >= lo && ta <= hi && tb >= lo && tb <= hi)
        m.boundary_edges.push_back({ed[0], ed[1], tag});
    }
  };
  auto add_radial_tags = [&](double theta, double r_lo, double r_hi, BoundaryTag tag) {
    const Vec2 dir(std::cos(theta), std::sin(theta));
    for (const auto& ed : edges) {
      const Vec2 pa = m.vertices[ed[0]], pb2 = m.vertices[ed[1]];
      const double ra = pa.dot(dir), rb = pb2.dot(dir);
      const bool on_ray_a = (pa - ra * dir).norm() < 1e-9 && ra >= r_lo - 1e-9 && ra <= r_hi + 1e-9;
      const bool on_ray_b = (pb2 - rb * dir).norm() < 1e-9 && rb >= r_lo - 1e-9 && rb <= r_hi + 1e-9;
      if (on_ray_a && on_ray_b && std::abs(ra - rb) > 1e-12)
        m.boundary_edges.push_back({ed[0], ed[1], tag});
    }
  };

  switch (spec.kind) {
    case K::Sector:
      add_ring_tags(spec.r2, 0.0, spec.alpha, BoundaryTag::GAMMA);
      add_radial_tags(0.0, 0.0, spec.r2, BoundaryTag::NEUMANN_REST);
      add_radial_tags(spec.alpha, 0.0, spec.r2, BoundaryTag::NEUMANN_REST);
      break;
    case K::AnnularSector:
      add_ring_tags(spec.r2, 0.0, spec.alpha, BoundaryTag::GAMMA);
      add_ring_tags(spec.r1, 0.0, spec.alpha, BoundaryTag::NEUMANN_REST);
      add_radial_tags(0.0, spec.r1, spec.r2, BoundaryTag::NEUMANN_REST);
      add_radial_tags(spec.alpha, spec.r1, spec.r2, BoundaryTag::NEUMANN_REST);
      break;
    case K::Disk:
      add_ring_tags(spec.r2, 0.0, 2.0 * pi, BoundaryTag::GAMMA);
      break;
    case K::Exterior:
      if (spec.inner_kind == K::Disk) {
        add_ring_tags(spec.r2, 0.0, 2.0 * pi, BoundaryTag::GAMMA);
      } else {
        add_ring_tags(spec.r2, 0.0, spec.alpha, BoundaryTag::GAMMA);
        add_radial_tags(0.0, 0.0, spec.r2, BoundaryTag::NEUMANN_REST);
        add_radial_tags(spec.alpha, 0.0, spec.r2, BoundaryTag::NEUMANN_REST);
      }
      add_ring_tags(spec.R_farfield, 0.0, 2.0 * pi, BoundaryTag::FARFIELD_CIRCLE);
      add_ring_tags(spec.R_pml_outer, 0.0, 2.0 * pi, BoundaryTag::PML_OUTER);
      break;
  }

  detail::populate_p2(m);
  m.finalize();
  return m;
}

// Uniform red refinement: each triangle into four, tags inherited, arc nodes
// reprojected (P2 midpoints of circumferential edges already lie on the arc
// and become the new vertices).
inline Mesh2D refine_mesh(const Mesh2D& mesh) {
  Mesh2D out;
  out.vertices = mesh.vertices;
  const int nv = mesh.n_vertices();
  out.vertices.insert(out.vertices.end(), mesh.p2_positions.begin(), mesh.p2_positions.end());

  out.triangles.reserve(4 * mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const int m01 = nv + mesh.p2_index(tri[0], tri[1]);
    const int m12 = nv + mesh.p2_index(tri[1], tri[2]);
    const int m20 = nv + mesh.p2_index(tri[2], tri[0]);
    out.triangles.push_back({tri[0], m01, m20});
    out.triangles.push_back({m01, tri[1], m12});
    out.triangles.push_back({m20, m12, tri[2]});
    out.triangles.push_back({m01, m12, m20});
  }

  out.boundary_edges.reserve(2 * mesh.boundary_edges.size());
  for (const auto& e : mesh.boundary_edges) {
    const int mid = nv + mesh.p2_index(e.a, e.b);
    out.boundary_edges.push_back({e.a, mid, e.tag});
    out.boundary_edges.push_back({mid, e.b, e.tag});
  }

  detail::populate_p2(out);
  out.finalize();
  return out;
}

} // namespace screensig
