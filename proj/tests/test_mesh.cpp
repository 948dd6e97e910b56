#include <catch2/catch_amalgamated.hpp>

#include "screensig/mesh.hpp"
#include "screensig/mesh_io.hpp"

#include <set>
#include <sstream>

using namespace screensig;

TEST_CASE("sector mesh tags and geometry") {
  const auto spec = DomainSpec::sector(pi, 1.0);
  const Mesh2D m = generate_mesh(spec, 0.1);

  CHECK(m.h_max <= 1.5 * 0.1);
  CHECK(m.n_triangles() >= 8);

  // all triangles positively oriented, total area close to pi/2
  double area = 0.0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const double a = triangle_area(m, t);
    REQUIRE(a > 0.0);
    area += a;
  }
  CHECK_THAT(area, Catch::Matchers::WithinRel(pi / 2, 0.01));

  int n_gamma = 0, n_neumann = 0;
  for (const auto& e : m.boundary_edges) {
    if (e.tag == BoundaryTag::GAMMA) {
      ++n_gamma;
      CHECK(std::abs(m.vertices[e.a].norm() - 1.0) < 1e-10);
      CHECK(std::abs(m.vertices[e.b].norm() - 1.0) < 1e-10);
      // p2 midpoint node projected onto the exact arc
      const Vec2 mid = m.p2_positions[m.p2_index(e.a, e.b)];
      CHECK(std::abs(mid.norm() - 1.0) < 1e-10);
    } else {
      ++n_neumann;
      CHECK(e.tag == BoundaryTag::NEUMANN_REST);
    }
  }
  CHECK(n_gamma > 0);
  CHECK(n_neumann > 0);
  // Neumann edges exactly cover the diameter: total length 2*r2
  CHECK_THAT(tagged_length(m, BoundaryTag::NEUMANN_REST),
             Catch::Matchers::WithinAbs(2.0, 1e-9));

  // no duplicate vertices
  for (int i = 0; i < m.n_vertices(); ++i)
    for (int j = i + 1; j < std::min(m.n_vertices(), i + 40); ++j)
      CHECK((m.vertices[i] - m.vertices[j]).norm() > 1e-12 * m.h_max);
}

TEST_CASE("disk mesh boundary length converges at O(h^2)") {
  const auto spec = DomainSpec::disk(1.0);
  const Mesh2D coarse = generate_mesh(spec, 0.2);
  const double len0 = tagged_length(coarse, BoundaryTag::GAMMA);
  CHECK_THAT(len0, Catch::Matchers::WithinRel(2.0 * pi, 0.02));

  const Mesh2D fine = refine_mesh(coarse);
  const Mesh2D finer = refine_mesh(fine);
  const double e0 = 2.0 * pi - len0;
  const double e1 = 2.0 * pi - tagged_length(fine, BoundaryTag::GAMMA);
  const double e2 = 2.0 * pi - tagged_length(finer, BoundaryTag::GAMMA);
  REQUIRE(e0 > 0.0);
  CHECK(e1 < e0);
  CHECK(e2 < e1);
  // chord-length deficit shrinks by ~4x per refinement
  CHECK_THAT(e0 / e1, Catch::Matchers::WithinAbs(4.0, 0.4));
  CHECK_THAT(e1 / e2, Catch::Matchers::WithinAbs(4.0, 0.2));
}

TEST_CASE("annular sector mesh area") {
  const auto spec = DomainSpec::annular_sector(pi / 2, 0.8, 1.0);
  const Mesh2D m = generate_mesh(spec, 0.05);
  const double exact = 0.5 * (pi / 2) * (1.0 - 0.64);
  CHECK_THAT(mesh_area(m), Catch::Matchers::WithinRel(exact, 0.01));
  CHECK(tagged_length(m, BoundaryTag::GAMMA) > 0.0);
}

TEST_CASE("uniform refinement quadruples triangles and halves h") {
  const Mesh2D m = generate_mesh(DomainSpec::sector(pi / 2, 1.0), 0.15);
  const Mesh2D r = refine_mesh(m);
  CHECK(r.n_triangles() == 4 * m.n_triangles());
  CHECK_THAT(r.h_max, Catch::Matchers::WithinRel(0.5 * m.h_max, 0.1));

  // tags inherited, Gamma edges still on the unit circle
  for (const auto& e : r.boundary_edges)
    if (e.tag == BoundaryTag::GAMMA) {
      CHECK(std::abs(r.vertices[e.a].norm() - 1.0) < 1e-10);
      const Vec2 mid = r.p2_positions[r.p2_index(e.a, e.b)];
      CHECK(std::abs(mid.norm() - 1.0) < 1e-10);
    }
  for (int t = 0; t < r.n_triangles(); ++t) CHECK(triangle_area(r, t) > 0.0);
}

TEST_CASE("exterior mesh carries all interface tags") {
  const auto inner = DomainSpec::sector(pi, 1.0);
  const auto spec = DomainSpec::exterior_of(inner, 2.0, 3.0, 4.0);
  const Mesh2D m = generate_mesh(spec, 0.35);

  int counts[4] = {0, 0, 0, 0};
  for (const auto& e : m.boundary_edges) counts[static_cast<int>(e.tag)]++;
  CHECK(counts[static_cast<int>(BoundaryTag::GAMMA)] > 0);
  CHECK(counts[static_cast<int>(BoundaryTag::NEUMANN_REST)] > 0);
  CHECK(counts[static_cast<int>(BoundaryTag::FARFIELD_CIRCLE)] > 0);
  CHECK(counts[static_cast<int>(BoundaryTag::PML_OUTER)] > 0);

  CHECK_THAT(tagged_length(m, BoundaryTag::GAMMA), Catch::Matchers::WithinRel(pi, 0.02));
  CHECK_THAT(tagged_length(m, BoundaryTag::NEUMANN_REST), Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(tagged_length(m, BoundaryTag::FARFIELD_CIRCLE),
             Catch::Matchers::WithinRel(4.0 * pi, 0.02));

  for (const auto& e : m.boundary_edges)
    if (e.tag == BoundaryTag::FARFIELD_CIRCLE) {
      const Vec2 mid = m.p2_positions[m.p2_index(e.a, e.b)];
      CHECK(std::abs(mid.norm() - 2.0) < 1e-10);
    }

  // split of triangles by the screen domain D
  int inside = 0, outside = 0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const Vec2 c = (m.vertices[tri[0]] + m.vertices[tri[1]] + m.vertices[tri[2]]) / 3.0;
    (domain_contains(spec, c) ? inside : outside)++;
  }
  CHECK(inside > 0);
  CHECK(outside > inside);
}

TEST_CASE("invalid specs and unresolvable h are rejected") {
  CHECK_THROWS_AS(DomainSpec::sector(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::sector(pi, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DomainSpec::annular_sector(pi, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(
      DomainSpec::exterior_of(DomainSpec::sector(pi, 1.0), 3.0, 2.5, 4.0),
      std::invalid_argument);
  CHECK_THROWS_AS(generate_mesh(DomainSpec::sector(pi, 1.0), -0.1), std::invalid_argument);
  CHECK_THROWS_AS(generate_mesh(DomainSpec::annular_sector(0.2, 0.95, 1.0), 50.0),
                  std::runtime_error);
}

TEST_CASE("mesh io round trip") {
  const Mesh2D m = generate_mesh(DomainSpec::annular_sector(2.0, 0.5, 1.2), 0.2);
  std::stringstream ss;
  write_mesh(m, ss);
  const Mesh2D back = read_mesh(ss);

  REQUIRE(back.n_vertices() == m.n_vertices());
  REQUIRE(back.n_triangles() == m.n_triangles());
  REQUIRE(back.n_p2() == m.n_p2());
  REQUIRE(back.boundary_edges.size() == m.boundary_edges.size());
  for (int i = 0; i < m.n_vertices(); ++i) CHECK(back.vertices[i] == m.vertices[i]);
  for (int i = 0; i < m.n_triangles(); ++i) CHECK(back.triangles[i] == m.triangles[i]);
  for (int i = 0; i < m.n_p2(); ++i) {
    CHECK(back.p2_edges[i] == m.p2_edges[i]);
    CHECK(back.p2_positions[i] == m.p2_positions[i]);
  }
  for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
    CHECK(back.boundary_edges[i].a == m.boundary_edges[i].a);
    CHECK(back.boundary_edges[i].b == m.boundary_edges[i].b);
    CHECK(back.boundary_edges[i].tag == m.boundary_edges[i].tag);
  }
  CHECK(back.h_max == m.h_max);
}

TEST_CASE("mesh io rejects malformed input") {
  const Mesh2D m = generate_mesh(DomainSpec::sector(pi, 1.0), 0.4);
  std::stringstream ss;
  write_mesh(m, ss);
  const std::string text = ss.str();

  SECTION("truncated file") {
    std::stringstream t(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_mesh(t), std::invalid_argument);
  }
  SECTION("wrong version token") {
    std::stringstream t("meshv9\nvertices 0\ntriangles 0\np2 0\nbedges 0\n");
    CHECK_THROWS_WITH(read_mesh(t), Catch::Matchers::ContainsSubstring("meshv9"));
  }
  SECTION("unknown tag is named in the error") {
    std::string bad = text;
    const auto pos = bad.find("GAMMA");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 5, "GAMMA_SCREEN_X");
    std::stringstream t(bad);
    CHECK_THROWS_WITH(read_mesh(t), Catch::Matchers::ContainsSubstring("GAMMA_SCREEN_X"));
  }
}
