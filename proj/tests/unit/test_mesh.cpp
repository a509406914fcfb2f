#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cardio/geometry.hpp"
#include "cardio/mesh.hpp"

using namespace cardio;
using mesh::SimplicialMesh;

namespace {

const char* kTriangle =
    "# one triangle\n"
    "mesh 2 3 1 3\n"
    "v 0 0\n"
    "v 1 0\n"
    "v 0 1\n"
    "\n"
    "c 0 1 2 1\n"
    "f 0 1 1\n"
    "f 1 2 1\n"
    "f 2 0 1\n";

SimplicialMesh parse(const std::string& text) {
  std::istringstream in(text);
  return mesh::parse_mesh(in);
}

SimplicialMesh unit_square(int n) { return geometry::rectangle_mesh(0, 1, 0, 1, n, n, mesh::kGamma); }

}  // namespace

TEST_CASE("smallest valid mesh loads") {
  const auto m = parse(kTriangle);
  CHECK(m.dim() == 2);
  CHECK(m.num_vertices() == 3);
  CHECK(m.num_cells() == 1);
  CHECK(m.num_facets() == 3);
  CHECK(m.cell_measure(0) == doctest::Approx(0.5));
}

TEST_CASE("cell referencing a missing vertex is rejected") {
  const std::string bad = "mesh 2 3 1 0\nv 0 0\nv 1 0\nv 0 1\nc 0 1 99 1\n";
  CHECK_THROWS_AS(parse(bad), InvariantError);
  try {
    parse(bad);
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("vertex 99") != std::string::npos);
  }
}

TEST_CASE("parse errors carry the line number") {
  const std::string bad = "mesh 2 3 1 0\nv 0 0\nv 1 zero\nv 0 1\nc 0 1 2 1\n";
  try {
    parse(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("mesh 2 3 1 0\nv 0 0\nv 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse("v 0 0\n"), ParseError);
}

TEST_CASE("clockwise cells are reoriented and degenerate cells rejected") {
  const auto m = parse("mesh 2 3 1 0\nv 0 0\nv 1 0\nv 0 1\nc 0 2 1 1\n");
  CHECK(m.cell_measure(0) > 0.0);
  CHECK_THROWS_AS(parse("mesh 2 3 1 0\nv 0 0\nv 1 0\nv 2 0\nc 0 1 2 1\n"), InvariantError);
}

TEST_CASE("a facet that is not a boundary face is rejected") {
  // diagonal of a two-triangle square is shared by both cells
  const std::string text = "mesh 2 4 2 1\nv 0 0\nv 1 0\nv 1 1\nv 0 1\nc 0 1 2 1\nc 0 2 3 1\nf 0 2 1\n";
  CHECK_THROWS_AS(parse(text), InvariantError);
}

TEST_CASE("save then load reproduces the desk heart byte for byte") {
  const auto heart = geometry::generate_heart(geometry::IdealGeometrySpec{});
  std::ostringstream first;
  mesh::write_mesh(first, heart);
  const auto again = parse(first.str());
  std::ostringstream second;
  mesh::write_mesh(second, again);
  CHECK(first.str() == second.str());
  CHECK(again.vertices() == heart.vertices());
  CHECK(again.cells() == heart.cells());
}

TEST_CASE("unit square boundary has length 4") {
  const auto patch = mesh::extract_boundary(unit_square(5), mesh::kGamma);
  CHECK(patch.size() == 20);
  CHECK(patch.total_measure() == doctest::Approx(4.0).epsilon(1e-14));
  for (const auto& n : patch.normals()) CHECK(std::abs(norm(n) - 1.0) <= 1e-12);
  double lumped = 0.0;
  for (double w : patch.lumped_weights()) lumped += w;
  CHECK(lumped == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("torso hole patch has as many facets as the file declares") {
  const auto pair = geometry::generate_pair(geometry::IdealGeometrySpec{});
  std::ostringstream out;
  mesh::write_mesh(out, pair.torso);
  // count GAMMA facet records in the written file
  std::istringstream in(out.str());
  std::string line;
  std::size_t gamma = 0;
  while (std::getline(in, line))
    if (line.rfind("f ", 0) == 0 && line.substr(line.find_last_of(' ') + 1) == "1") ++gamma;
  const auto patch = mesh::extract_boundary(pair.torso, mesh::kGamma);
  CHECK(gamma > 0);
  CHECK(patch.size() == gamma);
}

TEST_CASE("unknown label is an error") {
  CHECK_THROWS_AS(mesh::extract_boundary(unit_square(2), mesh::kSigmaExt), Error);
}

TEST_CASE("surface measures match the generated geometry") {
  const auto pair = geometry::generate_pair(geometry::IdealGeometrySpec{});
  const auto ext = mesh::extract_boundary(pair.torso, mesh::kSigmaExt);
  CHECK(ext.total_measure() == doctest::Approx(2000.0).epsilon(1e-8));

  // heart boundary: polygon perimeter from the ordered loop
  const auto loop = geometry::boundary_loop(pair.heart, mesh::kGamma);
  double perimeter = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k)
    perimeter += distance(pair.heart.vertex(loop[k]), pair.heart.vertex(loop[(k + 1) % loop.size()]));
  const auto gamma = mesh::extract_boundary(pair.heart, mesh::kGamma);
  CHECK(gamma.total_measure() == doctest::Approx(perimeter).epsilon(1e-8));
}

TEST_CASE("exterior normals point away from the domain centroid") {
  const auto pair = geometry::generate_pair(geometry::IdealGeometrySpec{});
  for (const auto* m : {&pair.heart, &pair.torso}) {
    const int label = m == &pair.heart ? mesh::kGamma : mesh::kSigmaExt;
    const auto patch = mesh::extract_boundary(*m, label);
    Point centroid{0, 0, 0};
    for (const auto& v : m->vertices()) centroid = centroid + v;
    centroid = (1.0 / static_cast<double>(m->num_vertices())) * centroid;
    for (std::size_t f = 0; f < patch.size(); ++f) {
      const Point mid = 0.5 * (patch.facet_point(f, 0) + patch.facet_point(f, 1));
      CHECK(dot(patch.normals()[f], mid - centroid) > 0.0);
    }
  }
  // the hole boundary of the torso points into the hole
  const auto hole = mesh::extract_boundary(pair.torso, mesh::kGamma);
  const Point c = geometry::IdealGeometrySpec{}.heart_center;
  for (std::size_t f = 0; f < hole.size(); ++f) {
    const Point mid = 0.5 * (hole.facet_point(f, 0) + hole.facet_point(f, 1));
    CHECK(dot(hole.normals()[f], mid - c) < 0.0);
  }
}

TEST_CASE("locate: vertex, midpoint and offset points") {
  const auto patch = mesh::extract_boundary(unit_square(4), mesh::kGamma);
  // bottom edge facets span [0, 0.25] etc.
  auto at_vertex = patch.locate({0.25, 0.0, 0.0});
  CHECK(at_vertex.distance == doctest::Approx(0.0));
  CHECK(std::max(at_vertex.weights[0], at_vertex.weights[1]) == doctest::Approx(1.0));

  auto mid = patch.locate({0.125, 0.0, 0.0});
  CHECK(mid.distance <= 1e-10);
  CHECK(mid.weights[0] == doctest::Approx(0.5));
  CHECK(mid.weights[1] == doctest::Approx(0.5));

  // 0.3 outward along the normal of the midpoint (normal is -y)
  auto off = patch.locate({0.125, -0.3, 0.0});
  CHECK(off.distance == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(off.weights[0] == doctest::Approx(0.5));
  CHECK(off.facet == mid.facet);
  const auto brute = patch.locate_brute_force({0.125, -0.3, 0.0});
  CHECK(brute.facet == off.facet);
  CHECK(brute.distance == doctest::Approx(off.distance).epsilon(1e-14));
}

TEST_CASE("locate reproduces points that lie on the surface") {
  const auto pair = geometry::generate_pair(geometry::IdealGeometrySpec{});
  const auto patch = mesh::extract_boundary(pair.heart, mesh::kGamma);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const int f = static_cast<int>(rng() % patch.size());
    const double s = u(rng);
    const Point p = (1.0 - s) * patch.facet_point(f, 0) + s * patch.facet_point(f, 1);
    const auto loc = patch.locate(p);
    CHECK(loc.distance <= 1e-10);
    const Point q = loc.weights[0] * patch.facet_point(loc.facet, 0) + loc.weights[1] * patch.facet_point(loc.facet, 1);
    CHECK(distance(p, q) <= 1e-10);
  }
}

TEST_CASE("grid search agrees with brute force over the bounding box") {
  geometry::IdealGeometrySpec spec;
  spec.conforming = false;
  spec.h_torso_gamma = 3.0;
  const auto pair = geometry::generate_pair(spec);
  for (const auto* m : {&pair.heart, &pair.torso}) {
    const auto patch = mesh::extract_boundary(*m, mesh::kGamma);
    Point lo{1e300, 1e300, 0}, hi{-1e300, -1e300, 0};
    for (int v : patch.vertices())
      for (int d = 0; d < 2; ++d) {
        lo[d] = std::min(lo[d], m->vertex(v)[d]);
        hi[d] = std::max(hi[d], m->vertex(v)[d]);
      }
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(lo[0], hi[0]), uy(lo[1], hi[1]);
    for (int k = 0; k < 500; ++k) {
      const Point p{ux(rng), uy(rng), 0.0};
      const auto a = patch.locate(p);
      const auto b = patch.locate_brute_force(p);
      CHECK(std::abs(a.distance - b.distance) <= 1e-10);
      CHECK(a.facet == b.facet);
      CHECK(a.weights[0] + a.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(a.weights[0] >= 0.0);
      CHECK(a.weights[1] >= 0.0);
    }
  }
}

TEST_CASE("3D surface location matches brute force") {
  geometry::IdealGeometrySpec spec;
  spec.dim = 3;
  spec.h_heart = 8.0;
  spec.h_torso_gamma = 8.0;
  spec.h_torso_sigma = 30.0;
  spec.heart_semi_axes = {60.0, 60.0, 30.0};
  const auto heart = geometry::generate_heart(spec);
  const auto patch = mesh::extract_boundary(heart, mesh::kGamma);
  for (const auto& n : patch.normals()) CHECK(std::abs(norm(n) - 1.0) <= 1e-12);
  double sum = 0.0;
  for (double a : patch.measures()) sum += a;
  CHECK(patch.total_measure() == doctest::Approx(sum).epsilon(1e-14));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ux(-50, 90), uy(20, 160), uz(-40, 40);
  for (int k = 0; k < 200; ++k) {
    const Point p{ux(rng), uy(rng), uz(rng)};
    const auto a = patch.locate(p);
    const auto b = patch.locate_brute_force(p);
    CHECK(std::abs(a.distance - b.distance) <= 1e-10);
    CHECK(a.weights[0] + a.weights[1] + a.weights[2] == doctest::Approx(1.0).epsilon(1e-12));
  }
}
