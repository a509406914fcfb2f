#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"

#include "cardio/geometry.hpp"

using namespace cardio;
using geometry::IdealGeometrySpec;

namespace {

std::set<std::pair<double, double>> coords(const mesh::SimplicialMesh& m, const std::vector<int>& ids) {
  std::set<std::pair<double, double>> s;
  for (int v : ids) s.insert({m.vertex(v)[0], m.vertex(v)[1]});
  return s;
}

// every interior facet shared by two cells, every boundary facet by one
void check_watertight(const mesh::SimplicialMesh& m) {
  std::map<std::array<int, 3>, int> count;
  for (const auto& c : m.cells()) {
    for (int skip = 0; skip <= m.dim(); ++skip) {
      std::array<int, 3> f{-1, -1, -1};
      int k = 0;
      for (int j = 0; j <= m.dim(); ++j)
        if (j != skip) f[k++] = c[j];
      std::sort(f.begin(), f.begin() + m.dim());
      ++count[f];
    }
  }
  std::size_t single = 0;
  for (const auto& [f, n] : count) {
    CHECK(n <= 2);
    if (n == 1) ++single;
  }
  CHECK(single == m.num_facets());
}

}  // namespace

TEST_CASE("conforming pair shares its interface vertices") {
  const auto pair = geometry::generate_pair(IdealGeometrySpec{});
  const auto heart_gamma = pair.heart.labeled_vertices(mesh::kGamma);
  const auto torso_gamma = pair.torso.labeled_vertices(mesh::kGamma);
  CHECK(heart_gamma.size() == torso_gamma.size());
  CHECK(coords(pair.heart, heart_gamma) == coords(pair.torso, torso_gamma));
  CHECK(pair.torso.num_vertices() > pair.heart.num_vertices());
}

TEST_CASE("conforming pair merges into a watertight mesh") {
  const auto pair = geometry::generate_pair(IdealGeometrySpec{});
  const auto merged = geometry::merge_conforming(pair.heart, pair.torso);
  CHECK(merged.heart_vertices == static_cast<int>(pair.heart.num_vertices()));
  CHECK(merged.mesh.num_vertices() ==
        pair.heart.num_vertices() + pair.torso.num_vertices() - pair.torso.labeled_vertices(mesh::kGamma).size());
  check_watertight(merged.mesh);
  // only the exterior survives as boundary
  CHECK(!merged.mesh.has_label(mesh::kGamma));
}

TEST_CASE("coarser torso interface has about half the vertices") {
  IdealGeometrySpec spec;
  spec.conforming = false;
  spec.h_torso_gamma = 2.0 * spec.h_heart;
  const auto pair = geometry::generate_pair(spec);
  const auto heart_loop = geometry::boundary_loop(pair.heart, mesh::kGamma);
  const auto hole_loop = geometry::boundary_loop(pair.torso, mesh::kGamma);
  // arc-length oracle: perimeter / h for each side
  double perimeter = 0.0;
  for (std::size_t k = 0; k < heart_loop.size(); ++k)
    perimeter += distance(pair.heart.vertex(heart_loop[k]), pair.heart.vertex(heart_loop[(k + 1) % heart_loop.size()]));
  CHECK(std::abs(static_cast<double>(heart_loop.size()) - perimeter / spec.h_heart) <= 2.0);
  const double expected = static_cast<double>(heart_loop.size()) / 2.0;
  CHECK(std::abs(static_cast<double>(hole_loop.size()) - expected) <= 2.0);
  CHECK_THROWS_AS(geometry::merge_conforming(pair.heart, pair.torso), InvariantError);
}

TEST_CASE("non-conforming hole approximates the same curve") {
  IdealGeometrySpec spec;
  spec.conforming = false;
  spec.h_torso_gamma = 3.0;
  const auto pair = geometry::generate_pair(spec);
  const double r = spec.heart_semi_axes[0];
  for (int v : pair.torso.labeled_vertices(mesh::kGamma))
    CHECK(distance(pair.torso.vertex(v), spec.heart_center) == doctest::Approx(r).epsilon(1e-9));
}

TEST_CASE("graded torso has mean edge length between the two sizes") {
  IdealGeometrySpec spec;
  spec.h_torso_gamma = 2.0;
  spec.h_torso_sigma = 10.0;
  const auto pair = geometry::generate_pair(spec);
  const double mean = geometry::mean_edge_length(pair.torso);
  CHECK(mean > spec.h_torso_gamma);
  CHECK(mean < spec.h_torso_sigma);
  // the exterior edges follow h_sigma
  const auto ext = mesh::extract_boundary(pair.torso, mesh::kSigmaExt);
  const double ext_mean = ext.total_measure() / static_cast<double>(ext.size());
  CHECK(ext_mean == doctest::Approx(spec.h_torso_sigma).epsilon(0.1));
}

TEST_CASE("infeasible specs are rejected") {
  IdealGeometrySpec spec;
  spec.heart_center = {150.0, 90.0, 0.0};
  CHECK_THROWS_AS(geometry::generate_pair(spec), InvariantError);
  IdealGeometrySpec bad;
  bad.h_heart = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
}

TEST_CASE("generation is deterministic") {
  IdealGeometrySpec spec;
  spec.h_torso_gamma = 4.0;
  spec.conforming = false;
  const auto a = geometry::generate_pair(spec);
  const auto b = geometry::generate_pair(spec);
  CHECK(a.torso.vertices() == b.torso.vertices());
  CHECK(a.torso.cells() == b.torso.cells());
}

TEST_CASE("3D pair is conforming and watertight") {
  IdealGeometrySpec spec;
  spec.dim = 3;
  spec.h_heart = 8.0;
  spec.h_torso_gamma = 8.0;
  spec.h_torso_sigma = 30.0;
  spec.heart_semi_axes = {60.0, 60.0, 30.0};
  const auto pair = geometry::generate_pair(spec);
  CHECK(pair.heart.dim() == 3);
  const auto merged = geometry::merge_conforming(pair.heart, pair.torso);
  check_watertight(merged.mesh);
  double heart_volume = 0.0;
  for (std::size_t c = 0; c < pair.heart.num_cells(); ++c) heart_volume += pair.heart.cell_measure(static_cast<int>(c));
  double total = heart_volume;
  for (std::size_t c = 0; c < pair.torso.num_cells(); ++c) total += pair.torso.cell_measure(static_cast<int>(c));
  CHECK(total == doctest::Approx(400.0 * 600.0 * 200.0).epsilon(1e-9));
}

TEST_CASE("identity and translation transforms") {
  const auto heart = geometry::generate_heart(IdealGeometrySpec{});
  const auto same = geometry::apply_rigid(heart, geometry::RigidTransform{});
  CHECK(same.vertices() == heart.vertices());

  geometry::RigidTransform shift;
  shift.translation = {10.0, 0.0, 0.0};
  const auto moved = geometry::apply_rigid(heart, shift);
  CHECK(moved.cells() == heart.cells());
  for (std::size_t v = 0; v < heart.num_vertices(); ++v) {
    CHECK(moved.vertex(v)[0] == heart.vertex(v)[0] + 10.0);
    CHECK(moved.vertex(v)[1] == heart.vertex(v)[1]);
  }
}

TEST_CASE("rotation about the heart center preserves distances and volumes") {
  IdealGeometrySpec spec;
  const auto heart = geometry::generate_heart(spec);
  geometry::RigidTransform rot;
  rot.angle_deg = 3.0;
  rot.pivot = spec.heart_center;
  const auto moved = geometry::apply_rigid(heart, rot);
  for (std::size_t v = 0; v < heart.num_vertices(); ++v)
    CHECK(std::abs(distance(moved.vertex(v), rot.pivot) - distance(heart.vertex(v), rot.pivot)) <= 1e-10);
  for (std::size_t c = 0; c < heart.num_cells(); ++c) {
    const int ci = static_cast<int>(c);
    CHECK(moved.cell_measure(ci) == doctest::Approx(heart.cell_measure(ci)).epsilon(1e-10));
  }
  for (int k = 0; k < 50; ++k) {
    const int a = (k * 37) % static_cast<int>(heart.num_vertices());
    const int b = (k * 101 + 5) % static_cast<int>(heart.num_vertices());
    const double d0 = distance(heart.vertex(a), heart.vertex(b));
    CHECK(std::abs(distance(moved.vertex(a), moved.vertex(b)) - d0) <= 1e-9 * std::max(d0, 1.0));
  }
}

TEST_CASE("transform composed with its inverse is the identity") {
  geometry::RigidTransform t;
  t.axis = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
  t.angle_deg = 9.0;
  t.pivot = {20.0, 90.0, 5.0};
  t.translation = {3.0, -6.0, 9.0};
  const auto inv = geometry::inverse(t);
  for (const Point& p : {Point{0, 0, 0}, Point{100, -50, 20}, Point{20, 90, 5}}) {
    const Point q = geometry::apply_rigid(inv, geometry::apply_rigid(t, p));
    CHECK(distance(p, q) <= 1e-9);
  }
}

TEST_CASE("2D meshes only rotate about z") {
  const auto heart = geometry::generate_heart(IdealGeometrySpec{});
  geometry::RigidTransform t;
  t.axis = {1.0, 0.0, 0.0};
  t.angle_deg = 3.0;
  CHECK_THROWS(geometry::apply_rigid(heart, t));
}

TEST_CASE("torso regenerated around a moved heart conforms to it") {
  IdealGeometrySpec spec;
  const auto heart = geometry::generate_heart(spec);
  geometry::RigidTransform t;
  t.angle_deg = 3.0;
  t.pivot = spec.heart_center;
  t.translation = {1.0, 0.0, 0.0};
  const auto moved = geometry::apply_rigid(heart, t);
  const auto torso = geometry::generate_torso_around(moved, spec);
  const auto merged = geometry::merge_conforming(moved, torso);
  check_watertight(merged.mesh);
}
