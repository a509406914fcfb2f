#include <cmath>
#include <numbers>
#include <unordered_map>

#include "cardio/geometry.hpp"

namespace cardio::geometry {

using mesh::SimplicialMesh;

Point apply_rigid(const RigidTransform& t, const Point& p) {
  const double th = t.angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(th), s = std::sin(th);
  const Point& k = t.axis;
  const Point v = p - t.pivot;
  // Rodrigues
  const Point r = c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
  return r + t.pivot + t.translation;
}

SimplicialMesh apply_rigid(const SimplicialMesh& mesh, const RigidTransform& t) {
  if (std::abs(norm(t.axis) - 1.0) > 1e-12) throw InvariantError("rotation axis must have unit norm");
  if (mesh.dim() == 2 && (t.axis[0] != 0.0 || t.axis[1] != 0.0 || t.translation[2] != 0.0))
    throw InvariantError("2D transforms rotate about z and translate in-plane");
  std::vector<Point> v;
  v.reserve(mesh.num_vertices());
  for (const auto& p : mesh.vertices()) v.push_back(apply_rigid(t, p));
  if (mesh.dim() == 2)
    for (auto& p : v) p[2] = 0.0;
  return SimplicialMesh(mesh.dim(), std::move(v), mesh.cells(), mesh.cell_region(), mesh.facets(),
                        mesh.facet_label());
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform inv;
  inv.axis = t.axis;
  inv.angle_deg = -t.angle_deg;
  inv.pivot = t.pivot + t.translation;
  inv.translation = -1.0 * t.translation;
  return inv;
}

MergedMesh merge_conforming(const SimplicialMesh& heart, const SimplicialMesh& torso, double tol) {
  if (heart.dim() != torso.dim()) throw InvariantError("heart and torso dimensions differ");
  const int dim = heart.dim();
  // hash heart boundary vertices on a grid of size 1e3 * tol
  const double cell = std::max(tol * 1e3, 1e-9);
  auto key = [&](const Point& p) {
    const long long x = std::llround(p[0] / cell), y = std::llround(p[1] / cell), z = std::llround(p[2] / cell);
    return (x * 73856093LL) ^ (y * 19349663LL) ^ (z * 83492791LL);
  };
  std::unordered_multimap<long long, int> index;
  for (int v : heart.labeled_vertices(mesh::kGamma)) index.emplace(key(heart.vertex(v)), v);

  MergedMesh out;
  out.heart_vertices = static_cast<int>(heart.num_vertices());
  out.heart_cells = static_cast<int>(heart.num_cells());
  std::vector<Point> verts = heart.vertices();
  out.torso_to_merged.assign(torso.num_vertices(), -1);
  const auto torso_gamma = torso.labeled_vertices(mesh::kGamma);
  std::vector<char> on_gamma(torso.num_vertices(), 0);
  for (int v : torso_gamma) on_gamma[v] = 1;
  for (std::size_t i = 0; i < torso.num_vertices(); ++i) {
    const Point& p = torso.vertex(static_cast<int>(i));
    if (on_gamma[i]) {
      int match = -1;
      // neighbouring grid keys may hold the match when p sits near a cell edge
      for (int dx = -1; dx <= 1 && match < 0; ++dx)
        for (int dy = -1; dy <= 1 && match < 0; ++dy)
          for (int dz = -1; dz <= 1 && match < 0; ++dz) {
            const Point q{p[0] + dx * cell, p[1] + dy * cell, p[2] + dz * cell};
            auto [b, e] = index.equal_range(key(q));
            for (auto it = b; it != e; ++it)
              if (distance(heart.vertex(it->second), p) <= tol) {
                match = it->second;
                break;
              }
          }
      if (match < 0)
        throw InvariantError("torso interface vertex " + std::to_string(i) + " has no coincident heart vertex");
      out.torso_to_merged[i] = match;
    } else {
      out.torso_to_merged[i] = static_cast<int>(verts.size());
      verts.push_back(p);
    }
  }
  std::vector<mesh::Simplex> cells = heart.cells();
  std::vector<int> regions(heart.num_cells(), kHeartRegion);
  for (std::size_t c = 0; c < torso.num_cells(); ++c) {
    auto cell = torso.cell(static_cast<int>(c));
    for (int k = 0; k <= dim; ++k) cell[k] = out.torso_to_merged[cell[k]];
    cells.push_back(cell);
    regions.push_back(kTorsoRegion);
  }
  std::vector<mesh::Facet> facets;
  std::vector<int> labels;
  for (std::size_t f = 0; f < torso.num_facets(); ++f) {
    if (torso.facet_label()[f] != mesh::kSigmaExt) continue;
    auto fa = torso.facets()[f];
    for (int k = 0; k < dim; ++k) fa[k] = out.torso_to_merged[fa[k]];
    facets.push_back(fa);
    labels.push_back(mesh::kSigmaExt);
  }
  out.mesh = SimplicialMesh(dim, std::move(verts), std::move(cells), std::move(regions), std::move(facets),
                            std::move(labels));
  const auto boundary = mesh::find_boundary_facets(dim, out.mesh.cells());
  if (boundary.size() != out.mesh.num_facets())
    throw InvariantError("merged heart-torso mesh is not watertight along the interface");
  return out;
}

}  // namespace cardio::geometry
