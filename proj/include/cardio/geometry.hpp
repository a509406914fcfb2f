#pragma once

#include <array>
#include <span>
#include <vector>

#include "cardio/mesh.hpp"

namespace cardio::geometry {

inline constexpr int kHeartRegion = 1;
inline constexpr int kTorsoRegion = 2;

/**
 * Idealized heart-in-torso geometry.
 *
 * The torso is the box [-half, half] minus the heart. The heart is an ellipse
 * in 2D and an elliptic cylinder (semi-axes a, b, half-height c) in 3D.
 */
struct IdealGeometrySpec {
  int dim = 2;
  Point torso_half{200.0, 300.0, 100.0};
  Point heart_center{20.0, 90.0, 0.0};
  Point heart_semi_axes{60.0, 60.0, 40.0};
  double h_heart = 2.0;
  double h_torso_gamma = 2.0;
  double h_torso_sigma = 10.0;
  bool conforming = true;
  unsigned seed = 12345;  ///< jitter of interior torso points

  /// Throws InvariantError when sizes are not positive or the heart is too close to the torso wall.
  void validate() const;
};

struct MeshPair {
  mesh::SimplicialMesh heart;
  mesh::SimplicialMesh torso;
};

/// Heart mesh only.
mesh::SimplicialMesh generate_heart(const IdealGeometrySpec& spec);
/// Heart and torso meshes; conforming pairs share interface vertex coordinates exactly.
MeshPair generate_pair(const IdealGeometrySpec& spec);
/// A torso whose hole is bounded exactly by the GAMMA boundary of `heart` (2D only).
mesh::SimplicialMesh generate_torso_around(const mesh::SimplicialMesh& heart, const IdealGeometrySpec& spec);

/// Structured triangulation of [x0,x1] x [y0,y1]; every boundary facet gets `label`.
mesh::SimplicialMesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny, int label,
                                    int region = kHeartRegion);

/**
 * Delaunay triangulation (Bowyer-Watson) of a point set.
 *
 * Returns counter-clockwise triangles over the convex hull. Points are
 * assumed distinct; near-degenerate configurations are handled by keeping
 * the insertion cavity star-shaped.
 */
std::vector<std::array<int, 3>> delaunay(std::span<const Point> points);

/// Vertices of a GAMMA-style closed boundary curve of a 2D mesh, in counter-clockwise order.
std::vector<int> boundary_loop(const mesh::SimplicialMesh& mesh, int label);

/// Rotation about an axis through `pivot`, followed by a translation.
struct RigidTransform {
  Point translation{0.0, 0.0, 0.0};
  Point axis{0.0, 0.0, 1.0};
  double angle_deg = 0.0;
  Point pivot{0.0, 0.0, 0.0};
};

Point apply_rigid(const RigidTransform& t, const Point& p);
/// Connectivity and labels unchanged; 2D meshes require the z axis.
mesh::SimplicialMesh apply_rigid(const mesh::SimplicialMesh& mesh, const RigidTransform& t);
RigidTransform inverse(const RigidTransform& t);

/// Heart and torso joined along a conforming interface.
struct MergedMesh {
  mesh::SimplicialMesh mesh;  ///< heart vertices first, same numbering; cell regions 1 (heart) and 2 (torso)
  int heart_vertices = 0;
  int heart_cells = 0;
  std::vector<int> torso_to_merged;
};

/// Throws InvariantError when some torso interface vertex has no coincident heart vertex.
MergedMesh merge_conforming(const mesh::SimplicialMesh& heart, const mesh::SimplicialMesh& torso, double tol = 1e-10);

/// Mean edge length over all cells.
double mean_edge_length(const mesh::SimplicialMesh& mesh);

}  // namespace cardio::geometry
