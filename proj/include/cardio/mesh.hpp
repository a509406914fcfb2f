#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cardio/common.hpp"

namespace cardio::mesh {

/// Integer surface labels used in mesh files.
enum SurfaceLabel : int {
  kGamma = 1,     ///< heart-torso interface
  kSigmaExt = 2,  ///< exterior torso surface
};

/// Vertex indices of a simplex; only the first dim+1 (cells) or dim (facets) are used.
using Simplex = std::array<int, 4>;
using Facet = std::array<int, 3>;

/// Minimum accepted cell measure (mm^d).
inline constexpr double kDegenerateMeasure = 1e-14;

/**
 * Unstructured simplicial mesh (triangles in 2D, tetrahedra in 3D).
 *
 * The constructor orients every cell to positive signed measure and checks
 * the invariants: indices in range, no degenerate cell, every boundary facet
 * is a face of exactly one cell. The object is immutable afterwards.
 */
class SimplicialMesh {
 public:
  SimplicialMesh() = default;
  SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<Simplex> cells,
                 std::vector<int> cell_region, std::vector<Facet> facets, std::vector<int> facet_label);

  int dim() const { return dim_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_facets() const { return facets_.size(); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Simplex>& cells() const { return cells_; }
  const std::vector<int>& cell_region() const { return cell_region_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<int>& facet_label() const { return facet_label_; }

  const Point& vertex(int i) const { return vertices_[i]; }
  const Simplex& cell(int c) const { return cells_[c]; }

  /// Signed measure (area/volume) of cell c; positive after construction.
  double cell_measure(int c) const;
  Point cell_centroid(int c) const;

  /// Sorted unique vertex indices touched by facets carrying `label`.
  std::vector<int> labeled_vertices(int label) const;
  bool has_label(int label) const;

 private:
  int dim_ = 2;
  std::vector<Point> vertices_;
  std::vector<Simplex> cells_;
  std::vector<int> cell_region_;
  std::vector<Facet> facets_;
  std::vector<int> facet_label_;
};

/// Signed measure of the simplex spanned by `pts` (dim+1 points).
double simplex_measure(int dim, std::span<const Point> pts);

/// Facets (sorted vertex tuples) that belong to exactly one cell, in first-seen order.
std::vector<Facet> find_boundary_facets(int dim, std::span<const Simplex> cells);

SimplicialMesh parse_mesh(std::istream& in);
void write_mesh(std::ostream& out, const SimplicialMesh& mesh);
SimplicialMesh load_mesh(const std::string& path);
/// Writes atomically (temporary file then rename).
void save_mesh(const SimplicialMesh& mesh, const std::string& path);

/// Closest point of a facet to a query, expressed on the facet.
struct SurfaceLocation {
  int facet = -1;
  std::array<double, 3> weights{0.0, 0.0, 0.0};  ///< barycentric, first dim entries used
  double distance = 0.0;
};

/**
 * A labeled part of a mesh boundary with outward normals and a spatial index.
 *
 * Facet vertex ids refer to the parent mesh. Coordinates are copied so the
 * patch does not depend on the parent's lifetime.
 */
class SurfacePatch {
 public:
  SurfacePatch() = default;
  SurfacePatch(int dim, int label, std::vector<Facet> facets, std::vector<Point> normals,
               std::vector<double> measures, std::vector<Point> coords);

  int dim() const { return dim_; }
  int label() const { return label_; }
  std::size_t size() const { return facets_.size(); }
  bool empty() const { return facets_.empty(); }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<Point>& normals() const { return normals_; }
  const std::vector<double>& measures() const { return measures_; }
  double total_measure() const { return total_; }

  /// Coordinates of local vertex k (0..dim-1) of facet f.
  const Point& facet_point(int f, int k) const { return coords_[f * 3 + k]; }

  /// Sorted unique parent-mesh vertices of the patch.
  const std::vector<int>& vertices() const { return vertices_; }
  /// Lumped surface-mass weight for each entry of vertices().
  const std::vector<double>& lumped_weights() const { return lumped_; }

  /// Nearest facet by clamped projection; ties go to the lowest facet index.
  SurfaceLocation locate(const Point& p) const;
  /// Same contract as locate(), by exhaustive search.
  SurfaceLocation locate_brute_force(const Point& p) const;

 private:
  void build_grid();
  void visit(const Point& p, int f, SurfaceLocation& best) const;

  int dim_ = 2;
  int label_ = 0;
  std::vector<Facet> facets_;
  std::vector<Point> normals_;
  std::vector<double> measures_;
  std::vector<Point> coords_;
  std::vector<int> vertices_;
  std::vector<double> lumped_;
  double total_ = 0.0;

  // uniform grid over facet bounding boxes
  Point grid_lo_{};
  Point cell_size_{1.0, 1.0, 1.0};
  std::array<int, 3> grid_n_{1, 1, 1};
  std::vector<int> grid_start_;
  std::vector<int> grid_items_;
};

/// Boundary facets carrying `label`, with normals pointing out of the mesh.
SurfacePatch extract_boundary(const SimplicialMesh& mesh, int label);

/// Clamped closest point of `p` on a facet given by its dim vertices.
SurfaceLocation closest_point_on_facet(int dim, std::span<const Point> facet, const Point& p);

inline SurfaceLocation locate_on_surface(const SurfacePatch& patch, const Point& p) { return patch.locate(p); }

}  // namespace cardio::mesh
