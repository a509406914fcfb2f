#pragma once

#include <array>
#include <span>
#include <vector>

#include "cardio/mesh.hpp"
#include "cardio/sparse.hpp"

namespace cardio::fem {

/// Symmetric 3x3 tensor stored row-major; in 2D only the upper-left 2x2 block is used.
using Tensor = std::array<double, 9>;

Tensor scaled_identity(int dim, double s);

/// Per-cell orthonormal fiber (f), sheet (s) and sheet-normal (n) directions.
struct FiberFrame {
  int dim = 2;
  std::vector<std::array<Point, 3>> frames;  ///< (f, s, n); n unused in 2D
};

/// Circumferential fibers around `center` (axis z), radial sheets, out-of-plane normals.
FiberFrame circumferential_fibers(const mesh::SimplicialMesh& mesh, const Point& center);
/// The same frame (f, s, n) on every cell.
FiberFrame uniform_fibers(const mesh::SimplicialMesh& mesh, const std::array<Point, 3>& frame);
/// Throws InvariantError when some frame is not orthonormal within `tol`.
void check_orthonormal(const FiberFrame& frame, double tol = 1e-10);

/// Directional conductivities (longitudinal, transverse, normal).
struct DirectionalSigma {
  double longitudinal = 1.0;
  double transverse = 1.0;
  double normal = 1.0;
};

/// Per-cell symmetric positive definite conduction tensors.
struct ConductivityField {
  int dim = 2;
  std::vector<Tensor> tensors;

  static ConductivityField isotropic(int dim, std::size_t cells, double sigma);
};

/// sigma_l f f^T + sigma_t s s^T (+ sigma_n n n^T in 3D).
Tensor build_conduction_tensor(int dim, const std::array<Point, 3>& frame, const DirectionalSigma& sigma);
ConductivityField build_conductivity(const FiberFrame& frames, const DirectionalSigma& sigma);

/// D_e D_i (D_e + D_i)^{-1}; the tensors must commute (shared eigenbasis).
Tensor harmonic_tensor(int dim, const Tensor& Di, const Tensor& De);
ConductivityField harmonic_field(const ConductivityField& Di, const ConductivityField& De);
ConductivityField sum_field(const ConductivityField& a, const ConductivityField& b);

/// Gradients of the P1 basis functions on cell c (rows 0..dim).
std::array<Point, 4> p1_gradients(const mesh::SimplicialMesh& mesh, int c);

/// Element matrices, exposed for testing; size (dim+1)^2 row-major.
std::vector<double> element_mass(const mesh::SimplicialMesh& mesh, int c, double coeff);
std::vector<double> element_stiffness(const mesh::SimplicialMesh& mesh, int c, const Tensor& D);

/// Consistent P1 mass matrix times coeff.
sparse::CsrMatrix assemble_mass(const mesh::SimplicialMesh& mesh, double coeff);
/// P1 stiffness with per-cell tensors.
sparse::CsrMatrix assemble_stiffness(const mesh::SimplicialMesh& mesh, const ConductivityField& field);

/// Scatter into a larger system at the given row/column offsets (block assembly).
void add_mass(sparse::TripletBuilder& out, const mesh::SimplicialMesh& mesh, double coeff, int row_offset,
              int col_offset);
void add_stiffness(sparse::TripletBuilder& out, const mesh::SimplicialMesh& mesh, const ConductivityField& field,
                   int row_offset, int col_offset);

/// Row sums of the consistent mass matrix.
std::vector<double> lumped_mass(const mesh::SimplicialMesh& mesh);

/// P1 load vector of a cell-constant source (one-point quadrature).
std::vector<double> assemble_load(const mesh::SimplicialMesh& mesh, std::span<const double> cell_source);
/// Nodal source, evaluated at cell centroids.
std::vector<double> assemble_load_nodal(const mesh::SimplicialMesh& mesh, std::span<const double> nodal_source);

struct DirichletResult {
  sparse::CsrMatrix A;
  std::vector<double> b;
};

/**
 * Symmetric elimination of prescribed nodal values.
 *
 * Constrained rows and columns are zeroed with a unit diagonal and the right
 * hand side is compensated, so solving reproduces the prescribed values.
 * Duplicate nodes must carry identical values.
 */
DirichletResult apply_dirichlet(const sparse::CsrMatrix& A, std::span<const double> b, std::span<const int> nodes,
                                std::span<const double> values);

/**
 * Dirichlet elimination for repeated solves with a fixed node set.
 *
 * The reduced matrix is built once; rhs() forms the compensated right-hand
 * side for new boundary values.
 */
class DirichletSystem {
 public:
  DirichletSystem(const sparse::CsrMatrix& A, std::vector<int> nodes);

  const sparse::CsrMatrix& matrix() const { return reduced_; }
  const std::vector<int>& nodes() const { return nodes_; }
  /// b - A_{:,D} g on free rows, g on constrained rows.
  std::vector<double> rhs(std::span<const double> b, std::span<const double> values) const;

 private:
  sparse::CsrMatrix reduced_;
  sparse::CsrMatrix coupling_;  // original columns of constrained nodes, free rows only
  std::vector<int> nodes_;
  std::vector<char> constrained_;
};

}  // namespace cardio::fem
