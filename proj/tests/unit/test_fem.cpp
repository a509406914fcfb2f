#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "cardio/coupling.hpp"
#include "cardio/fem.hpp"
#include "cardio/geometry.hpp"

using namespace cardio;
using namespace cardio::fem;

namespace {

mesh::SimplicialMesh unit_triangle() {
  return mesh::SimplicialMesh(2, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2, 0}}, {1}, {}, {});
}

mesh::SimplicialMesh unit_tet() {
  return mesh::SimplicialMesh(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}}, {1}, {}, {});
}

void check_matrix(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) <= tol);
}

double trace_sum(const sparse::CsrMatrix& A) {
  double s = 0.0;
  for (double v : A.values()) s += v;
  return s;
}

std::array<Point, 3> rotated_frame(double deg) {
  const double a = deg * M_PI / 180.0;
  return {Point{std::cos(a), std::sin(a), 0}, Point{-std::sin(a), std::cos(a), 0}, Point{0, 0, 1}};
}

}  // namespace

TEST_CASE("unit triangle element matrices") {
  const auto m = unit_triangle();
  check_matrix(element_mass(m, 0, 1.0), {2.0 / 24, 1.0 / 24, 1.0 / 24, 1.0 / 24, 2.0 / 24, 1.0 / 24, 1.0 / 24,
                                         1.0 / 24, 2.0 / 24},
               1e-12);
  check_matrix(element_stiffness(m, 0, scaled_identity(2, 1.0)), {1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5},
               1e-12);
}

TEST_CASE("unit tetrahedron element matrices") {
  const auto m = unit_tet();
  std::vector<double> mass(16), stiff(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      mass[i * 4 + j] = (i == j ? 2.0 : 1.0) / 120.0;
      stiff[i * 4 + j] = (i == 0 && j == 0) ? 0.5 : (i == 0 || j == 0) ? -1.0 / 6.0 : (i == j ? 1.0 / 6.0 : 0.0);
    }
  check_matrix(element_mass(m, 0, 1.0), mass, 1e-12);
  check_matrix(element_stiffness(m, 0, scaled_identity(3, 1.0)), stiff, 1e-12);
}

TEST_CASE("mass matrix sums to the domain measure") {
  const auto sq = geometry::rectangle_mesh(0, 2, 0, 3, 7, 5, mesh::kGamma);
  CHECK(trace_sum(assemble_mass(sq, 1.0)) == doctest::Approx(6.0).epsilon(1e-13));
  CHECK(trace_sum(assemble_mass(sq, 2.5)) == doctest::Approx(15.0).epsilon(1e-13));
  const auto zero = assemble_mass(sq, 0.0);
  for (double v : zero.values()) CHECK(v == 0.0);
  double lumped = 0.0;
  for (double w : lumped_mass(sq)) lumped += w;
  CHECK(lumped == doctest::Approx(6.0).epsilon(1e-13));
}

TEST_CASE("stiffness annihilates constants and is symmetric PSD") {
  const auto sq = geometry::rectangle_mesh(0, 1, 0, 1, 9, 9, mesh::kGamma);
  const auto frames = uniform_fibers(sq, rotated_frame(30.0));
  const auto K = assemble_stiffness(sq, build_conductivity(frames, {3.0, 0.5, 0.5}));
  CHECK(K.asymmetry() == 0.0);
  const std::vector<double> ones(sq.num_vertices(), 1.0);
  const auto k1 = K * ones;
  double kmax = 0.0;
  for (double v : K.values()) kmax = std::max(kmax, std::abs(v));
  for (double v : k1) CHECK(std::abs(v) <= 1e-12 * kmax);
  REQUIRE(sq.num_vertices() <= 200);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(testing::dense(K));
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("stiffness applied to u = x gives boundary flux only") {
  const auto sq = geometry::rectangle_mesh(0, 1, 0, 1, 6, 6, mesh::kGamma);
  const auto K = assemble_stiffness(sq, ConductivityField::isotropic(2, sq.num_cells(), 1.0));
  std::vector<double> u(sq.num_vertices());
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = sq.vertex(v)[0];
  const auto Ku = K * u;
  // flux oracle: integral of n_x phi_i over the boundary
  std::vector<double> flux(u.size(), 0.0);
  const auto patch = mesh::extract_boundary(sq, mesh::kGamma);
  for (std::size_t f = 0; f < patch.size(); ++f)
    for (int k = 0; k < 2; ++k) flux[patch.facets()[f][k]] += 0.5 * patch.measures()[f] * patch.normals()[f][0];
  for (std::size_t v = 0; v < u.size(); ++v) CHECK(Ku[v] == doctest::Approx(flux[v]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("conduction tensors from fiber frames") {
  const std::array<Point, 3> canonical{Point{1, 0, 0}, Point{0, 1, 0}, Point{0, 0, 1}};
  const auto d = build_conduction_tensor(3, canonical, {3, 2, 1});
  const Tensor diag{3, 0, 0, 0, 2, 0, 0, 0, 1};
  for (int k = 0; k < 9; ++k) CHECK(d[k] == diag[k]);

  const auto iso = build_conduction_tensor(3, rotated_frame(17.0), {0.7, 0.7, 0.7});
  const auto want = scaled_identity(3, 0.7);
  for (int k = 0; k < 9; ++k) CHECK(std::abs(iso[k] - want[k]) <= 1e-12);

  const auto frame = rotated_frame(30.0);
  const auto t = build_conduction_tensor(2, frame, {3, 1, 1});
  Eigen::Matrix2d D;
  D << t[0], t[1], t[3], t[4];
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(D);
  CHECK(eig.eigenvalues()(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(3.0).epsilon(1e-10));
  const Eigen::Vector2d v = eig.eigenvectors().col(1);
  CHECK(std::abs(std::abs(v(0) * frame[0][0] + v(1) * frame[0][1]) - 1.0) <= 1e-10);

  const std::array<Point, 3> skewed{Point{1, 0, 0}, Point{0.1, 1, 0}, Point{0, 0, 1}};
  CHECK_THROWS_AS(build_conduction_tensor(2, skewed, {1, 1, 1}), InvariantError);
}

TEST_CASE("harmonic tensor") {
  const auto frame = rotated_frame(40.0);
  auto coeff = [](const Tensor& t, const Point& e) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += e[i] * t[i * 3 + j] * e[j];
    return s;
  };
  const auto m1 = harmonic_tensor(2, scaled_identity(2, 2.0), scaled_identity(2, 2.0));
  CHECK(m1[0] == doctest::Approx(1.0));
  CHECK(m1[4] == doctest::Approx(1.0));

  const auto di = build_conduction_tensor(2, frame, {1.0, 0.2, 1.0});
  const auto de = build_conduction_tensor(2, frame, {3.0, 0.6, 1.0});
  const auto dm = harmonic_tensor(2, di, de);
  CHECK(coeff(dm, frame[0]) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(coeff(dm, frame[1]) == doctest::Approx(0.15).epsilon(1e-12));

  const double lambda = 2.5;
  const auto de2 = build_conduction_tensor(2, frame, {lambda * 1.0, lambda * 0.2, 1.0});
  const auto dm2 = harmonic_tensor(2, di, de2);
  for (int k : {0, 1, 3, 4}) CHECK(dm2[k] == doctest::Approx(lambda / (1 + lambda) * di[k]).epsilon(1e-12));

  const auto other = build_conduction_tensor(2, rotated_frame(0.0), {3.0, 0.6, 1.0});
  CHECK_THROWS_AS(harmonic_tensor(2, di, other), InvariantError);
}

TEST_CASE("load vectors") {
  const auto sq = geometry::rectangle_mesh(0, 1, 0, 1, 4, 4, mesh::kGamma);
  const std::vector<double> one(sq.num_cells(), 1.0), zero(sq.num_cells(), 0.0);
  double s = 0.0;
  for (double v : assemble_load(sq, one)) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  for (double v : assemble_load(sq, zero)) CHECK(v == 0.0);
  std::vector<double> indicator(sq.num_cells(), 0.0);
  indicator[5] = 3.0;
  s = 0.0;
  for (double v : assemble_load(sq, indicator)) s += v;
  CHECK(s == doctest::Approx(3.0 * sq.cell_measure(5)).epsilon(1e-14));
  CHECK_THROWS_AS(assemble_load(sq, std::vector<double>(3, 1.0)), InvariantError);
}

TEST_CASE("Dirichlet elimination") {
  sparse::TripletBuilder b(3);
  // 1D Laplacian on three nodes
  const double L[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (L[i][j] != 0.0) b.add(i, j, L[i][j]);
  const auto A = b.finalize();
  const std::vector<double> rhs(3, 0.0);
  const std::vector<int> ends{0, 2};
  const auto sys = apply_dirichlet(A, rhs, ends, std::vector<double>{0.0, 1.0});
  CHECK(sys.A.asymmetry() == 0.0);
  const auto x = sparse::cg_solve(sys.A, sys.b, {1e-14, 10, sparse::Preconditioner::Jacobi}).x;
  CHECK(x[0] == 0.0);
  CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(x[2] == 1.0);

  const std::vector<int> all{0, 1, 2};
  const std::vector<double> vals{4.0, -1.0, 2.0};
  const auto full = apply_dirichlet(A, rhs, all, vals);
  const auto y = sparse::cg_solve(full.A, full.b, {}).x;
  CHECK(y == vals);

  const auto none = apply_dirichlet(A, std::vector<double>{1, 2, 3}, {}, {});
  CHECK(none.A.values() == A.values());
  CHECK(none.b == std::vector<double>{1, 2, 3});

  const std::vector<int> dup{1, 1};
  CHECK_THROWS_AS(apply_dirichlet(A, rhs, dup, std::vector<double>{1.0, 2.0}), InvariantError);
  CHECK_NOTHROW(apply_dirichlet(A, rhs, dup, std::vector<double>{1.0, 1.0}));
}

TEST_CASE("DirichletSystem matches one-off elimination") {
  const auto sq = geometry::rectangle_mesh(0, 1, 0, 1, 5, 5, mesh::kGamma);
  const auto K = assemble_stiffness(sq, ConductivityField::isotropic(2, sq.num_cells(), 1.0));
  auto nodes = sq.labeled_vertices(mesh::kGamma);
  std::vector<double> g(nodes.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = std::sin(static_cast<double>(k));
  const std::vector<double> zero(sq.num_vertices(), 0.0);
  const auto once = apply_dirichlet(K, zero, nodes, g);
  const DirichletSystem sys(K, nodes);
  CHECK((testing::dense(sys.matrix()) - testing::dense(once.A)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(testing::max_abs_diff(sys.rhs(zero, g), once.b) <= 1e-15);
}

TEST_CASE("affine solutions are reproduced exactly") {
  geometry::IdealGeometrySpec spec;
  spec.h_torso_gamma = 6.0;
  spec.h_torso_sigma = 20.0;
  spec.conforming = false;
  const auto torso = geometry::generate_pair(spec).torso;
  // all boundary nodes constrained; affine data
  auto nodes = torso.labeled_vertices(mesh::kGamma);
  const auto ext = torso.labeled_vertices(mesh::kSigmaExt);
  nodes.insert(nodes.end(), ext.begin(), ext.end());
  auto affine = [](const Point& p) { return 0.3 * p[0] - 0.7 * p[1] + 2.0; };
  std::vector<double> g;
  for (int v : nodes) g.push_back(affine(torso.vertex(v)));
  const auto K = assemble_stiffness(torso, ConductivityField::isotropic(2, torso.num_cells(), 0.2));
  const auto sys = apply_dirichlet(K, std::vector<double>(torso.num_vertices(), 0.0), nodes, g);
  const auto u = sparse::cg_solve(sys.A, sys.b, {1e-14, 20000, sparse::Preconditioner::Jacobi}).x;
  for (std::size_t v = 0; v < u.size(); ++v) CHECK(std::abs(u[v] - affine(torso.vertex(v))) <= 1e-10 * 400);
}
