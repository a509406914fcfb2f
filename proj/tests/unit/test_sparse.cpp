#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "cardio/sparse.hpp"

using namespace cardio;
using namespace cardio::sparse;

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = g(rng);
  return B * B.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

// 1D Laplacian of a chain, pure Neumann
CsrMatrix chain_laplacian(int n) {
  TripletBuilder b(n);
  for (int i = 0; i + 1 < n; ++i) {
    b.add(i, i, 1.0);
    b.add(i + 1, i + 1, 1.0);
    b.add(i, i + 1, -1.0);
    b.add(i + 1, i, -1.0);
  }
  return b.finalize();
}

}  // namespace

TEST_CASE("triplets are summed and columns sorted") {
  TripletBuilder b(3);
  b.add(0, 2, 1.0);
  b.add(0, 0, 2.0);
  b.add(0, 2, 3.0);
  b.add(2, 1, -1.0);
  const auto A = b.finalize();
  CHECK(A.nnz() == 3);
  CHECK(A.at(0, 2) == 4.0);
  CHECK(A.at(0, 0) == 2.0);
  CHECK(A.at(1, 1) == 0.0);
  CHECK(A.cols()[0] == 0);
  CHECK(A.cols()[1] == 2);
}

TEST_CASE("identity system converges in one iteration") {
  const auto r = cg_solve(CsrMatrix::identity(3), std::vector<double>{1, 2, 3}, {});
  CHECK(r.x == std::vector<double>{1, 2, 3});
  CHECK(r.iterations == 1);
}

TEST_CASE("2x2 system against its inverse") {
  Eigen::Matrix2d D;
  D << 4, 1, 1, 3;
  const auto A = testing::from_dense(D);
  for (auto pc : {Preconditioner::None, Preconditioner::Jacobi}) {
    const auto r = cg_solve(A, std::vector<double>{1, 2}, {1e-14, 100, pc});
    const Eigen::Vector2d x = D.inverse() * Eigen::Vector2d(1, 2);
    CHECK(r.x[0] == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
    CHECK(r.x[1] == doctest::Approx(7.0 / 11.0).epsilon(1e-12));
    CHECK(r.x[0] == doctest::Approx(x(0)).epsilon(1e-12));
  }
}

TEST_CASE("zero right-hand side gives zero without iterating") {
  const auto r = cg_solve(CsrMatrix::identity(4), std::vector<double>(4, 0.0), {});
  CHECK(r.iterations == 0);
  for (double v : r.x) CHECK(v == 0.0);
}

TEST_CASE("non-convergence raises with the residual") {
  std::mt19937 rng(5);
  const auto A = testing::from_dense(random_spd(30, rng));
  std::vector<double> b(30, 1.0);
  try {
    cg_solve(A, b, {1e-14, 2, Preconditioner::None});
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.residual() > 1e-14);
  }
}

TEST_CASE("CG matches dense LU on random SPD matrices") {
  std::mt19937 rng(42);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 49);
    const auto D = random_spd(n, rng);
    const auto A = testing::from_dense(D);
    std::vector<double> b(n);
    for (double& v : b) v = g(rng);
    const auto r = cg_solve(A, b, {1e-12, 1000, Preconditioner::Jacobi});
    const Eigen::VectorXd x = D.partialPivLu().solve(testing::vec(b));
    CHECK((testing::vec(r.x) - x).norm() <= 1e-6 * x.norm());
    CHECK((testing::vec(b) - D * testing::vec(r.x)).norm() <= 1e-12 * testing::vec(b).norm() * 1.0001);
  }
}

TEST_CASE("CG error decreases monotonically in the energy norm") {
  // Unpreconditioned CG minimizes the A-norm of the error over growing Krylov spaces.
  std::mt19937 rng(9);
  const int n = 40;
  const auto D = random_spd(n, rng);
  const auto A = testing::from_dense(D);
  std::vector<double> b(n, 1.0);
  const Eigen::VectorXd exact = D.ldlt().solve(testing::vec(b));
  // stopping at looser tolerances returns earlier iterates of the same sequence
  std::vector<std::pair<int, double>> by_iteration;
  for (int e = 1; e <= 12; ++e) {
    const auto r = cg_solve(A, b, {std::pow(10.0, -e), 1000, Preconditioner::None});
    const Eigen::VectorXd err = testing::vec(r.x) - exact;
    by_iteration.emplace_back(r.iterations, std::sqrt(err.dot(D * err)));
  }
  std::sort(by_iteration.begin(), by_iteration.end());
  for (std::size_t k = 1; k < by_iteration.size(); ++k)
    CHECK(by_iteration[k].second <= by_iteration[k - 1].second * (1.0 + 1e-12));
  CHECK(by_iteration.back().first > by_iteration.front().first);
  // residual history is recorded per iteration
  const auto r = cg_solve(A, b, {1e-10, 1000, Preconditioner::Jacobi}, {}, true);
  CHECK(static_cast<int>(r.residual_history.size()) >= r.iterations);
  CHECK(r.residual_history.back() <= 1e-10);
}

TEST_CASE("initial guess at the solution returns immediately") {
  Eigen::Matrix2d D;
  D << 4, 1, 1, 3;
  const auto A = testing::from_dense(D);
  const std::vector<double> x0{1.0 / 11.0, 7.0 / 11.0};
  const auto r = cg_solve(A, std::vector<double>{1, 2}, {1e-10, 100, Preconditioner::Jacobi}, x0);
  CHECK(r.iterations == 0);
}

TEST_CASE("two-node Laplacian with zero mean") {
  const auto A = chain_laplacian(2);
  const std::vector<double> w{1.0, 1.0};
  const auto r = cg_solve_zero_mean(A, std::vector<double>{1, -1}, w, {1e-12, 100, Preconditioner::Jacobi});
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("constant right-hand side is pure nullspace") {
  const auto A = chain_laplacian(6);
  const std::vector<double> w(6, 1.0);
  const auto r = cg_solve_zero_mean(A, std::vector<double>(6, 3.0), w, {});
  for (double v : r.x) CHECK(std::abs(v) <= 1e-14);
}

TEST_CASE("deflated solves have zero weighted mean and ignore constants in b") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const int n = 30;
  const auto A = chain_laplacian(n);
  std::vector<double> w(n), b(n);
  for (int i = 0; i < n; ++i) {
    w[i] = u(rng);
    b[i] = g(rng);
  }
  const SolverConfig cfg{1e-12, 2000, Preconditioner::Jacobi};
  const auto r = cg_solve_zero_mean(A, b, w, cfg);
  double mean = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    mean += w[i] * r.x[i];
    scale += w[i] * std::abs(r.x[i]);
  }
  CHECK(std::abs(mean) <= 1e-10 * scale);

  // A x equals the projection of b onto range(A) = constants-orthogonal
  double bmean = 0.0;
  for (double v : b) bmean += v / n;
  const auto Ax = A * r.x;
  for (int i = 0; i < n; ++i) CHECK(Ax[i] == doctest::Approx(b[i] - bmean).epsilon(1e-8).scale(1.0));

  auto shifted = b;
  for (double& v : shifted) v += 7.5;
  const auto r2 = cg_solve_zero_mean(A, shifted, w, cfg);
  CHECK(testing::max_abs_diff(r.x, r2.x) <= 1e-8);
}

TEST_CASE("linear combination and symmetry measure") {
  const auto A = chain_laplacian(4);
  const auto I = CsrMatrix::identity(4);
  const auto C = linear_combination(2.0, A, 3.0, I);
  CHECK(C.at(0, 0) == 5.0);
  CHECK(C.at(0, 1) == -2.0);
  CHECK(C.asymmetry() == 0.0);
  auto B = A;
  B.add_scaled(-1.0, A);
  for (double v : B.values()) CHECK(v == 0.0);
  TripletBuilder t(2);
  t.add(0, 1, 1.0);
  t.add(1, 0, 0.5);
  t.add(0, 0, 1.0);
  CHECK(t.finalize().asymmetry() == doctest::Approx(0.5));
}
