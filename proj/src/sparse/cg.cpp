#include <cmath>
#include <optional>

#include "cardio/sparse.hpp"

namespace cardio::sparse {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

struct Deflation {
  std::span<const double> null_vector;
  std::span<const double> weights;
  double w_dot_null = 0.0;

  // x <- x - (w.x / w.z) z
  void project(std::vector<double>& x) const {
    const double c = dot(weights, x) / w_dot_null;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * null_vector[i];
  }
};

SolveResult pcg(const CsrMatrix& A, std::span<const double> b, const SolverConfig& cfg, std::span<const double> x0,
                bool keep_history, const std::optional<Deflation>& defl) {
  const int n = A.size();
  if (static_cast<int>(b.size()) != n) throw InvariantError("right-hand side size does not match matrix");
  if (cfg.tolerance <= 0.0) throw InvariantError("solver tolerance must be positive");
  SolveResult res;
  res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return res;
  if (!x0.empty()) {
    if (static_cast<int>(x0.size()) != n) throw InvariantError("initial guess size does not match matrix");
    res.x.assign(x0.begin(), x0.end());
    if (defl) defl->project(res.x);
  }

  std::vector<double> inv_diag(n, 1.0);
  if (cfg.preconditioner == Preconditioner::Jacobi) {
    const auto d = A.diagonal();
    for (int i = 0; i < n; ++i) inv_diag[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
  }
  auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    if (defl) defl->project(z);
  };

  std::vector<double> r(n), z(n), p(n), Ap(n);
  auto true_residual = [&] {
    A.multiply(res.x, Ap);
    for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    return norm2(r) / bnorm;
  };

  double rel = true_residual();
  res.residual = rel;
  if (rel <= cfg.tolerance) return res;
  precondition(r, z);
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    A.multiply(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      // direction lies in the kernel; restart from the true residual
      rel = true_residual();
      res.iterations = it;
      res.residual = rel;
      if (rel <= cfg.tolerance) return res;
      throw SolverError("CG breakdown (p.Ap <= 0)", it, rel);
    }
    const double alpha = rz / pAp;
    for (int i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    rel = norm2(r) / bnorm;
    res.iterations = it;
    if (keep_history) res.residual_history.push_back(rel);
    if (rel <= cfg.tolerance) {
      rel = true_residual();
      if (rel <= cfg.tolerance) {
        if (defl) defl->project(res.x);
        res.residual = rel;
        return res;
      }
      precondition(r, z);
      p = z;
      rz = dot(r, z);
      continue;
    }
    precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.residual = true_residual();
  throw SolverError("CG did not converge in " + std::to_string(cfg.max_iterations) +
                        " iterations (relative residual " + std::to_string(res.residual) + ")",
                    cfg.max_iterations, res.residual);
}

}  // namespace

SolveResult cg_solve(const CsrMatrix& A, std::span<const double> b, const SolverConfig& cfg,
                     std::span<const double> x0, bool keep_history) {
  return pcg(A, b, cfg, x0, keep_history, std::nullopt);
}

SolveResult cg_solve_deflated(const CsrMatrix& A, std::span<const double> b, std::span<const double> null_vector,
                              std::span<const double> weights, const SolverConfig& cfg,
                              std::span<const double> x0) {
  const int n = A.size();
  if (static_cast<int>(null_vector.size()) != n || static_cast<int>(weights.size()) != n)
    throw InvariantError("nullspace/weight vectors must match the matrix size");
  Deflation defl{null_vector, weights, dot(weights, null_vector)};
  if (!(defl.w_dot_null > 0.0)) throw InvariantError("weights must have positive overlap with the null vector");
  std::vector<double> bp(b.begin(), b.end());
  const double c = dot(null_vector, bp) / dot(null_vector, null_vector);
  for (int i = 0; i < n; ++i) bp[i] -= c * null_vector[i];
  auto res = pcg(A, bp, cfg, x0, false, defl);
  defl.project(res.x);
  return res;
}

SolveResult cg_solve_zero_mean(const CsrMatrix& A, std::span<const double> b, std::span<const double> weights,
                               const SolverConfig& cfg, std::span<const double> x0) {
  const std::vector<double> ones(A.size(), 1.0);
  return cg_solve_deflated(A, b, ones, weights, cfg, x0);
}

}  // namespace cardio::sparse
