#pragma once

#include <span>
#include <vector>

#include "cardio/common.hpp"

namespace cardio::sparse {

/// Square matrix in compressed sparse row form; column indices sorted and unique per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> values);

  static CsrMatrix identity(int n);

  int size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  /// Entry (i, j), zero when not stored.
  double at(int i, int j) const;
  std::vector<double> diagonal() const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  /// max |A_ij - A_ji| / max |A_ij|
  double asymmetry() const;
  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool flag) { symmetric_ = flag; }

  /// Same sparsity pattern: this += s * other.
  void add_scaled(double s, const CsrMatrix& other);

 private:
  int n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
  bool symmetric_ = false;
};

/// Coordinate-format accumulator; duplicate entries are summed on finalize().
class TripletBuilder {
 public:
  explicit TripletBuilder(int n) : n_(n) {}
  void add(int i, int j, double v) { entries_.push_back({i, j, v}); }
  void reserve(std::size_t k) { entries_.reserve(k); }
  int size() const { return n_; }
  CsrMatrix finalize() const;

 private:
  struct Entry {
    int i, j;
    double v;
  };
  int n_;
  std::vector<Entry> entries_;
};

/// A + B on the union of sparsity patterns, scaled: a*A + b*B.
CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B);

enum class Preconditioner { None, Jacobi };

struct SolverConfig {
  double tolerance = 1e-8;  ///< relative residual ||b - Ax|| / ||b||
  int max_iterations = 5000;
  Preconditioner preconditioner = Preconditioner::Jacobi;
};

struct SolveResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual
  std::vector<double> residual_history;  ///< relative residual per iteration (when requested)
};

/**
 * Preconditioned conjugate gradient for symmetric positive definite A.
 *
 * `x0` is an optional initial guess. Throws SolverError when the relative
 * residual is still above tolerance after max_iterations.
 */
SolveResult cg_solve(const CsrMatrix& A, std::span<const double> b, const SolverConfig& cfg,
                     std::span<const double> x0 = {}, bool keep_history = false);

/**
 * CG for a semidefinite A whose nullspace is spanned by `null_vector`.
 *
 * The nullspace component of b is removed by orthogonal projection
 * (the range of a symmetric A is orthogonal to its kernel). Iterates are kept
 * in {x : weights . x = 0} by projecting every preconditioned residual, so
 * the returned solution has zero weighted mean on the support of the null vector.
 */
SolveResult cg_solve_deflated(const CsrMatrix& A, std::span<const double> b, std::span<const double> null_vector,
                              std::span<const double> weights, const SolverConfig& cfg,
                              std::span<const double> x0 = {});

/// Pure-Neumann case: nullspace = constants.
SolveResult cg_solve_zero_mean(const CsrMatrix& A, std::span<const double> b, std::span<const double> weights,
                               const SolverConfig& cfg, std::span<const double> x0 = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace cardio::sparse
