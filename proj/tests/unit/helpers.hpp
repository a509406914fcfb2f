#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cardio/sparse.hpp"

namespace testing {

inline Eigen::MatrixXd dense(const cardio::sparse::CsrMatrix& A) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(A.size(), A.size());
  for (int i = 0; i < A.size(); ++i)
    for (int k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) D(i, A.cols()[k]) = A.values()[k];
  return D;
}

inline cardio::sparse::CsrMatrix from_dense(const Eigen::MatrixXd& D) {
  cardio::sparse::TripletBuilder b(static_cast<int>(D.rows()));
  for (int i = 0; i < D.rows(); ++i)
    for (int j = 0; j < D.cols(); ++j)
      if (D(i, j) != 0.0) b.add(i, j, D(i, j));
  return b.finalize();
}

inline Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing
