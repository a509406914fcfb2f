#include <algorithm>
#include <cmath>
#include <numeric>

#include "cardio/parallel.hpp"
#include "cardio/sparse.hpp"

namespace cardio::sparse {

CsrMatrix::CsrMatrix(int n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  if (static_cast<int>(row_ptr_.size()) != n_ + 1) throw InvariantError("row_ptr must have n+1 entries");
  if (cols_.size() != values_.size() || row_ptr_.back() != static_cast<int>(cols_.size()))
    throw InvariantError("inconsistent CSR arrays");
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] < 0 || cols_[k] >= n_) throw InvariantError("column index out of range in row " + std::to_string(i));
      if (k > row_ptr_[i] && cols_[k] <= cols_[k - 1])
        throw InvariantError("columns not sorted/unique in row " + std::to_string(i));
    }
}

CsrMatrix CsrMatrix::identity(int n) {
  std::vector<int> rp(n + 1), c(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(c.begin(), c.end(), 0);
  CsrMatrix m(n, std::move(rp), std::move(c), std::vector<double>(n, 1.0));
  m.symmetric_ = true;
  return m;
}

double CsrMatrix::at(int i, int j) const {
  const auto b = cols_.begin() + row_ptr_[i], e = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  return (it != e && *it == j) ? values_[it - cols_.begin()] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (int i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  parallel_for(static_cast<std::size_t>(n_), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double s = 0.0;
      for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
      y[i] = s;
    }
  });
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double CsrMatrix::asymmetry() const {
  double mx = 0.0, diff = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      mx = std::max(mx, std::abs(values_[k]));
      diff = std::max(diff, std::abs(values_[k] - at(cols_[k], i)));
    }
  return mx > 0.0 ? diff / mx : 0.0;
}

void CsrMatrix::add_scaled(double s, const CsrMatrix& other) {
  if (other.row_ptr_ != row_ptr_ || other.cols_ != cols_) throw InvariantError("add_scaled needs identical sparsity");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  symmetric_ = symmetric_ && other.symmetric_;
}

CsrMatrix TripletBuilder::finalize() const {
  std::vector<int> count(n_ + 1, 0);
  for (const auto& e : entries_) {
    if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= n_) throw InvariantError("triplet index out of range");
    ++count[e.i + 1];
  }
  for (int i = 0; i < n_; ++i) count[i + 1] += count[i];
  std::vector<int> order(entries_.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (std::size_t k = 0; k < entries_.size(); ++k) order[fill[entries_[k].i]++] = static_cast<int>(k);

  std::vector<int> row_ptr(n_ + 1, 0), cols;
  std::vector<double> vals;
  cols.reserve(entries_.size());
  vals.reserve(entries_.size());
  for (int i = 0; i < n_; ++i) {
    // stable sort keeps summation in insertion order for equal columns
    std::stable_sort(order.begin() + count[i], order.begin() + count[i + 1],
                     [&](int a, int b) { return entries_[a].j < entries_[b].j; });
    for (int k = count[i]; k < count[i + 1]; ++k) {
      const auto& e = entries_[order[k]];
      if (static_cast<int>(cols.size()) > row_ptr[i] && cols.back() == e.j)
        vals.back() += e.v;
      else {
        cols.push_back(e.j);
        vals.push_back(e.v);
      }
    }
    row_ptr[i + 1] = static_cast<int>(cols.size());
  }
  return CsrMatrix(n_, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix linear_combination(double a, const CsrMatrix& A, double b, const CsrMatrix& B) {
  if (A.size() != B.size()) throw InvariantError("linear_combination size mismatch");
  const int n = A.size();
  std::vector<int> rp(n + 1, 0), cols;
  std::vector<double> vals;
  for (int i = 0; i < n; ++i) {
    int ka = A.row_ptr()[i], kb = B.row_ptr()[i];
    const int ea = A.row_ptr()[i + 1], eb = B.row_ptr()[i + 1];
    while (ka < ea || kb < eb) {
      const int ca = ka < ea ? A.cols()[ka] : n;
      const int cb = kb < eb ? B.cols()[kb] : n;
      if (ca < cb) {
        cols.push_back(ca);
        vals.push_back(a * A.values()[ka++]);
      } else if (cb < ca) {
        cols.push_back(cb);
        vals.push_back(b * B.values()[kb++]);
      } else {
        cols.push_back(ca);
        vals.push_back(a * A.values()[ka++] + b * B.values()[kb++]);
      }
    }
    rp[i + 1] = static_cast<int>(cols.size());
  }
  CsrMatrix m(n, std::move(rp), std::move(cols), std::move(vals));
  m.set_symmetric(A.symmetric() && B.symmetric());
  return m;
}

}  // namespace cardio::sparse
