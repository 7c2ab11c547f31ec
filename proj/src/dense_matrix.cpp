#include "leccr/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "leccr/errors.hpp"

namespace leccr {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw shape_error("matrix data length does not match rows*cols");
}

DenseMatrix DenseMatrix::filled(std::size_t rows, std::size_t cols, double v) {
  DenseMatrix m(rows, cols);
  m.fill(v);
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data_) v = rng.normal(0.0, stddev);
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

}  // namespace leccr
