#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace psl {

// Minimal row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }
  std::span<double> row_span(std::size_t i) { return {row(i), cols}; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool operator==(const Matrix&) const = default;
};

inline double row_dot(const Matrix& m, std::size_t i, std::size_t j) {
  const double* a = m.row(i);
  const double* b = m.row(j);
  double s = 0.0;
  for (std::size_t k = 0; k < m.cols; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace psl
