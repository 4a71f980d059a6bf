#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rgo {

using Vector = std::vector<double>;

class SingularMatrixError : public std::runtime_error {
 public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

// Dense row-major matrix of doubles. The substrate for projections,
// curvature estimates and the verification oracles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = A x
Vector mat_vec(const Matrix& a, const Vector& x);

// y = Aᵀ x  (reverse-mode propagation through a linear layer)
Vector mat_tvec(const Matrix& a, const Vector& x);

// M[i][j] = u[i] v[j]
Matrix outer(const Vector& u, const Vector& v);

// Sum of diagonal entries; throws on non-square input.
double trace(const Matrix& a);

// Gauss-Jordan elimination with partial pivoting. Pivot magnitude below
// 1e-12 throws SingularMatrixError.
Matrix invert(const Matrix& a);

// Dominant eigenvalue of a symmetric PSD matrix by power iteration from a
// fixed deterministic start vector. Stops when the relative Rayleigh-quotient
// change drops below tol or iters are exhausted. Zero matrix yields 0.
double max_eigenvalue(const Matrix& a, std::size_t iters = 2000, double tol = 1e-13);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

// (A + Aᵀ)/2
Matrix symmetrize(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);

bool all_finite(const Matrix& a);
bool all_finite(const Vector& v);

// Largest entrywise absolute difference; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);

}  // namespace rgo
