#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rgo/matrix.hpp"
#include "rgo/rng.hpp"

using namespace rgo;

namespace {

Matrix random_matrix(DetRng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (auto& e : m.data()) e = rng.next_uniform(-1.0, 1.0);
  return m;
}

Matrix random_spd(DetRng& rng, std::size_t n) {
  const Matrix b = random_matrix(rng, n, n);
  Matrix a = matmul(b, transpose(b));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
  return a;
}

}  // namespace

TEST_CASE("mat_vec identity") {
  const Vector y = mat_vec(Matrix::identity(2), {3.0, 4.0});
  CHECK(y == Vector{3.0, 4.0});
}

TEST_CASE("mat_vec small case") {
  Matrix a(2, 2);
  a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
  CHECK(mat_vec(a, {1.0, 1.0}) == Vector{3.0, 7.0});
}

TEST_CASE("mat_vec matches double-loop oracle exactly") {
  DetRng rng(1);
  const Matrix a = random_matrix(rng, 5, 5);
  Vector x(5);
  for (auto& e : x) e = rng.next_uniform(-1.0, 1.0);
  CHECK(mat_vec(a, x) == test_oracles::naive_mat_vec(a.data(), 5, 5, x));
}

TEST_CASE("mat_vec rejects mismatched shapes") {
  CHECK_THROWS_AS(mat_vec(Matrix(2, 3), Vector(2)), std::invalid_argument);
}

TEST_CASE("mat_vec distributes over vector addition") {
  DetRng rng(2);
  const Matrix a = random_matrix(rng, 6, 4);
  Vector x(4), y(4), xy(4);
  for (std::size_t i = 0; i < 4; ++i) {
    x[i] = rng.next_uniform(-1.0, 1.0);
    y[i] = rng.next_uniform(-1.0, 1.0);
    xy[i] = x[i] + y[i];
  }
  const Vector lhs = mat_vec(a, xy);
  const Vector ax = mat_vec(a, x);
  const Vector ay = mat_vec(a, y);
  for (std::size_t i = 0; i < 6; ++i) CHECK(lhs[i] == doctest::Approx(ax[i] + ay[i]).epsilon(1e-12));
}

TEST_CASE("mat_tvec is transpose application") {
  DetRng rng(3);
  const Matrix a = random_matrix(rng, 4, 6);
  Vector x(4);
  for (auto& e : x) e = rng.next_uniform(-1.0, 1.0);
  const Vector expected = mat_vec(transpose(a), x);
  CHECK(max_abs_diff(mat_tvec(a, x), expected) < 1e-15);
}

TEST_CASE("outer unit vectors") {
  const Matrix m = outer({1.0, 0.0}, {0.0, 1.0});
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 0.0);
  CHECK(m(1, 1) == 0.0);
}

TEST_CASE("outer of scalars") {
  const Matrix m = outer({2.0}, {3.0});
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 1);
  CHECK(m(0, 0) == 6.0);
}

TEST_CASE("outer of nonzero vectors has rank one") {
  DetRng rng(4);
  for (int rep = 0; rep < 5; ++rep) {
    Vector u(4), v(4);
    for (auto& e : u) e = rng.next_uniform(0.1, 1.0);
    for (auto& e : v) e = rng.next_uniform(0.1, 1.0);
    const Matrix m = outer(u, v);
    std::vector<std::vector<double>> rows(4, std::vector<double>(4));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) rows[i][j] = m(i, j);
    CHECK(test_oracles::matrix_rank(rows) == 1);
  }
}

TEST_CASE("trace of identity and diagonal") {
  CHECK(trace(Matrix::identity(5)) == 5.0);
  Matrix d(2, 2);
  d(0, 0) = 0.5; d(1, 1) = 1.0;
  CHECK(trace(d) == 1.5);
}

TEST_CASE("trace is cyclic") {
  DetRng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix a = random_matrix(rng, 3, 3);
    const Matrix b = random_matrix(rng, 3, 3);
    CHECK(trace(matmul(a, b)) == doctest::Approx(trace(matmul(b, a))).epsilon(1e-12));
  }
}

TEST_CASE("trace rejects non-square") {
  CHECK_THROWS_AS(trace(Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("invert identity and diagonal") {
  CHECK(max_abs_diff(invert(Matrix::identity(3)), Matrix::identity(3)) == 0.0);
  Matrix d(2, 2);
  d(0, 0) = 2.0; d(1, 1) = 4.0;
  const Matrix inv = invert(d);
  CHECK(inv(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(inv(1, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(inv(0, 1) == 0.0);
}

TEST_CASE("invert residual on random SPD") {
  DetRng rng(6);
  const Matrix a = random_spd(rng, 6);
  CHECK(max_abs_diff(matmul(a, invert(a)), Matrix::identity(6)) < 1e-9);
}

TEST_CASE("invert twice returns the input") {
  DetRng rng(7);
  const Matrix a = random_spd(rng, 5);
  CHECK(max_abs_diff(invert(invert(a)), a) < 1e-8);
}

TEST_CASE("invert flags singular input") {
  Matrix ones(3, 3, 1.0);
  CHECK_THROWS_AS(invert(ones), SingularMatrixError);
}

TEST_CASE("max_eigenvalue on diagonal and identity") {
  Matrix d(2, 2);
  d(0, 0) = 3.0; d(1, 1) = 1.0;
  CHECK(max_eigenvalue(d) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(max_eigenvalue(Matrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("max_eigenvalue of zero matrix is zero") {
  CHECK(max_eigenvalue(Matrix(3, 3)) == 0.0);
}

TEST_CASE("max_eigenvalue matches characteristic-polynomial oracle") {
  DetRng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_spd(rng, 3);
    std::vector<std::vector<double>> rows(3, std::vector<double>(3));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) rows[i][j] = a(i, j);
    const double expected = test_oracles::sym3_max_eigenvalue(rows);
    const double got = max_eigenvalue(a, 20000, 1e-15);
    CHECK(std::abs(got - expected) / expected < 1e-6);
  }
}

TEST_CASE("max_eigenvalue dominates Rayleigh quotients") {
  DetRng rng(9);
  const Matrix a = random_spd(rng, 6);
  const double lambda = max_eigenvalue(a, 20000, 1e-15);
  for (int rep = 0; rep < 100; ++rep) {
    Vector x(6);
    for (auto& e : x) e = rng.next_uniform(-1.0, 1.0);
    CHECK(lambda >= dot(x, mat_vec(a, x)) / dot(x, x) - 1e-8);
  }
}
