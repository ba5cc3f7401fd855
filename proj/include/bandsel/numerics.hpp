#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace bandsel::numerics {

// Row-major dense matrix with finite entries.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  DenseMatrix transpose() const;
  double frobenius_norm() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

// Minimum-norm minimizer of ||A x - b||_2, using a rank-revealing complete
// orthogonal factorization so collinear columns are handled.
std::vector<double> least_squares(const DenseMatrix& a, std::span<const double> b);

// Factors A once for repeated solves against different right-hand sides.
class LeastSquares {
 public:
  explicit LeastSquares(const DenseMatrix& a);
  ~LeastSquares();
  LeastSquares(LeastSquares&&) noexcept;
  LeastSquares& operator=(LeastSquares&&) noexcept;

  std::vector<double> solve(std::span<const double> b) const;
  // ||b - A x*|| for the minimizer x*.
  double residual_norm(std::span<const double> b) const;
  std::size_t rank() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct EigenPair {
  double value;
  std::vector<double> vector;  // unit norm, largest-magnitude entry positive
};

// The k largest eigenpairs of a symmetric matrix, descending by value.
// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// 1e-12 * ||S||_F.
std::vector<EigenPair> sym_eig(const DenseMatrix& s, std::size_t k);

// Pearson correlation. Throws DegenerateInput when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace bandsel::numerics
