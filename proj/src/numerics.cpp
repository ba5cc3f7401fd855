#include "bandsel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "bandsel/error.hpp"

namespace bandsel::numerics {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), values_(std::move(row_major)) {
  if (values_.size() != rows_ * cols_) {
    throw InvalidArgument("matrix value count does not match its shape");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("matrix entries must be finite");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw InvalidArgument("ragged matrix rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return DenseMatrix(rows.size(), cols, std::move(values));
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::frobenius_norm() const { return norm2(values_); }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("multiply: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InvalidArgument("multiply: vector length differs");
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct LeastSquares::Impl {
  Eigen::MatrixXd a;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
};

LeastSquares::LeastSquares(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidArgument("least_squares: empty matrix");
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> am(a.values().data(), static_cast<Eigen::Index>(a.rows()),
                                static_cast<Eigen::Index>(a.cols()));
  impl_ = std::make_unique<Impl>();
  impl_->a = am;
  impl_->cod.compute(impl_->a);
}

LeastSquares::~LeastSquares() = default;
LeastSquares::LeastSquares(LeastSquares&&) noexcept = default;
LeastSquares& LeastSquares::operator=(LeastSquares&&) noexcept = default;

std::vector<double> LeastSquares::solve(std::span<const double> b) const {
  if (static_cast<Eigen::Index>(b.size()) != impl_->a.rows()) {
    throw InvalidArgument("least_squares: A has " + std::to_string(impl_->a.rows()) +
                          " rows but b has " + std::to_string(b.size()) + " entries");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw InvalidArgument("least_squares: b has a non-finite entry");
  }
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
  const Eigen::VectorXd x = impl_->cod.solve(bm);
  return std::vector<double>(x.data(), x.data() + x.size());
}

double LeastSquares::residual_norm(std::span<const double> b) const {
  const auto x = solve(b);
  Eigen::Map<const Eigen::VectorXd> bm(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(x.size()));
  return (bm - impl_->a * xm).norm();
}

std::size_t LeastSquares::rank() const { return static_cast<std::size_t>(impl_->cod.rank()); }

std::vector<double> least_squares(const DenseMatrix& a, std::span<const double> b) {
  return LeastSquares(a).solve(b);
}

std::vector<EigenPair> sym_eig(const DenseMatrix& s, std::size_t k) {
  const std::size_t n = s.rows();
  if (n == 0 || s.cols() != n) throw InvalidArgument("sym_eig: matrix must be square");
  if (k == 0 || k > n) throw InvalidArgument("sym_eig: k must be in [1, n]");

  double max_abs = 0.0;
  for (double v : s.values()) max_abs = std::max(max_abs, std::abs(v));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-10 * std::max(max_abs, 1e-300)) {
        throw InvalidArgument("sym_eig: matrix is not symmetric");
      }
    }

  DenseMatrix a = s;
  DenseMatrix v = DenseMatrix::identity(n);
  const double threshold = 1e-12 * s.frobenius_norm();

  auto off_norm = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - sn * arq;
          a(r, q) = sn * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - sn * aqr;
          a(q, r) = sn * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - sn * vrq;
          v(r, q) = sn * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  std::vector<EigenPair> out;
  out.reserve(k);
  for (std::size_t idx = 0; idx < k; ++idx) {
    const std::size_t col = order[idx];
    std::vector<double> vec(n);
    for (std::size_t r = 0; r < n; ++r) vec[r] = v(r, col);
    const double len = norm2(vec);
    std::size_t lead = 0;
    for (std::size_t r = 1; r < n; ++r) {
      if (std::abs(vec[r]) > std::abs(vec[lead])) lead = r;
    }
    const double sign = vec[lead] < 0 ? -1.0 : 1.0;
    for (double& x : vec) x *= sign / len;
    out.push_back({a(col, col), std::move(vec)});
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson: length mismatch");
  if (x.size() < 2) throw InvalidArgument("pearson: need at least 2 samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson: zero-variance input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace bandsel::numerics
