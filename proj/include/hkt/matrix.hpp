#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hkt/rational.hpp"

namespace hkt {

/// Dense row-major matrix over an exact field.
template <ExactField C>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, C(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = C(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  C& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const C& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& c : data_) {
      if (!hkt::is_zero(c)) return false;
    }
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const C& s) {
    for (auto& c : data_) c *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= C(-1); }
  friend Matrix operator*(Matrix a, const C& s) { return a *= s; }
  friend Matrix operator*(const C& s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix: product shape mismatch");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const C& aik = a(i, k);
        if (hkt::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          if (!hkt::is_zero(b(k, j))) r(i, j) += aik * b(k, j);
        }
      }
    }
    return r;
  }

  std::vector<C> apply(const std::vector<C>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("Matrix: vector length mismatch");
    std::vector<C> r(rows_, C(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!hkt::is_zero((*this)(i, j)) && !hkt::is_zero(v[j])) r[i] += (*this)(i, j) * v[j];
      }
    }
    return r;
  }

  /// Stacks `below` under this matrix.
  Matrix vstack(const Matrix& below) const {
    if (rows_ != 0 && below.cols_ != cols_) throw std::invalid_argument("Matrix: vstack width mismatch");
    Matrix r(rows_ + below.rows_, rows_ == 0 ? below.cols_ : cols_);
    std::copy(data_.begin(), data_.end(), r.data_.begin());
    std::copy(below.data_.begin(), below.data_.end(), r.data_.begin() + static_cast<std::ptrdiff_t>(data_.size()));
    return r;
  }

  Matrix column(std::size_t j) const {
    Matrix c(rows_, 1);
    for (std::size_t i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
    return c;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same(const Matrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw std::invalid_argument("Matrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<C> data_;
};

using RationalMatrix = Matrix<Rational>;

/// Reduced row echelon form; returns the pivot columns.
template <ExactField C>
std::vector<std::size_t> rref_in_place(Matrix<C>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && is_zero(m(p, col))) ++p;
    if (p == m.rows()) continue;
    if (p != row) {
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    }
    const C inv = C(1) / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || is_zero(m(i, col))) continue;
      const C f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) {
        if (!is_zero(m(row, j))) m(i, j) -= f * m(row, j);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <ExactField C>
std::size_t rank(Matrix<C> m) {
  return rref_in_place(m).size();
}

/// Basis of the right null space as the columns of the returned matrix.
template <ExactField C>
Matrix<C> null_space(Matrix<C> m) {
  const auto pivots = rref_in_place(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!is_pivot[j]) free_cols.push_back(j);
  }
  Matrix<C> basis(m.cols(), free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    basis(free_cols[f], f) = C(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) basis(pivots[r], f) = -m(r, free_cols[f]);
  }
  return basis;
}

/// Inverse of a square matrix, or nullopt when singular.
template <ExactField C>
std::optional<Matrix<C>> inverse(const Matrix<C>& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = a.rows();
  Matrix<C> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = C(1);
  }
  const auto pivots = rref_in_place(aug);
  if (n > 0 && (pivots.size() < n || pivots[n - 1] != n - 1)) return std::nullopt;
  Matrix<C> inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  }
  return inv;
}

/// Orthogonal projector onto the column span of `basis` (full column rank)
/// under the standard inner product.
inline RationalMatrix column_span_projector(const RationalMatrix& basis) {
  if (basis.cols() == 0) return RationalMatrix(basis.rows(), basis.rows());
  const RationalMatrix bt = basis.transpose();
  const auto gram_inv = inverse(bt * basis);
  if (!gram_inv) throw std::invalid_argument("column_span_projector: basis is rank deficient");
  return basis * (*gram_inv) * bt;
}

/// Sylvester inertia of a symmetric rational matrix.
struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Symmetric Gaussian elimination by congruence.  When every remaining
/// diagonal entry vanishes, an off-diagonal a_ij is promoted to the diagonal
/// with the substitution e_i <- e_i + e_j.
inline Inertia inertia(RationalMatrix a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inertia: matrix not square");
  const std::size_t n = a.rows();
  Inertia out;
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::optional<std::size_t> piv;
    for (std::size_t i = 0; i < n && !piv; ++i) {
      if (!done[i] && !a(i, i).is_zero()) piv = i;
    }
    if (!piv) {
      for (std::size_t i = 0; i < n && !piv; ++i) {
        if (done[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || done[j] || a(i, j).is_zero()) continue;
          // congruence with e_i + e_j: row_i += row_j, col_i += col_j
          for (std::size_t k = 0; k < n; ++k) a(i, k) += a(j, k);
          for (std::size_t k = 0; k < n; ++k) a(k, i) += a(k, j);
          piv = i;
          break;
        }
      }
    }
    if (!piv) break;
    const std::size_t p = *piv;
    const Rational d = a(p, p);
    (d.sign() > 0 ? out.positive : out.negative) += 1;
    done[p] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i] || a(i, p).is_zero()) continue;
      const Rational f = a(i, p) / d;
      for (std::size_t k = 0; k < n; ++k) a(i, k) -= f * a(p, k);
      for (std::size_t k = 0; k < n; ++k) a(k, i) -= f * a(k, p);
    }
  }
  out.zero = n - out.positive - out.negative;
  return out;
}

}  // namespace hkt
