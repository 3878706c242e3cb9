#pragma once

// Dense matrices over an exact field type T (Rat, FieldElement, ...).
// Algorithms that must materialize fresh scalars take explicit zero/one
// arguments, because a FieldElement cannot be conjured out of thin air — it
// needs its field handle.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "latticeforge/intpoly.hpp"
#include "latticeforge/numfield.hpp"
#include "latticeforge/rational.hpp"

namespace latticeforge {

inline bool elem_is_zero(const Rat& x) { return sign_of(x) == 0; }
inline bool elem_is_zero(const FieldElement& x) { return x.is_zero(); }
inline Rat elem_inverse(const Rat& x) { return Rat(1) / x; }
inline FieldElement elem_inverse(const FieldElement& x) { return x.inverse(); }

template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t r, std::size_t c, const T& fill) : rows_(r), cols_(c), a_(r * c, fill) {}
  static Mat identity(std::size_t n, const T& zero, const T& one) {
    Mat m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = one;
    return m;
  }
  static Mat from_rows(std::vector<std::vector<T>> rows) {
    Mat m;
    m.rows_ = rows.size();
    m.cols_ = rows.empty() ? 0 : rows[0].size();
    for (auto& r : rows) {
      if (r.size() != m.cols_) throw std::invalid_argument("matrix rows of unequal length");
      for (auto& x : r) m.a_.push_back(std::move(x));
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Mat& o) const { return !(*this == o); }

  Mat transpose() const {
    Mat m(cols_, rows_, a_.empty() ? T() : a_[0]);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m.at(j, i) = at(i, j);
    return m;
  }

  Mat operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    if (a_.empty() || o.a_.empty()) return Mat(rows_, o.cols_, T());
    Mat m(rows_, o.cols_, a_[0] - a_[0]);  // zero of the right field
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const T& x = at(i, k);
        if (elem_is_zero(x)) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) m.at(i, j) = m.at(i, j) + x * o.at(k, j);
      }
    return m;
  }

  Mat operator+(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("matrix sum: shape mismatch");
    Mat m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = m.a_[i] + o.a_[i];
    return m;
  }
  Mat operator-(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("matrix difference: shape mismatch");
    Mat m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = m.a_[i] - o.a_[i];
    return m;
  }
  Mat operator*(const T& s) const {
    Mat m = *this;
    for (auto& x : m.a_) x = x * s;
    return m;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix apply: shape mismatch");
    std::vector<T> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      T acc = at(i, 0) * v[0];
      for (std::size_t j = 1; j < cols_; ++j) acc = acc + at(i, j) * v[j];
      out.push_back(std::move(acc));
    }
    return out;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> a_;
};

template <typename T>
T mat_det(Mat<T> m, const T& zero) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  std::size_t n = m.rows();
  if (n == 0) throw std::invalid_argument("determinant of empty matrix");
  T det = zero;  // replaced by first pivot product
  bool first = true;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && elem_is_zero(m.at(piv, k))) ++piv;
    if (piv == n) return zero;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(k, j));
      sign = -sign;
    }
    const T pivot = m.at(k, k);
    det = first ? pivot : det * pivot;
    first = false;
    T pinv = elem_inverse(pivot);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (elem_is_zero(m.at(i, k))) continue;
      T f = m.at(i, k) * pinv;
      for (std::size_t j = k; j < n; ++j) m.at(i, j) = m.at(i, j) - f * m.at(k, j);
    }
  }
  if (sign < 0) det = zero - det;
  return det;
}

template <typename T>
std::optional<Mat<T>> mat_inverse(Mat<T> m, const T& zero, const T& one) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  std::size_t n = m.rows();
  Mat<T> inv = Mat<T>::identity(n, zero, one);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && elem_is_zero(m.at(piv, k))) ++piv;
    if (piv == n) return std::nullopt;
    if (piv != k)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m.at(piv, j), m.at(k, j));
        std::swap(inv.at(piv, j), inv.at(k, j));
      }
    T pinv = elem_inverse(m.at(k, k));
    for (std::size_t j = 0; j < n; ++j) {
      m.at(k, j) = m.at(k, j) * pinv;
      inv.at(k, j) = inv.at(k, j) * pinv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || elem_is_zero(m.at(i, k))) continue;
      T f = m.at(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        m.at(i, j) = m.at(i, j) - f * m.at(k, j);
        inv.at(i, j) = inv.at(i, j) - f * inv.at(k, j);
      }
    }
  }
  return inv;
}

// Solve M x = rhs (M not necessarily square).  Returns one solution or
// nullopt if inconsistent.
template <typename T>
std::optional<std::vector<T>> mat_solve(Mat<T> m, std::vector<T> rhs, const T& zero) {
  if (m.rows() != rhs.size()) throw std::invalid_argument("solve: shape mismatch");
  std::size_t R = m.rows(), C = m.cols();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t piv = row;
    while (piv < R && elem_is_zero(m.at(piv, col))) ++piv;
    if (piv == R) continue;
    if (piv != row) {
      for (std::size_t j = 0; j < C; ++j) std::swap(m.at(piv, j), m.at(row, j));
      std::swap(rhs[piv], rhs[row]);
    }
    T pinv = elem_inverse(m.at(row, col));
    for (std::size_t j = 0; j < C; ++j) m.at(row, j) = m.at(row, j) * pinv;
    rhs[row] = rhs[row] * pinv;
    for (std::size_t i = 0; i < R; ++i) {
      if (i == row || elem_is_zero(m.at(i, col))) continue;
      T f = m.at(i, col);
      for (std::size_t j = 0; j < C; ++j) m.at(i, j) = m.at(i, j) - f * m.at(row, j);
      rhs[i] = rhs[i] - f * rhs[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < R; ++i)
    if (!elem_is_zero(rhs[i])) return std::nullopt;
  std::vector<T> x(C, zero);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = rhs[i];
  return x;
}

// Basis of the right kernel of M.
template <typename T>
std::vector<std::vector<T>> mat_kernel(Mat<T> m, const T& zero, const T& one) {
  std::size_t R = m.rows(), C = m.cols();
  std::vector<long> pivot_of_col(C, -1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < C && row < R; ++col) {
    std::size_t piv = row;
    while (piv < R && elem_is_zero(m.at(piv, col))) ++piv;
    if (piv == R) continue;
    if (piv != row)
      for (std::size_t j = 0; j < C; ++j) std::swap(m.at(piv, j), m.at(row, j));
    T pinv = elem_inverse(m.at(row, col));
    for (std::size_t j = 0; j < C; ++j) m.at(row, j) = m.at(row, j) * pinv;
    for (std::size_t i = 0; i < R; ++i) {
      if (i == row || elem_is_zero(m.at(i, col))) continue;
      T f = m.at(i, col);
      for (std::size_t j = 0; j < C; ++j) m.at(i, j) = m.at(i, j) - f * m.at(row, j);
    }
    pivot_of_col[col] = static_cast<long>(row);
    ++row;
  }
  std::vector<std::vector<T>> basis;
  for (std::size_t free_col = 0; free_col < C; ++free_col) {
    if (pivot_of_col[free_col] >= 0) continue;
    std::vector<T> v(C, zero);
    v[free_col] = one;
    for (std::size_t col = 0; col < C; ++col)
      if (pivot_of_col[col] >= 0)
        v[col] = zero - m.at(static_cast<std::size_t>(pivot_of_col[col]), free_col);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Characteristic polynomial of a rational matrix (monic, in x), by the
// trace-of-powers recurrence.
inline QPoly char_poly(const Mat<Rat>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("char_poly of non-square matrix");
  std::size_t n = m.rows();
  // Faddeev–LeVerrier: M_1 = A, c_{n-1} = -tr(M_1); M_{k+1} = A(M_k + c_{n-k} I).
  std::vector<Rat> c(n + 1, Rat(0));
  c[n] = Rat(1);
  Mat<Rat> mk = m;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      Mat<Rat> shifted = mk;
      for (std::size_t i = 0; i < n; ++i)
        shifted.at(i, i) = shifted.at(i, i) + c[n - k + 1];
      mk = m * shifted;
    }
    Rat tr(0);
    for (std::size_t i = 0; i < n; ++i) tr += mk.at(i, i);
    c[n - k] = -tr / Rat(static_cast<long>(k));
  }
  return QPoly(std::move(c));
}

}  // namespace latticeforge
