#pragma once

#include <cstddef>
#include <vector>

#include "ratkon/errors.hpp"
#include "ratkon/rational.hpp"

namespace ratkon {

/// Dense matrix over Q with exact arithmetic.
struct QMat {
  std::size_t rows = 0, cols = 0;
  std::vector<Rat> a;

  QMat() = default;
  QMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, Rat(0)) {}

  static QMat identity(std::size_t n) {
    QMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Rat& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  friend QMat operator*(const QMat& x, const QMat& y) {
    QMat r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        if (x(i, k) == 0) continue;
        for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }

  bool operator==(const QMat&) const = default;
};

/// Exact determinant by fraction-preserving Gaussian elimination.
inline Rat qmat_det(QMat m) {
  if (m.rows != m.cols) throw error("determinant of non-square matrix");
  Rat det = 1;
  for (std::size_t c = 0; c < m.cols; ++c) {
    std::size_t p = c;
    while (p < m.rows && m(p, c) == 0) ++p;
    if (p == m.rows) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    Rat inv = Rat(1) / m(c, c);
    for (std::size_t i = c + 1; i < m.rows; ++i) {
      if (m(i, c) == 0) continue;
      Rat f = m(i, c) * inv;
      for (std::size_t j = c; j < m.cols; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Exact inverse by Gauss-Jordan; throws singular_augmentation_error.
inline QMat qmat_inverse(QMat m) {
  if (m.rows != m.cols) throw error("inverse of non-square matrix");
  std::size_t n = m.rows;
  QMat inv = QMat::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) throw singular_augmentation_error("matrix is singular over Q");
    if (p != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(p, j), m(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    Rat f = Rat(1) / m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) *= f;
      inv(c, j) *= f;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      Rat g = m(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= g * m(c, j);
        inv(i, j) -= g * inv(c, j);
      }
    }
  }
  return inv;
}

inline bool qmat_invertible(const QMat& m) { return m.rows == m.cols && qmat_det(m) != 0; }

}  // namespace ratkon
