#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ratkon/errors.hpp"
#include "ratkon/group_ring.hpp"
#include "ratkon/linalg.hpp"
#include "ratkon/series.hpp"

namespace ratkon {

/// Dense matrix over the group ring.
struct GRMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<GroupRingElement> a;

  GRMatrix() = default;
  GRMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  static GRMatrix identity(std::size_t n) {
    GRMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = GroupRingElement::one();
    return m;
  }

  GroupRingElement& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const GroupRingElement& operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  /// Entrywise augmentation.
  QMat augment() const {
    QMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = (*this)(i, j).augment();
    return m;
  }

  /// Conjugate transpose: transpose with the ring involution on entries.
  GRMatrix star() const {
    GRMatrix m(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(j, i) = (*this)(i, j).involute();
    return m;
  }

  friend GRMatrix operator*(const GRMatrix& x, const GRMatrix& y) {
    GRMatrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        if (x(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < y.cols; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }

  std::strong_ordering operator<=>(const GRMatrix& o) const {
    if (auto c = rows <=> o.rows; c != 0) return c;
    if (auto c = cols <=> o.cols; c != 0) return c;
    return std::lexicographical_compare_three_way(a.begin(), a.end(), o.a.begin(), o.a.end());
  }
  bool operator==(const GRMatrix&) const = default;
};

/// The sigma-condition for cores: the augmentation is invertible over Q.
inline bool sigma_check(const GRMatrix& core) {
  return core.rows == core.cols && qmat_invertible(core.augment());
}

/// The stricter integral condition: the augmentation has determinant +-1.
inline bool unimodular_over_z(const GRMatrix& core) {
  if (core.rows != core.cols) return false;
  Rat d = qmat_det(core.augment());
  return d == 1 || d == -1;
}

/// A presentation selector * core^{-1} * column of an element of the
/// localization.  The core is square over the group ring with augmentation
/// invertible over Q.
struct MatrixPresentation {
  std::vector<GroupRingElement> selector;  // row vector, length n
  GRMatrix core;                           // n x n
  std::vector<GroupRingElement> column;    // length n

  std::size_t size() const { return core.rows; }

  void validate() const {
    if (core.rows != core.cols || selector.size() != core.rows || column.size() != core.rows)
      throw error("presentation shape mismatch");
    if (!sigma_check(core))
      throw singular_augmentation_error("core augmentation is singular over Q");
  }

  std::strong_ordering operator<=>(const MatrixPresentation& o) const {
    if (auto c = std::lexicographical_compare_three_way(selector.begin(), selector.end(),
                                                        o.selector.begin(), o.selector.end());
        c != 0)
      return c;
    if (auto c = core <=> o.core; c != 0) return c;
    return std::lexicographical_compare_three_way(column.begin(), column.end(), o.column.begin(),
                                                  o.column.end());
  }
  bool operator==(const MatrixPresentation&) const = default;
};

/// An element of the Cohn localization of the group ring.
///
/// Stored either as a plain group-ring element (whenever the element is
/// polynomial and was built by polynomial operations) or as a matrix
/// presentation.  Arithmetic stays polynomial when both operands are;
/// inversion always produces a presentation unless the element is a monomial.
class LocElement {
 public:
  LocElement() : gr_(GroupRingElement()) {}
  explicit LocElement(GroupRingElement a) : gr_(std::move(a)) {}
  explicit LocElement(MatrixPresentation p) : pres_(std::move(p)) { pres_->validate(); }

  static LocElement from_group_ring(const GroupRingElement& a) { return LocElement(a); }
  static LocElement scalar(const Rat& c) { return LocElement(GroupRingElement(c)); }
  static LocElement zero() { return LocElement(GroupRingElement()); }
  static LocElement one() { return LocElement(GroupRingElement::one()); }
  static LocElement gen(int i, int exp = 1) { return LocElement(GroupRingElement::gen(i, exp)); }

  bool is_polynomial() const { return gr_.has_value(); }
  const GroupRingElement& gr() const {
    if (!gr_) throw error("not a polynomial element");
    return *gr_;
  }
  bool is_zero() const { return gr_ && gr_->is_zero(); }
  bool is_one() const { return gr_ && *gr_ == GroupRingElement::one(); }

  /// The presentation, embedding polynomial elements as selector 1, core 1,
  /// column a.
  MatrixPresentation presentation() const {
    if (pres_) return *pres_;
    MatrixPresentation p;
    p.selector = {GroupRingElement::one()};
    p.core = GRMatrix::identity(1);
    p.column = {*gr_};
    return p;
  }

  int g() const {
    if (gr_) return gr_->g();
    int g = 0;
    for (auto& e : pres_->selector) g = std::max(g, e.g());
    for (auto& e : pres_->core.a) g = std::max(g, e.g());
    for (auto& e : pres_->column) g = std::max(g, e.g());
    return g;
  }

  friend LocElement operator+(const LocElement& x, const LocElement& y) {
    if (x.gr_ && y.gr_) return LocElement(*x.gr_ + *y.gr_);
    MatrixPresentation a = x.presentation(), b = y.presentation();
    MatrixPresentation r;
    std::size_t n = a.size(), m = b.size();
    r.selector = a.selector;
    r.selector.insert(r.selector.end(), b.selector.begin(), b.selector.end());
    r.core = GRMatrix(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r.core(i, j) = a.core(i, j);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) r.core(n + i, n + j) = b.core(i, j);
    r.column = a.column;
    r.column.insert(r.column.end(), b.column.begin(), b.column.end());
    return LocElement(std::move(r));
  }

  friend LocElement operator-(const LocElement& x) {
    if (x.gr_) return LocElement(-*x.gr_);
    MatrixPresentation r = *x.pres_;
    for (auto& e : r.selector) e = -e;
    return LocElement(std::move(r));
  }
  friend LocElement operator-(const LocElement& x, const LocElement& y) { return x + (-y); }

  friend LocElement operator*(const LocElement& x, const LocElement& y) {
    if (x.gr_ && y.gr_) return LocElement(*x.gr_ * *y.gr_);
    MatrixPresentation a = x.presentation(), b = y.presentation();
    MatrixPresentation r;
    std::size_t n = a.size(), m = b.size();
    r.selector = a.selector;
    r.selector.resize(n + m);
    r.core = GRMatrix(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r.core(i, j) = a.core(i, j);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) r.core(n + i, n + j) = b.core(i, j);
    // Coupling block -column*selector ties the two systems together.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) r.core(i, n + j) = -(a.column[i] * b.selector[j]);
    r.column.assign(n + m, GroupRingElement());
    for (std::size_t j = 0; j < m; ++j) r.column[n + j] = b.column[j];
    return LocElement(std::move(r));
  }

  friend LocElement operator*(const Rat& c, const LocElement& x) {
    if (x.gr_) return LocElement(c * *x.gr_);
    MatrixPresentation r = *x.pres_;
    for (auto& e : r.selector) e = c * e;
    return LocElement(std::move(r));
  }
  friend LocElement operator*(const LocElement& x, const Rat& c) { return c * x; }

  LocElement& operator+=(const LocElement& y) { return *this = *this + y; }
  LocElement& operator-=(const LocElement& y) { return *this = *this - y; }
  LocElement& operator*=(const LocElement& y) { return *this = *this * y; }

  /// Inverse; requires nonzero augmentation.
  LocElement invert() const {
    Rat e = augment();
    if (e == 0) throw zero_augmentation_error("inverse of element with augmentation 0");
    if (gr_ && gr_->is_monomial()) {
      auto& [w, c] = *gr_->terms().begin();
      return LocElement(GroupRingElement(w.inverse(), Rat(1) / c));
    }
    MatrixPresentation a = presentation();
    std::size_t n = a.size();
    MatrixPresentation r;
    r.selector.assign(n + 1, GroupRingElement());
    r.selector[0] = GroupRingElement::one();
    r.core = GRMatrix(n + 1, n + 1);
    for (std::size_t j = 0; j < n; ++j) r.core(0, j + 1) = a.selector[j];
    for (std::size_t i = 0; i < n; ++i) {
      r.core(i + 1, 0) = -a.column[i];
      for (std::size_t j = 0; j < n; ++j) r.core(i + 1, j + 1) = a.core(i, j);
    }
    r.column.assign(n + 1, GroupRingElement());
    r.column[0] = GroupRingElement::one();
    return LocElement(std::move(r));
  }

  /// The involution extended to the localization.
  LocElement star() const {
    if (gr_) return LocElement(gr_->involute());
    MatrixPresentation r;
    std::size_t n = pres_->size();
    r.selector.resize(n);
    r.column.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      r.selector[i] = pres_->column[i].involute();
      r.column[i] = pres_->selector[i].involute();
    }
    r.core = pres_->core.star();
    return LocElement(std::move(r));
  }

  /// Augmentation, computed over Q through the presentation.
  Rat augment() const {
    if (gr_) return gr_->augment();
    std::size_t n = pres_->size();
    QMat inv = qmat_inverse(pres_->core.augment());
    Rat s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        s += pres_->selector[i].augment() * inv(i, j) * pres_->column[j].augment();
    return s;
  }

  /// Structural comparison (not value equality; see loc_equal).
  std::strong_ordering operator<=>(const LocElement& o) const {
    bool p1 = pres_.has_value(), p2 = o.pres_.has_value();
    if (auto c = p1 <=> p2; c != 0) return c;
    if (p1) return *pres_ <=> *o.pres_;
    return *gr_ <=> *o.gr_;
  }
  bool operator==(const LocElement& o) const { return (*this <=> o) == 0; }

  std::string str() const {
    if (gr_) return gr_->str();
    return "loc[" + std::to_string(pres_->size()) + "]";
  }

 private:
  std::optional<GroupRingElement> gr_;
  std::optional<MatrixPresentation> pres_;
};

/// A presentation of 1/2*(x + star(x)) that is structurally fixed by star().
/// Used to store Hermitian diagonals so that reversal-related diagrams merge.
inline LocElement herm_symmetrize(const LocElement& x) {
  if (x.is_polynomial()) return LocElement(Rat(1, 2) * (x.gr() + x.gr().involute()));
  MatrixPresentation p = x.presentation();
  std::size_t n = p.size();
  MatrixPresentation r;
  r.selector.resize(2 * n);
  r.column.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    r.selector[i] = p.column[i].involute();
    r.selector[n + i] = p.selector[i];
    r.column[i] = p.column[i];
    r.column[n + i] = p.selector[i].involute();
  }
  r.core = GRMatrix(2 * n, 2 * n);
  GRMatrix cstar = p.core.star();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      r.core(i, n + j) = Rat(2) * p.core(i, j);
      r.core(n + i, j) = Rat(2) * cstar(i, j);
    }
  return LocElement(std::move(r));
}

// ---------------------------------------------------------------------------
// Expansion into noncommutative power series.

/// Expands a group-ring element under t_i -> exp(h_i), truncated at `cap`.
inline NCSeries magnus_expand(const GroupRingElement& a, unsigned cap) {
  NCSeries s(cap);
  for (auto& [w, c] : a.terms()) {
    NCSeries m = NCSeries::scalar(c, cap);
    for (int32_t l : w.letters())
      m *= NCSeries::exp_letter(static_cast<NCLetter>(std::abs(l)), l > 0 ? 1 : -1, cap);
    s += m;
  }
  return s;
}

/// Square matrix of truncated series.
struct SeriesMatrix {
  std::size_t n = 0;
  std::vector<NCSeries> a;

  SeriesMatrix(std::size_t n_, unsigned cap) : n(n_), a(n_ * n_, NCSeries(cap)) {}
  NCSeries& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const NCSeries& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static SeriesMatrix identity(std::size_t n, unsigned cap) {
    SeriesMatrix m(n, cap);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = NCSeries::one(cap);
    return m;
  }

  friend SeriesMatrix operator*(const SeriesMatrix& x, const SeriesMatrix& y) {
    unsigned cap = x.a.empty() ? 0 : x.a[0].cap();
    SeriesMatrix r(x.n, cap);
    for (std::size_t i = 0; i < x.n; ++i)
      for (std::size_t k = 0; k < x.n; ++k) {
        if (x(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < x.n; ++j) {
          if (y(k, j).is_zero()) continue;
          r(i, j) += x(i, k) * y(k, j);
        }
      }
    return r;
  }

  bool is_zero() const {
    for (auto& s : a)
      if (!s.is_zero()) return false;
    return true;
  }

  NCSeries trace() const {
    unsigned cap = a.empty() ? 0 : a[0].cap();
    NCSeries t(cap);
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
  }
};

/// Inverts a series matrix whose constant-term matrix is invertible over Q,
/// via a Neumann series around the constant part.
inline SeriesMatrix series_matrix_inverse(const SeriesMatrix& m, unsigned cap) {
  std::size_t n = m.n;
  QMat c0(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c0(i, j) = m(i, j).constant_term();
  QMat c0inv = qmat_inverse(c0);
  // X := I - c0inv * m has no constant term, and m^{-1} = (sum X^k) * c0inv.
  SeriesMatrix x = SeriesMatrix::identity(n, cap);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      NCSeries s(cap);
      for (std::size_t k = 0; k < n; ++k) {
        if (c0inv(i, k) == 0) continue;
        s += c0inv(i, k) * m(k, j);
      }
      x(i, j) -= s;
    }
  SeriesMatrix geo = SeriesMatrix::identity(n, cap), p = SeriesMatrix::identity(n, cap);
  for (unsigned k = 1; k <= cap; ++k) {
    p = p * x;
    if (p.is_zero()) break;
    for (std::size_t i = 0; i < n * n; ++i) geo.a[i] += p.a[i];
  }
  SeriesMatrix r(n, cap);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      NCSeries s(cap);
      for (std::size_t k = 0; k < n; ++k) {
        if (c0inv(k, j) == 0) continue;
        s += geo(i, k) * c0inv(k, j);
      }
      r(i, j) = s;
    }
  return r;
}

/// Expands a localized element into its truncated series.
inline NCSeries magnus_expand(const LocElement& s, unsigned cap) {
  if (s.is_polynomial()) return magnus_expand(s.gr(), cap);
  MatrixPresentation p = s.presentation();
  std::size_t n = p.size();
  SeriesMatrix core(n, cap);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) core(i, j) = magnus_expand(p.core(i, j), cap);
  SeriesMatrix inv = series_matrix_inverse(core, cap);
  NCSeries r(cap);
  for (std::size_t i = 0; i < n; ++i) {
    NCSeries row = magnus_expand(p.selector[i], cap);
    if (row.is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      NCSeries col = magnus_expand(p.column[j], cap);
      if (col.is_zero()) continue;
      r += row * inv(i, j) * col;
    }
  }
  return r;
}

/// Equality in the localization, decided through truncated expansion at
/// degree `cap` (the caller chooses the confidence level).
inline bool loc_equal(const LocElement& a, const LocElement& b, unsigned cap) {
  if (a == b) return true;
  return magnus_expand(a, cap) == magnus_expand(b, cap);
}

// ---------------------------------------------------------------------------
// Matrices over the localization.

struct LocMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<LocElement> a;

  LocMatrix() = default;
  LocMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  static LocMatrix identity(std::size_t n) {
    LocMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = LocElement::one();
    return m;
  }
  static LocMatrix from_gr(const GRMatrix& g) {
    LocMatrix m(g.rows, g.cols);
    for (std::size_t i = 0; i < g.rows * g.cols; ++i) m.a[i] = LocElement(g.a[i]);
    return m;
  }

  LocElement& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const LocElement& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool all_polynomial() const {
    for (auto& e : a)
      if (!e.is_polynomial()) return false;
    return true;
  }
  GRMatrix to_gr() const {
    GRMatrix g(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) g.a[i] = a[i].gr();
    return g;
  }

  QMat augment() const {
    QMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = (*this)(i, j).augment();
    return m;
  }

  LocMatrix star() const {
    LocMatrix m(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(j, i) = (*this)(i, j).star();
    return m;
  }

  friend LocMatrix operator*(const LocMatrix& x, const LocMatrix& y) {
    LocMatrix r(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
      for (std::size_t k = 0; k < x.cols; ++k) {
        if (x(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < y.cols; ++j) {
          if (y(k, j).is_zero()) continue;
          r(i, j) += x(i, k) * y(k, j);
        }
      }
    return r;
  }
  friend LocMatrix operator+(const LocMatrix& x, const LocMatrix& y) {
    LocMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
  }
  friend LocMatrix operator-(const LocMatrix& x, const LocMatrix& y) {
    LocMatrix r(x.rows, x.cols);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
  }

  bool operator==(const LocMatrix& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

/// Structural Hermitian test: (j,i) must equal star((i,j)) exactly for
/// presentation entries and by value for polynomial entries.
inline bool is_hermitian(const LocMatrix& m) {
  if (m.rows != m.cols) return false;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = i; j < m.cols; ++j) {
      const LocElement s = m(i, j).star();
      if (m(j, i).is_polynomial() && s.is_polynomial()) {
        if (!(m(j, i).gr() == s.gr())) return false;
      } else if (!(m(j, i) == s)) {
        return false;
      }
    }
  return true;
}

/// Inverts a square matrix over the localization whose augmentation is
/// invertible over Q.  Entries of the result are presentations obtained by
/// bordering a single linearized core, except for all-rational input where
/// the inverse is computed directly over Q.
inline LocMatrix mat_invert(const LocMatrix& m) {
  if (m.rows != m.cols) throw error("inverse of non-square matrix");
  std::size_t n = m.rows;
  if (!qmat_invertible(m.augment()))
    throw singular_augmentation_error("matrix augmentation is singular over Q");

  bool all_scalar = true;
  for (auto& e : m.a) all_scalar = all_scalar && e.is_polynomial() && e.gr().is_scalar();
  if (all_scalar) {
    QMat inv = qmat_inverse(m.augment());
    LocMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r(i, j) = LocElement::scalar(inv(i, j));
    return r;
  }

  if (m.all_polynomial()) {
    // (M^{-1})_{ij} = e_i^T M^{-1} e_j is presented by the core M itself.
    GRMatrix core = m.to_gr();
    LocMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        MatrixPresentation p;
        p.selector.assign(n, GroupRingElement());
        p.selector[i] = GroupRingElement::one();
        p.core = core;
        p.column.assign(n, GroupRingElement());
        p.column[j] = GroupRingElement::one();
        r(i, j) = LocElement(std::move(p));
      }
    return r;
  }

  // General case: write M = U D^{-1} V with D the diagonal of all entry
  // cores, then border.  P = [[0, U], [-V, D]] has M^{-1} as the top-left
  // n x n block of P^{-1}.
  std::vector<MatrixPresentation> pres(n * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n * n; ++i) {
    pres[i] = m.a[i].presentation();
    k += pres[i].size();
  }
  std::size_t big = n + k;
  GRMatrix core(big, big);
  std::size_t off = n;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      const MatrixPresentation& e = pres[p * n + q];
      std::size_t s = e.size();
      for (std::size_t i = 0; i < s; ++i) {
        core(p, off + i) = e.selector[i];                        // U block
        core(n + (off - n) + i, q) = -e.column[i];               // -V block
        for (std::size_t j = 0; j < s; ++j) core(off + i, off + j) = e.core(i, j);
      }
      off += s;
    }
  LocMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      MatrixPresentation p;
      p.selector.assign(big, GroupRingElement());
      p.selector[i] = GroupRingElement::one();
      p.core = core;
      p.column.assign(big, GroupRingElement());
      p.column[j] = GroupRingElement::one();
      r(i, j) = LocElement(std::move(p));
    }
  return r;
}

/// Inverts a Hermitian matrix, producing a structurally Hermitian result:
/// the (j,i) entry is star of the (i,j) entry exactly, and diagonals are
/// fixed by star.
inline LocMatrix herm_invert(const LocMatrix& m) {
  if (!is_hermitian(m)) throw non_hermitian_error("matrix is not Hermitian");
  LocMatrix inv = mat_invert(m);
  if (m.all_polynomial()) return inv;  // already structurally Hermitian
  std::size_t n = m.rows;
  for (std::size_t i = 0; i < n; ++i) {
    inv(i, i) = herm_symmetrize(inv(i, i));
    for (std::size_t j = i + 1; j < n; ++j) inv(j, i) = inv(i, j).star();
  }
  return inv;
}

/// Entrywise truncated expansion.
inline SeriesMatrix magnus_expand(const LocMatrix& m, unsigned cap) {
  if (m.rows != m.cols) throw error("expansion of non-square matrix");
  SeriesMatrix s(m.rows, cap);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) s(i, j) = magnus_expand(m(i, j), cap);
  return s;
}

inline bool loc_equal(const LocMatrix& a, const LocMatrix& b, unsigned cap) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.a.size(); ++i)
    if (!loc_equal(a.a[i], b.a[i], cap)) return false;
  return true;
}

/// star(s) together with its augmentation.
inline std::pair<LocElement, Rat> loc_star_eps(const LocElement& s) {
  return {s.star(), s.augment()};
}

}  // namespace ratkon
