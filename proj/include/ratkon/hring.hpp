#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ratkon/loc.hpp"
#include "ratkon/series.hpp"

namespace ratkon {

/// One alternating product c * f_0 h^{m_1} f_1 ... h^{m_k} f_k with localized
/// factors f_i and positive powers of the extra variable h between them.
struct HTerm {
  Rat c = 1;
  std::vector<LocElement> fs;  // k+1 factors
  std::vector<unsigned> hs;    // k powers, each >= 1

  unsigned h_degree() const {
    unsigned d = 0;
    for (unsigned m : hs) d += m;
    return d;
  }
};

/// An element of the extension of the localization by the variable h:
/// a finite sum of alternating products.  No canonical form is kept;
/// equality is decided through truncated expansion.
class HElement {
 public:
  HElement() = default;
  explicit HElement(const LocElement& f) {
    if (!f.is_zero()) terms_.push_back(HTerm{1, {f}, {}});
  }
  static HElement zero() { return HElement(); }
  static HElement one() { return HElement(LocElement::one()); }
  static HElement h_power(unsigned m) {
    HElement e;
    if (m == 0) return one();
    e.terms_.push_back(HTerm{1, {LocElement::one(), LocElement::one()}, {m}});
    return e;
  }

  const std::vector<HTerm>& terms() const { return terms_; }
  bool is_structurally_zero() const { return terms_.empty(); }

  void add_term(HTerm t) {
    if (t.c == 0) return;
    for (auto& f : t.fs)
      if (f.is_polynomial() && f.gr().is_zero()) return;
    terms_.push_back(std::move(t));
  }

  unsigned max_h_degree() const {
    unsigned d = 0;
    for (auto& t : terms_) d = std::max(d, t.h_degree());
    return d;
  }

  friend HElement operator+(const HElement& a, const HElement& b) {
    HElement r = a;
    for (auto& t : b.terms_) r.add_term(t);
    return r;
  }
  friend HElement operator-(const HElement& a, const HElement& b) { return a + (Rat(-1) * b); }
  friend HElement operator*(const Rat& c, const HElement& a) {
    HElement r;
    for (auto t : a.terms_) {
      t.c *= c;
      r.add_term(std::move(t));
    }
    return r;
  }
  friend HElement operator*(const HElement& a, const Rat& c) { return c * a; }

  friend HElement operator*(const HElement& a, const HElement& b) {
    HElement r;
    for (auto& s : a.terms_)
      for (auto& t : b.terms_) {
        HTerm p;
        p.c = s.c * t.c;
        p.fs = s.fs;
        p.fs.back() = p.fs.back() * t.fs.front();
        p.fs.insert(p.fs.end(), t.fs.begin() + 1, t.fs.end());
        p.hs = s.hs;
        p.hs.insert(p.hs.end(), t.hs.begin(), t.hs.end());
        r.add_term(std::move(p));
      }
    return r;
  }

  HElement& operator+=(const HElement& b) { return *this = *this + b; }
  HElement& operator-=(const HElement& b) { return *this = *this - b; }
  HElement& operator*=(const HElement& b) { return *this = *this * b; }

  /// The part of h-degree exactly n.
  HElement deg_h(unsigned n) const {
    HElement r;
    for (auto& t : terms_)
      if (t.h_degree() == n) r.add_term(t);
    return r;
  }

  /// The part of h-degree at least n.
  HElement deg_h_at_least(unsigned n) const {
    HElement r;
    for (auto& t : terms_)
      if (t.h_degree() >= n) r.add_term(t);
    return r;
  }

  /// Truncated expansion: localized factors through t_i -> exp(h_i), the
  /// variable h as its own letter.
  NCSeries expand(unsigned cap) const {
    NCSeries r(cap);
    for (auto& t : terms_) {
      if (t.h_degree() > cap) continue;
      NCSeries p = NCSeries::scalar(t.c, cap);
      for (std::size_t i = 0; i < t.fs.size(); ++i) {
        if (i > 0) {
          NCSeries hpow = NCSeries::one(cap);
          for (unsigned m = 0; m < t.hs[i - 1]; ++m) hpow *= NCSeries::letter(kLetterH, cap);
          p *= hpow;
        }
        p *= magnus_expand(t.fs[i], cap);
        if (p.is_zero()) break;
      }
      r += p;
    }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& t : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + to_string(t.c) + ")";
      for (std::size_t i = 0; i < t.fs.size(); ++i) {
        if (i > 0) out += "*h" + (t.hs[i - 1] > 1 ? "^" + std::to_string(t.hs[i - 1]) : "");
        out += "*(" + t.fs[i].str() + ")";
      }
    }
    return out;
  }

 private:
  std::vector<HTerm> terms_;
};

inline bool h_equal(const HElement& a, const HElement& b, unsigned cap) {
  return a.expand(cap) == b.expand(cap);
}

/// Square matrix over the h-extension.
struct HMatrix {
  std::size_t n = 0;
  std::vector<HElement> a;

  explicit HMatrix(std::size_t n_ = 0) : n(n_), a(n_ * n_) {}
  HElement& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const HElement& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static HMatrix identity(std::size_t n) {
    HMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = HElement::one();
    return m;
  }
  static HMatrix from_loc(const LocMatrix& l) {
    HMatrix m(l.rows);
    for (std::size_t i = 0; i < l.a.size(); ++i) m.a[i] = HElement(l.a[i]);
    return m;
  }

  friend HMatrix operator*(const HMatrix& x, const HMatrix& y) {
    HMatrix r(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
      for (std::size_t k = 0; k < x.n; ++k) {
        if (x(i, k).is_structurally_zero()) continue;
        for (std::size_t j = 0; j < x.n; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }
  friend HMatrix operator+(const HMatrix& x, const HMatrix& y) {
    HMatrix r(x.n);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
  }
  friend HMatrix operator-(const HMatrix& x, const HMatrix& y) {
    HMatrix r(x.n);
    for (std::size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
  }

  HMatrix deg_h(unsigned d) const {
    HMatrix r(n);
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = a[i].deg_h(d);
    return r;
  }

  HElement trace() const {
    HElement t;
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
  }

  SeriesMatrix expand(unsigned cap) const {
    SeriesMatrix s(n, cap);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) = a[i * n + j].expand(cap);
    return s;
  }
};

// ---------------------------------------------------------------------------
// The conjugation map and its derivative.

/// phi at `site`: the ring map fixing t_j (j != site) and h, and sending
/// t_site -> exp(-h) t_site exp(h).  Truncated at h-degree `hcap`.
inline HElement phi_conj(const GroupRingElement& x, int site, unsigned hcap) {
  HElement r;
  for (auto& [w, c] : x.terms()) {
    HElement p = Rat(c) * HElement::one();
    for (int32_t l : w.letters()) {
      int idx = std::abs(l);
      LocElement t = LocElement::gen(idx, l > 0 ? 1 : -1);
      if (idx != site) {
        p *= HElement(t);
        continue;
      }
      HElement img;
      for (unsigned a = 0; a <= hcap; ++a)
        for (unsigned b = 0; a + b <= hcap; ++b) {
          HTerm term;
          term.c = (a % 2 ? Rat(-1) : Rat(1)) * inv_factorial(a) * inv_factorial(b);
          if (a == 0 && b == 0) {
            term.fs = {t};
          } else if (a == 0) {
            term.fs = {t, LocElement::one()};
            term.hs = {b};
          } else if (b == 0) {
            term.fs = {LocElement::one(), t};
            term.hs = {a};
          } else {
            term.fs = {LocElement::one(), t, LocElement::one()};
            term.hs = {a, b};
          }
          img.add_term(std::move(term));
        }
      p *= img;
      HElement capped;
      for (auto& t : p.terms())
        if (t.h_degree() <= hcap) capped.add_term(t);
      p = std::move(capped);
    }
    r += p;
  }
  return r;
}

inline HMatrix phi_conj(const GRMatrix& m, int site, unsigned hcap) {
  HMatrix r(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) r(i, j) = phi_conj(m(i, j), site, hcap);
  return r;
}

inline HElement phi_conj(const LocElement& x, int site, unsigned hcap) {
  if (x.is_polynomial()) return phi_conj(x.gr(), site, hcap);
  MatrixPresentation p = x.presentation();
  std::size_t n = p.size();
  // phi(core)^{-1} by a Neumann series around the h-degree-0 part, which is
  // the core itself inverted over the localization.
  LocMatrix core0 = LocMatrix::from_gr(p.core);
  LocMatrix core0_inv = mat_invert(core0);
  HMatrix delta = phi_conj(p.core, site, hcap);
  for (std::size_t i = 0; i < n * n; ++i) delta.a[i] = delta.a[i].deg_h_at_least(1);
  HMatrix step = HMatrix::from_loc(core0_inv) * delta;  // raises h-degree
  for (std::size_t i = 0; i < n * n; ++i) step.a[i] = Rat(-1) * step.a[i];
  HMatrix inv = HMatrix::from_loc(core0_inv);
  HMatrix acc = HMatrix::from_loc(core0_inv);
  for (unsigned k = 1; k <= hcap; ++k) {
    acc = step * acc;
    HMatrix capped(n);
    for (std::size_t i = 0; i < n * n; ++i) {
      for (auto& t : acc.a[i].terms())
        if (t.h_degree() <= hcap) capped.a[i].add_term(t);
    }
    acc = capped;
    inv = inv + acc;
  }
  HElement r;
  for (std::size_t i = 0; i < n; ++i) {
    HElement row = phi_conj(p.selector[i], site, hcap);
    if (row.is_structurally_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      HElement col = phi_conj(p.column[j], site, hcap);
      if (col.is_structurally_zero()) continue;
      r += row * inv(i, j) * col;
    }
  }
  HElement capped;
  for (auto& t : r.terms())
    if (t.h_degree() <= hcap) capped.add_term(t);
  return capped;
}

inline HElement phi_conj(const HElement& x, int site, unsigned hcap) {
  HElement r;
  for (auto& t : x.terms()) {
    if (t.h_degree() > hcap) continue;
    HElement p = Rat(t.c) * HElement::one();
    for (std::size_t i = 0; i < t.fs.size(); ++i) {
      if (i > 0) p *= HElement::h_power(t.hs[i - 1]);
      p *= phi_conj(t.fs[i], site, hcap - t.h_degree());
    }
    for (auto& q : p.terms())
      if (q.h_degree() <= hcap) r.add_term(q);
  }
  return r;
}

inline HMatrix phi_conj(const LocMatrix& m, int site, unsigned hcap) {
  HMatrix r(m.rows);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = phi_conj(m.a[i], site, hcap);
  return r;
}

/// eta at `site`: the derivation deg_h^1 of phi.  eta(t_j) vanishes for
/// j != site and eta(t_site) = t_site h - h t_site.
inline HElement eta(const LocElement& x, int site) { return phi_conj(x, site, 1).deg_h(1); }
inline HElement eta(const GroupRingElement& x, int site) {
  return phi_conj(x, site, 1).deg_h(1);
}
inline HMatrix eta(const LocMatrix& m, int site) {
  HMatrix r(m.rows);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = eta(m.a[i], site);
  return r;
}

/// The extension of eta to the h-ring, acting on the localized factors only
/// (eta_hat(h) = 0), by the product rule.
inline HElement eta_hat(const HElement& x, int site) {
  HElement r;
  for (auto& t : x.terms())
    for (std::size_t slot = 0; slot < t.fs.size(); ++slot) {
      HElement d = eta(t.fs[slot], site);
      if (d.is_structurally_zero()) continue;
      for (auto& dt : d.terms()) {
        // Splice the derivative of the slot factor between the surrounding
        // h-powers; no factor merge is needed since powers separate slots.
        HTerm nt;
        nt.c = t.c * dt.c;
        nt.fs.assign(t.fs.begin(), t.fs.begin() + slot);
        nt.hs.assign(t.hs.begin(), t.hs.begin() + slot);
        nt.fs.insert(nt.fs.end(), dt.fs.begin(), dt.fs.end());
        nt.hs.insert(nt.hs.end(), dt.hs.begin(), dt.hs.end());
        nt.hs.insert(nt.hs.end(), t.hs.begin() + slot, t.hs.end());
        nt.fs.insert(nt.fs.end(), t.fs.begin() + slot + 1, t.fs.end());
        r.add_term(std::move(nt));
      }
    }
  return r;
}

inline HElement eta_hat_power(const HElement& x, int site, unsigned n) {
  HElement r = x;
  for (unsigned k = 0; k < n; ++k) r = eta_hat(r, site);
  return r;
}

// ---------------------------------------------------------------------------
// Wheeled traces.

/// tr log of a matrix over the h-extension whose h-degree-0 part is the
/// identity (checked through expansion at the requested cap), as a sum of
/// cyclic words.
inline CyclicSeries chi_h(const HMatrix& m, unsigned cap) {
  SeriesMatrix e = m.expand(cap);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      NCSeries zero_h = e(i, j).letter_degree_part(kLetterH, 0);
      NCSeries want = (i == j) ? NCSeries::one(cap) : NCSeries::zero(cap);
      if (!(zero_h == want))
        throw non_unipotent_error("h-degree-0 part is not the identity");
    }
  SeriesMatrix s = e;
  for (std::size_t i = 0; i < m.n; ++i) s(i, i) -= NCSeries::one(cap);
  NCSeries t(cap);
  SeriesMatrix p = s;
  for (unsigned n = 1; n <= cap; ++n) {
    if (n > 1) p = p * s;
    if (p.is_zero()) break;
    t += Rat(n % 2 ? 1 : -1, n) * p.trace();
  }
  return CyclicSeries::from_series(t);
}

/// tr log of a matrix whose h-degree-0 part equals the identity by value
/// (verified through expansion), keeping the localized factors atomic: the
/// value-zero h-degree-0 remainder is dropped and the alternating power
/// series is summed through terms of h-degree <= hcap.
inline HElement tr_log_unipotent(const HMatrix& m, unsigned hcap) {
  SeriesMatrix e0 = m.deg_h(0).expand(1);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      NCSeries want = (i == j) ? NCSeries::one(1) : NCSeries::zero(1);
      if (!(e0(i, j) == want))
        throw non_unipotent_error("h-degree-0 part is not the identity");
    }
  HMatrix s(m.n);
  for (std::size_t i = 0; i < m.a.size(); ++i) s.a[i] = m.a[i].deg_h_at_least(1);
  HElement t;
  HMatrix p = s;
  for (unsigned n = 1; n <= hcap; ++n) {
    if (n > 1) {
      p = p * s;
      for (auto& x : p.a) {
        HElement trimmed;
        for (auto& term : x.terms())
          if (term.h_degree() <= hcap) trimmed.add_term(term);
        x = trimmed;
      }
    }
    t += Rat(n % 2 ? 1 : -1, n) * p.trace();
  }
  return t;
}

/// tr log of M * (eps M)^{-1} for a matrix over the localization with
/// augmentation invertible over Q, as a sum of cyclic words.
inline CyclicSeries chi_prime(const LocMatrix& m, unsigned cap) {
  std::size_t n = m.rows;
  QMat eps = m.augment();
  QMat eps_inv = qmat_inverse(eps);  // throws singular_augmentation_error
  SeriesMatrix e = magnus_expand(m, cap);
  SeriesMatrix s(n, cap);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      NCSeries v(cap);
      for (std::size_t k = 0; k < n; ++k) {
        if (eps_inv(k, j) == 0) continue;
        v += e(i, k) * eps_inv(k, j);
      }
      if (i == j) v -= NCSeries::one(cap);
      s(i, j) = v;
    }
  NCSeries t(cap);
  SeriesMatrix p = s;
  for (unsigned k = 1; k <= cap; ++k) {
    if (k > 1) p = p * s;
    if (p.is_zero()) break;
    t += Rat(k % 2 ? 1 : -1, k) * p.trace();
  }
  return CyclicSeries::from_series(t);
}

}  // namespace ratkon
