#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "ratkon/errors.hpp"
#include "ratkon/rational.hpp"

namespace ratkon {

/// Letters of the completed tensor algebra the expansions live in.
/// 0 encodes h (the wrapping variable), -1 encodes h', and i >= 1 encodes h_i
/// (the expansion letter of the generator t_i).
using NCLetter = int16_t;
using NCWord = std::vector<NCLetter>;

inline constexpr NCLetter kLetterH = 0;
inline constexpr NCLetter kLetterHPrime = -1;

inline std::string letter_str(NCLetter l) {
  if (l == kLetterH) return "h";
  if (l == kLetterHPrime) return "h'";
  return "h" + std::to_string(l);
}

inline std::string word_str(const NCWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (NCLetter l : w) {
    if (!s.empty()) s += " ";
    s += letter_str(l);
  }
  return s;
}

/// A noncommutative power series truncated at total degree `cap`:
/// a Q-linear combination of words of length <= cap.
class NCSeries {
 public:
  explicit NCSeries(unsigned cap = 0) : cap_(cap) {}

  static NCSeries zero(unsigned cap) { return NCSeries(cap); }
  static NCSeries scalar(const Rat& c, unsigned cap) {
    NCSeries s(cap);
    s.add_term({}, c);
    return s;
  }
  static NCSeries one(unsigned cap) { return scalar(1, cap); }
  static NCSeries letter(NCLetter l, unsigned cap) {
    NCSeries s(cap);
    s.add_term({l}, 1);
    return s;
  }

  /// exp(sign * h_l) truncated: sum_k sign^k l^k / k!.
  static NCSeries exp_letter(NCLetter l, int sign, unsigned cap) {
    NCSeries s(cap);
    NCWord w;
    Rat c = 1;
    for (unsigned k = 0; k <= cap; ++k) {
      s.add_term(w, c);
      w.push_back(l);
      c *= Rat(sign, static_cast<long long>(k) + 1);
    }
    return s;
  }

  unsigned cap() const { return cap_; }
  const std::map<NCWord, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const NCWord& w, const Rat& c) {
    if (c == 0 || w.size() > cap_) return;
    auto [it, fresh] = terms_.emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rat coeff(const NCWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Rat(0) : it->second;
  }
  Rat constant_term() const { return coeff({}); }

  unsigned min_degree() const {
    unsigned m = cap_ + 1;
    for (auto& [w, c] : terms_) m = std::min<unsigned>(m, static_cast<unsigned>(w.size()));
    return m;
  }

  /// Restricts to words of total length exactly n.
  NCSeries degree_part(unsigned n) const {
    NCSeries r(cap_);
    for (auto& [w, c] : terms_)
      if (w.size() == n) r.add_term(w, c);
    return r;
  }

  /// Restricts to words containing exactly n copies of the letter l.
  NCSeries letter_degree_part(NCLetter l, unsigned n) const {
    NCSeries r(cap_);
    for (auto& [w, c] : terms_)
      if (static_cast<unsigned>(std::count(w.begin(), w.end(), l)) == n) r.add_term(w, c);
    return r;
  }

  NCSeries truncated(unsigned cap) const {
    NCSeries r(cap);
    for (auto& [w, c] : terms_) r.add_term(w, c);
    return r;
  }

  friend NCSeries operator+(const NCSeries& a, const NCSeries& b) {
    NCSeries r(std::min(a.cap_, b.cap_));
    for (auto& [w, c] : a.terms_) r.add_term(w, c);
    for (auto& [w, c] : b.terms_) r.add_term(w, c);
    return r;
  }
  friend NCSeries operator-(const NCSeries& a, const NCSeries& b) { return a + (Rat(-1) * b); }
  friend NCSeries operator*(const Rat& c, const NCSeries& a) {
    NCSeries r(a.cap_);
    for (auto& [w, k] : a.terms_) r.add_term(w, c * k);
    return r;
  }
  friend NCSeries operator*(const NCSeries& a, const Rat& c) { return c * a; }
  friend NCSeries operator*(const NCSeries& a, const NCSeries& b) {
    NCSeries r(std::min(a.cap_, b.cap_));
    for (auto& [wa, ca] : a.terms_) {
      if (wa.size() > r.cap_) continue;
      for (auto& [wb, cb] : b.terms_) {
        if (wa.size() + wb.size() > r.cap_) continue;
        NCWord w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        r.add_term(w, ca * cb);
      }
    }
    return r;
  }
  NCSeries& operator+=(const NCSeries& b) { return *this = *this + b; }
  NCSeries& operator-=(const NCSeries& b) { return *this = *this - b; }
  NCSeries& operator*=(const NCSeries& b) { return *this = *this * b; }

  /// The involution: reverses words and sends every letter x to -x, so that
  /// exp(h_i) and exp(-h_i) (the images of t_i and t_i^{-1}) are swapped.
  NCSeries involute() const {
    NCSeries r(cap_);
    for (auto& [w, c] : terms_) {
      NCWord v(w.rbegin(), w.rend());
      r.add_term(v, (w.size() % 2 ? Rat(-1) : Rat(1)) * c);
    }
    return r;
  }

  /// exp of a series with zero constant term.
  NCSeries exp() const {
    if (constant_term() != 0) throw error("exp of series with constant term");
    NCSeries r = one(cap_), p = one(cap_);
    for (unsigned n = 1; n <= cap_; ++n) {
      p = p * *this;
      if (p.is_zero()) break;
      r += inv_factorial(n) * p;
    }
    return r;
  }

  /// log of a series with constant term 1.
  NCSeries log() const {
    if (constant_term() != 1) throw error("log of series with constant term != 1");
    NCSeries x = *this - one(cap_);
    NCSeries r(cap_), p = one(cap_);
    for (unsigned n = 1; n <= cap_; ++n) {
      p = p * x;
      if (p.is_zero()) break;
      r += Rat(n % 2 ? 1 : -1, n) * p;
    }
    return r;
  }

  bool operator==(const NCSeries& b) const { return terms_ == b.terms_; }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& [w, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + to_string(c) + ")*" + word_str(w);
    }
    return out;
  }

 private:
  unsigned cap_;
  std::map<NCWord, Rat> terms_;
};

/// Returns the lexicographically least rotation of w.
inline NCWord least_rotation(const NCWord& w) {
  NCWord best = w;
  NCWord cur = w;
  for (std::size_t k = 1; k < w.size(); ++k) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

/// A Q-linear combination of cyclic words: words identified up to rotation,
/// keyed by the lexicographically least representative.
class CyclicSeries {
 public:
  explicit CyclicSeries(unsigned cap = 0) : cap_(cap) {}

  unsigned cap() const { return cap_; }
  const std::map<NCWord, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_word(const NCWord& w, const Rat& c) {
    if (c == 0 || w.size() > cap_) return;
    NCWord k = least_rotation(w);
    auto [it, fresh] = terms_.emplace(std::move(k), c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  /// Projects a series onto cyclic words (the trace of the tensor algebra).
  static CyclicSeries from_series(const NCSeries& s) {
    CyclicSeries r(s.cap());
    for (auto& [w, c] : s.terms()) r.add_word(w, c);
    return r;
  }

  Rat coeff(const NCWord& w) const {
    auto it = terms_.find(least_rotation(w));
    return it == terms_.end() ? Rat(0) : it->second;
  }

  friend CyclicSeries operator+(const CyclicSeries& a, const CyclicSeries& b) {
    CyclicSeries r(std::min(a.cap_, b.cap_));
    for (auto& [w, c] : a.terms_) r.add_word(w, c);
    for (auto& [w, c] : b.terms_) r.add_word(w, c);
    return r;
  }
  friend CyclicSeries operator-(const CyclicSeries& a, const CyclicSeries& b) {
    CyclicSeries r(std::min(a.cap_, b.cap_));
    for (auto& [w, c] : a.terms_) r.add_word(w, c);
    for (auto& [w, c] : b.terms_) r.add_word(w, -c);
    return r;
  }
  friend CyclicSeries operator*(const Rat& c, const CyclicSeries& a) {
    CyclicSeries r(a.cap_);
    for (auto& [w, k] : a.terms_) r.add_word(w, c * k);
    return r;
  }

  bool operator==(const CyclicSeries& b) const { return terms_ == b.terms_; }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& [w, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += "(" + to_string(c) + ")*(" + word_str(w) + ")";
    }
    return out;
  }

 private:
  unsigned cap_;
  std::map<NCWord, Rat> terms_;
};

}  // namespace ratkon
