#pragma once

#include <map>
#include <string>
#include <utility>

#include "ratkon/errors.hpp"
#include "ratkon/free_group.hpp"
#include "ratkon/rational.hpp"

namespace ratkon {

/// An element of the rational group ring of the free group on g generators:
/// a finite Q-linear combination of reduced words.
///
/// The generator count is a declared property.  Zero means "undeclared": the
/// element works inside any rank that accommodates its letters.  Combining
/// two elements with different nonzero declared ranks is an error.
class GroupRingElement {
 public:
  GroupRingElement() = default;
  explicit GroupRingElement(const Rat& c) { add_term(FreeWord(), c); }
  explicit GroupRingElement(const FreeWord& w, const Rat& c = 1) { add_term(w, c); }

  static GroupRingElement zero(int g = 0) {
    GroupRingElement r;
    r.declared_g_ = g;
    return r;
  }
  static GroupRingElement one(int g = 0) {
    GroupRingElement r(Rat(1));
    r.declared_g_ = g;
    return r;
  }
  static GroupRingElement gen(int i, int exp = 1) { return GroupRingElement(FreeWord::gen(i, exp)); }

  const std::map<FreeWord, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  bool is_scalar() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_identity());
  }

  /// Nonzero only when the element is a single word times a rational.
  bool is_monomial() const { return terms_.size() == 1; }

  int declared_g() const { return declared_g_; }
  void declare_g(int g) {
    if (g < max_gen()) throw mismatched_generators_error("declared rank below used letters");
    declared_g_ = g;
  }
  int max_gen() const {
    int g = 0;
    for (auto& [w, c] : terms_) g = std::max(g, w.max_gen());
    return g;
  }
  /// Effective rank: declared if set, else the largest letter used.
  int g() const { return std::max(declared_g_, max_gen()); }

  void add_term(const FreeWord& w, const Rat& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rat coeff(const FreeWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Rat(0) : it->second;
  }

  friend GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b) {
    GroupRingElement r = a;
    r.declared_g_ = merged_g(a, b);
    for (auto& [w, c] : b.terms_) r.add_term(w, c);
    return r;
  }
  friend GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b) {
    GroupRingElement r = a;
    r.declared_g_ = merged_g(a, b);
    for (auto& [w, c] : b.terms_) r.add_term(w, -c);
    return r;
  }
  friend GroupRingElement operator-(const GroupRingElement& a) {
    GroupRingElement r;
    r.declared_g_ = a.declared_g_;
    for (auto& [w, c] : a.terms_) r.add_term(w, -c);
    return r;
  }
  friend GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) {
    GroupRingElement r;
    r.declared_g_ = merged_g(a, b);
    for (auto& [wa, ca] : a.terms_)
      for (auto& [wb, cb] : b.terms_) r.add_term(wa * wb, ca * cb);
    return r;
  }
  friend GroupRingElement operator*(const Rat& c, const GroupRingElement& a) {
    GroupRingElement r;
    r.declared_g_ = a.declared_g_;
    for (auto& [w, k] : a.terms_) r.add_term(w, c * k);
    return r;
  }
  friend GroupRingElement operator*(const GroupRingElement& a, const Rat& c) { return c * a; }

  GroupRingElement& operator+=(const GroupRingElement& b) { return *this = *this + b; }
  GroupRingElement& operator-=(const GroupRingElement& b) { return *this = *this - b; }
  GroupRingElement& operator*=(const GroupRingElement& b) { return *this = *this * b; }

  /// The involution: anti-automorphism with g -> g^{-1} on group elements and
  /// the identity on rationals.
  GroupRingElement involute() const {
    GroupRingElement r;
    r.declared_g_ = declared_g_;
    for (auto& [w, c] : terms_) r.add_term(w.inverse(), c);
    return r;
  }

  /// Augmentation: t_i -> 1.
  Rat augment() const {
    Rat s = 0;
    for (auto& [w, c] : terms_) s += c;
    return s;
  }

  std::strong_ordering operator<=>(const GroupRingElement& b) const {
    auto i = terms_.begin();
    auto j = b.terms_.begin();
    for (; i != terms_.end() && j != b.terms_.end(); ++i, ++j) {
      if (auto c = i->first <=> j->first; c != 0) return c;
      if (i->second != j->second) return i->second < j->second ? std::strong_ordering::less
                                                               : std::strong_ordering::greater;
    }
    return terms_.size() <=> b.terms_.size();
  }
  bool operator==(const GroupRingElement& b) const { return terms_ == b.terms_; }

  /// e.g. "3 - 2*t1*t2^-1".  Zero renders as "0".
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& [w, c] : terms_) {
      Rat a = c < 0 ? Rat(-c) : c;
      std::string sign = c < 0 ? "-" : "+";
      std::string part;
      if (w.is_identity())
        part = to_string(a);
      else if (a == 1)
        part = w.str();
      else
        part = to_string(a) + "*" + w.str();
      if (out.empty())
        out = (c < 0 ? "-" : "") + part;
      else
        out += " " + sign + " " + part;
    }
    return out;
  }

 private:
  static int merged_g(const GroupRingElement& a, const GroupRingElement& b) {
    if (a.declared_g_ && b.declared_g_ && a.declared_g_ != b.declared_g_)
      throw mismatched_generators_error("mismatched generator count: " +
                                        std::to_string(a.declared_g_) + " vs " +
                                        std::to_string(b.declared_g_));
    return std::max(a.declared_g_, b.declared_g_);
  }

  int declared_g_ = 0;
  std::map<FreeWord, Rat> terms_;
};

}  // namespace ratkon
