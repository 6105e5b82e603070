#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "ratkon/errors.hpp"

namespace ratkon {

/// A reduced word in the free group on generators t_1, t_2, ...
///
/// Letters are stored as signed generator indices: +i for t_i, -i for
/// t_i^{-1}.  Every constructor and operation keeps the word reduced, so
/// structural equality is group equality.
class FreeWord {
 public:
  FreeWord() = default;

  /// t_i^exp for i >= 1.
  static FreeWord gen(int i, int exp = 1) {
    if (i < 1) throw error("generator index must be >= 1");
    FreeWord w;
    for (int k = 0; k < std::abs(exp); ++k) w.letters_.push_back(exp > 0 ? i : -i);
    return w;
  }

  static FreeWord from_letters(std::vector<int32_t> letters) {
    FreeWord w;
    for (int32_t l : letters) w.push_letter(l);
    return w;
  }

  const std::vector<int32_t>& letters() const { return letters_; }
  bool is_identity() const { return letters_.empty(); }
  std::size_t length() const { return letters_.size(); }

  int max_gen() const {
    int g = 0;
    for (int32_t l : letters_) g = std::max(g, std::abs(l));
    return g;
  }

  friend FreeWord operator*(const FreeWord& a, const FreeWord& b) {
    FreeWord r = a;
    for (int32_t l : b.letters_) r.push_letter(l);
    return r;
  }

  FreeWord inverse() const {
    FreeWord r;
    r.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) r.letters_.push_back(-*it);
    return r;
  }

  /// The involution of the group ring restricted to group elements: g -> g^{-1}.
  FreeWord involute() const { return inverse(); }

  auto operator<=>(const FreeWord&) const = default;

  /// "1" for the identity, otherwise e.g. "t1*t2^-1*t1^2".
  std::string str() const {
    if (letters_.empty()) return "1";
    std::string out;
    std::size_t i = 0;
    while (i < letters_.size()) {
      std::size_t j = i;
      while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
      int idx = std::abs(letters_[i]);
      int exp = static_cast<int>(j - i) * (letters_[i] > 0 ? 1 : -1);
      if (!out.empty()) out += "*";
      out += "t" + std::to_string(idx);
      if (exp != 1) out += "^" + std::to_string(exp);
      i = j;
    }
    return out;
  }

 private:
  void push_letter(int32_t l) {
    if (l == 0) throw error("zero letter");
    if (!letters_.empty() && letters_.back() == -l)
      letters_.pop_back();
    else
      letters_.push_back(l);
  }

  std::vector<int32_t> letters_;
};

}  // namespace ratkon
