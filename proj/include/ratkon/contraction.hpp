#pragma once

#include <vector>

#include "ratkon/gaussian.hpp"

namespace ratkon {

/// Surgery data for a complete contraction: n claspers contribute 2n
/// trivalent vortices with 3 leaves each; lk[p][q] is the equivariant
/// linking of leaves p and q (6n of them), with lk[q][p] its conjugate.
struct ClasperSpec {
  int n = 0;
  std::vector<std::vector<GroupRingElement>> lk;

  int leaves() const { return 6 * n; }

  void validate() const {
    if (n <= 0) throw error("clasper spec needs n >= 1");
    std::size_t m = static_cast<std::size_t>(leaves());
    if (lk.size() != m) throw error("linking table has wrong size");
    for (auto& row : lk)
      if (row.size() != m) throw error("linking table has wrong size");
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p; q < m; ++q)
        if (!(lk[q][p] == lk[p][q].involute()))
          throw non_hermitian_error("linking table is not conjugate-symmetric");
  }
};

/// The complete contraction: all perfect matchings of the 6n leaves, a
/// matched pair (p, q) becoming an edge from p's vortex port to q's beaded
/// with lk[p][q].  Leaf i sits at slot i%3 of vortex i/3.
inline DiagramSum complete_contraction(const ClasperSpec& spec, unsigned cap) {
  spec.validate();
  DiagramSum out(cap);
  std::vector<int32_t> ids(static_cast<std::size_t>(spec.leaves()));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int32_t>(i);
  std::vector<std::pair<int32_t, int32_t>> acc;
  detail::perfect_matchings(ids, acc, [&](const std::vector<std::pair<int32_t, int32_t>>& m) {
    // Multilinear in each linking entry.
    std::vector<std::vector<std::pair<Bead, Rat>>> opts;
    for (auto& [p, q] : m) {
      std::vector<std::pair<Bead, Rat>> o;
      for (auto& [w, c] : spec.lk[p][q].terms()) o.emplace_back(Bead::word(w), c);
      if (o.empty()) return;  // a zero linking kills the matching
      opts.push_back(std::move(o));
    }
    std::vector<std::size_t> pick(m.size(), 0);
    while (true) {
      Diagram d;
      d.n_int = 2 * spec.n;
      Rat coef = 1;
      for (std::size_t i = 0; i < m.size(); ++i) {
        auto [p, q] = m[i];
        d.edges.push_back({{p / 3, static_cast<int8_t>(p % 3)},
                           {q / 3, static_cast<int8_t>(q % 3)},
                           opts[i][pick[i]].first});
        coef *= opts[i][pick[i]].second;
      }
      if (coef != 0) out.add(d, coef);
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == opts[k].size()) pick[k++] = 0;
      if (k == pick.size()) break;
    }
  });
  return out;
}

/// The number of perfect matchings of 2k points: (2k-1)!!.
inline Int double_factorial_odd(int k) {
  Int r = 1;
  for (int i = 2 * k - 1; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace ratkon
