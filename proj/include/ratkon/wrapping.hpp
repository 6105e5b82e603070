#pragma once

#include <string>
#include <vector>

#include "ratkon/gaussian.hpp"
#include "ratkon/hairy.hpp"
#include "ratkon/pairing.hpp"

namespace ratkon {

/// The generator of the infinitesimal wrapping move at `site`: for a sum
/// whose terms each carry exactly one dual wrap leg,
///   con_h( eta_site(D)  -  1/2 D u circle-trace(M^{-1} eta_site(M)) ).
/// The matrix may be empty (trace term absent).
inline DiagramSum wrapping_move(const LocMatrix& M, const DiagramSum& D, int site) {
  for (auto& [d, c] : D.terms()) {
    int duals = 0;
    for (auto& l : d.legs) duals += (l == wrap_color(true));
    if (duals != 1)
      throw wrong_leg_count_error("wrapping move needs exactly one dual wrap leg per term");
  }
  DiagramSum inner = eta_diagrams(D, site);
  if (M.rows > 0) {
    HMatrix t = HMatrix::from_loc(herm_invert(M)) * eta(M, site);
    inner += Rat(-1, 2) * disjoint_union(D, circles_of_h(t.trace(), D.cap()));
  }
  return contract_h(inner);
}

/// Hairy normalization: exp_u(-1/2 wheels(chi'(M))) u hair(s) u the copies
/// of nu recolored to each generator's hair color.  nu uses h1-colored legs
/// as its template; pass the unit sum for the default (trivial) nu.
inline DiagramSum hair_nu(const LocMatrix& M, const DiagramSum& s, const DiagramSum& nu,
                          unsigned budget, int g) {
  DiagramSum out = hair(s, budget);
  if (M.rows > 0) {
    DiagramSum w = wheels_from_cyclic(chi_prime(M, budget), out.cap());
    out = disjoint_union(exp_union(Rat(-1, 2) * w), out);
  }
  for (int i = 1; i <= g; ++i) {
    DiagramSum copy = i == 1 ? nu : recolor_legs(nu, color_of_letter(1), color_of_letter(i));
    out = disjoint_union(out, copy);
  }
  return out;
}

}  // namespace ratkon
