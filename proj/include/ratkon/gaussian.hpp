#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "ratkon/hairy.hpp"
#include "ratkon/pairing.hpp"

namespace ratkon {

/// A Gaussian integrand: a Hermitian covariance over the localization, the
/// base colors its indices refer to, and a substantial part (no covariance-
/// color strut components).
struct Integrand {
  LocMatrix cov;
  std::vector<std::string> bases;
  DiagramSum substantial;

  int index_of(const std::string& base) const {
    for (std::size_t i = 0; i < bases.size(); ++i)
      if (bases[i] == base) return static_cast<int>(i);
    return -1;
  }
};

namespace detail {

/// True when the term contains a strut component joining two plain legs of
/// the given bases.
inline bool has_base_strut(const Diagram& d, const std::set<std::string>& bases) {
  for (auto& e : d.edges) {
    if (!d.is_leg(e.a.node) || !d.is_leg(e.b.node)) continue;
    const Color& ca = d.legs[e.a.node];
    const Color& cb = d.legs[e.b.node];
    if (!ca.dual && !cb.dual && bases.count(ca.base) && bases.count(cb.base)) return true;
  }
  return false;
}

/// Enumerates perfect matchings of the ids, calling f with the pair list.
template <typename F>
void perfect_matchings(std::vector<int32_t> ids, std::vector<std::pair<int32_t, int32_t>>& acc,
                       F&& f) {
  if (ids.empty()) {
    f(acc);
    return;
  }
  int32_t first = ids[0];
  for (std::size_t j = 1; j < ids.size(); ++j) {
    acc.emplace_back(first, ids[j]);
    std::vector<int32_t> rest;
    for (std::size_t k = 1; k < ids.size(); ++k)
      if (k != j) rest.push_back(ids[k]);
    perfect_matchings(std::move(rest), acc, f);
    acc.pop_back();
  }
}

/// Enumerates all partial matchings: every id is either paired or single.
template <typename F>
void partial_matchings(std::vector<int32_t> ids, std::vector<std::pair<int32_t, int32_t>>& pairs,
                       std::vector<int32_t>& singles, F&& f) {
  if (ids.empty()) {
    f(pairs, singles);
    return;
  }
  int32_t first = ids[0];
  std::vector<int32_t> rest(ids.begin() + 1, ids.end());
  singles.push_back(first);
  partial_matchings(rest, pairs, singles, f);
  singles.pop_back();
  for (std::size_t j = 0; j < rest.size(); ++j) {
    pairs.emplace_back(first, rest[j]);
    std::vector<int32_t> rest2;
    for (std::size_t k = 0; k < rest.size(); ++k)
      if (k != j) rest2.push_back(rest[k]);
    partial_matchings(std::move(rest2), pairs, singles, f);
    pairs.pop_back();
  }
}

/// Appends strut gadgets to a diagram and welds their dual legs onto the
/// given targets.  Each gadget is (target of tail weld, target of head weld
/// or -1 to keep the head leg external, tail color, head color, bead).
struct StrutGadget {
  int32_t tail_target = -1;
  int32_t head_target = -1;
  Color tail_color, head_color;
  Bead bead;
};

inline Diagram weld_gadgets(const Diagram& d, const std::vector<StrutGadget>& gs) {
  Diagram u;
  u.legs = d.legs;
  int32_t L = static_cast<int32_t>(d.legs.size());
  int32_t extra = static_cast<int32_t>(2 * gs.size());
  u.n_int = d.n_int;
  for (auto e : d.edges) {
    if (!d.is_leg(e.a.node)) e.a.node += extra;
    if (!d.is_leg(e.b.node)) e.b.node += extra;
    u.edges.push_back(std::move(e));
  }
  u.circles = d.circles;
  std::vector<std::pair<int32_t, int32_t>> welds;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    int32_t tail = L + static_cast<int32_t>(2 * i);
    int32_t head = tail + 1;
    u.legs.push_back(gs[i].tail_color);
    u.legs.push_back(gs[i].head_color);
    u.edges.push_back({{tail, 0}, {head, 0}, gs[i].bead});
    welds.emplace_back(tail, gs[i].tail_target);
    if (gs[i].head_target >= 0) welds.emplace_back(head, gs[i].head_target);
  }
  return weld_pairs(u, welds);
}

}  // namespace detail

/// Throws when the sum contains strut components in the given bases.
inline void check_substantial(const DiagramSum& s, const std::vector<std::string>& bases) {
  std::set<std::string> bs(bases.begin(), bases.end());
  for (auto& [d, c] : s.terms())
    if (detail::has_base_strut(d, bs))
      throw not_substantial_error("sum has covariance-color strut components");
}

/// Integrates the covariance colors out of the substantial part: for every
/// term, the legs of those colors are paired in all ways, a matched pair
/// (p, q) being joined by an edge from q to p beaded with -N_{c(q) c(p)}
/// where N is the covariance inverse.  Terms with an odd number of such legs
/// integrate to zero.
inline DiagramSum integrate(const Integrand& I) {
  check_substantial(I.substantial, I.bases);
  LocMatrix N = herm_invert(I.cov);
  DiagramSum out(I.substantial.cap());
  for (auto& [d, c] : I.substantial.terms()) {
    std::vector<int32_t> xlegs;
    for (int32_t l = 0; l < static_cast<int32_t>(d.legs.size()); ++l)
      if (!d.legs[l].dual && I.index_of(d.legs[l].base) >= 0) xlegs.push_back(l);
    if (xlegs.size() % 2) continue;
    if (xlegs.empty()) {
      out.insert_canonical(d, c);
      continue;
    }
    std::vector<std::pair<int32_t, int32_t>> acc;
    const Diagram& dd = d;
    const Rat cc = c;
    detail::perfect_matchings(xlegs, acc, [&](const std::vector<std::pair<int32_t, int32_t>>& m) {
      // Multilinear strut beads: iterate over entry-term choices per pair.
      std::vector<std::vector<std::pair<Bead, Rat>>> opts;
      for (auto& [p, q] : m) {
#ifdef RATKON_GLUE_ALT
        const LocElement& entry =
            N(static_cast<std::size_t>(I.index_of(dd.legs[p].base)),
              static_cast<std::size_t>(I.index_of(dd.legs[q].base)));
#else
        const LocElement& entry =
            N(static_cast<std::size_t>(I.index_of(dd.legs[q].base)),
              static_cast<std::size_t>(I.index_of(dd.legs[p].base)));
#endif
        opts.push_back(detail::bead_options(entry));
      }
      for (auto& ob : opts)
        if (ob.empty()) return;  // a zero inverse entry kills this matching
      std::vector<std::size_t> pick(m.size(), 0);
      while (true) {
        std::vector<detail::StrutGadget> gs;
        Rat coef = cc;
        for (std::size_t i = 0; i < m.size(); ++i) {
          auto [p, q] = m[i];
#ifdef RATKON_GLUE_ALT
          std::swap(p, q);
#endif
          detail::StrutGadget g;
          g.tail_target = q;
          g.head_target = p;
          g.tail_color = Color{dd.legs[q].base, true};
          g.head_color = Color{dd.legs[p].base, true};
          g.bead = opts[i][pick[i]].first;
          coef *= -opts[i][pick[i]].second;
          gs.push_back(std::move(g));
        }
        if (coef != 0) out.add(detail::weld_gadgets(dd, gs), coef);
        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == opts[k].size()) pick[k++] = 0;
        if (k == pick.size()) break;
      }
    });
  }
  return out;
}

/// Reconstructs the covariance from the strut terms of a sum, normalized by
/// the empty-diagram coefficient r0: the canonical strut (i -> j, bead b)
/// contributes b to M_ij and its conjugate to M_ji; a bare diagonal strut
/// carries half the diagonal's trivial coefficient.
inline LocMatrix read_covariance(const DiagramSum& s, const std::vector<std::string>& bases,
                                 const Rat& r0) {
  std::size_t n = bases.size();
  auto idx = [&](const std::string& b) {
    for (std::size_t i = 0; i < n; ++i)
      if (bases[i] == b) return static_cast<int>(i);
    return -1;
  };
  LocMatrix M(n, n);
  for (auto& [d, c] : s.terms()) {
    if (!d.is_strut()) continue;
    const Diagram::Edge& e = d.edges[0];
    const Color& ct = d.legs[e.a.node];
    const Color& ch = d.legs[e.b.node];
    if (ct.dual || ch.dual) continue;
    int i = idx(ct.base), j = idx(ch.base);
    if (i < 0 || j < 0) continue;
    Rat q = c / r0;
    LocElement v = e.bead.value();
    if (i != j) {
      M(i, j) = M(i, j) + q * v;
      M(j, i) = M(j, i) + q * v.star();
    } else if (e.bead.is_one()) {
      M(i, i) = M(i, i) + LocElement::scalar(2 * q);
    } else {
      M(i, i) = M(i, i) + q * v + q * v.star();
    }
  }
  return M;
}

namespace detail {

/// Removes the edge ei (which must join two legs) together with its two leg
/// nodes, renumbering the remaining nodes.
inline Diagram strip_leg_edge(const Diagram& d, std::size_t ei) {
  const Diagram::Edge& e = d.edges[ei];
  int32_t l1 = std::min(e.a.node, e.b.node), l2 = std::max(e.a.node, e.b.node);
  Diagram r;
  for (int32_t l = 0; l < static_cast<int32_t>(d.legs.size()); ++l)
    if (l != l1 && l != l2) r.legs.push_back(d.legs[l]);
  r.n_int = d.n_int;
  r.circles = d.circles;
  auto remap = [&](Diagram::End x) {
    x.node -= (x.node > l1) + (x.node > l2);
    return x;
  };
  for (std::size_t k = 0; k < d.edges.size(); ++k) {
    if (k == ei) continue;
    r.edges.push_back({remap(d.edges[k].a), remap(d.edges[k].b), d.edges[k].bead});
  }
  return r;
}

/// Reads the covariance from the terms of s that consist of the ground term
/// plus one extra strut component over the given bases, normalized by the
/// ground coefficient c0.
inline LocMatrix read_covariance_against(const DiagramSum& s, const std::vector<std::string>& bases,
                                         const Diagram& ground, const Rat& c0) {
  std::size_t n = bases.size();
  auto idx = [&](const std::string& b) {
    for (std::size_t i = 0; i < n; ++i)
      if (bases[i] == b) return static_cast<int>(i);
    return -1;
  };
  LocMatrix M(n, n);
  for (auto& [d, c] : s.terms()) {
    for (std::size_t ei = 0; ei < d.edges.size(); ++ei) {
      const Diagram::Edge& e = d.edges[ei];
      if (!d.is_leg(e.a.node) || !d.is_leg(e.b.node)) continue;
      const Color& ct = d.legs[e.a.node];
      const Color& ch = d.legs[e.b.node];
      if (ct.dual || ch.dual) continue;
      int i = idx(ct.base), j = idx(ch.base);
      if (i < 0 || j < 0) continue;
      auto [rest, sign] = canonicalize(strip_leg_edge(d, ei));
      if (sign == 0 || !(rest == ground)) continue;
      Rat q = c * sign / c0;
      LocElement v = e.bead.value();
      if (i != j) {
        M(i, j) = M(i, j) + q * v;
        M(j, i) = M(j, i) + q * v.star();
      } else if (e.bead.is_one()) {
        M(i, i) = M(i, i) + LocElement::scalar(2 * q);
      } else {
        M(i, i) = M(i, i) + q * v + q * v.star();
      }
      break;  // a term matches the ground through at most one strut
    }
  }
  return M;
}

}  // namespace detail

/// Restores the structural Hermitian storage of a matrix that is Hermitian
/// by value: the lower triangle becomes the star of the upper and the
/// diagonal is symmetrized.
inline LocMatrix herm_project(const LocMatrix& m) {
  LocMatrix r = m;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (!r(i, i).is_polynomial()) r(i, i) = herm_symmetrize(r(i, i));
    for (std::size_t j = i + 1; j < m.cols; ++j) r(j, i) = r(i, j).star();
  }
  return r;
}

/// Splits a sum into a Gaussian exponential of struts and a substantial
/// remainder: s = exp_u(1/2 struts(M)) u R, compared after truncating to at
/// most `order` legs of the covariance bases.  Throws non_integrable_error
/// when no such decomposition matches and not_substantial_error when the
/// unit coefficient vanishes.
inline Integrand decompose(const DiagramSum& s, const std::vector<std::string>& bases,
                           int order) {
  if (s.is_zero()) throw not_substantial_error("decompose: the zero sum has no ground term");
  std::set<std::string> bs(bases.begin(), bases.end());
  // Ground term: the first term of minimal covariance-leg count.  It belongs
  // to the substantial remainder, so it must not carry a covariance strut.
  int m0 = -1;
  const Diagram* ground = nullptr;
  Rat c0;
  for (auto& [d, c] : s.terms()) {
    int k = count_legs_with_bases(d, bases);
    if (m0 < 0 || k < m0) {
      m0 = k;
      ground = &d;
      c0 = c;
    }
  }
  if (detail::has_base_strut(*ground, bs))
    throw non_integrable_error("decompose: minimal term carries a covariance strut");
  LocMatrix M = detail::read_covariance_against(s, bases, *ground, c0);

  DiagramSum G(s.cap());
  for (std::size_t i = 0; i < M.rows; ++i)
    for (std::size_t j = 0; j < M.cols; ++j) {
      if (M(i, j).is_zero()) continue;
      G += strut_sum(Color{bases[i], false}, Color{bases[j], false}, M(i, j), s.cap(), Rat(1, 2));
    }

  DiagramSum R(s.cap());
  if (G.is_zero()) {
    for (auto& [d, c] : s.terms())
      if (!detail::has_base_strut(d, bs)) R.insert_canonical(d, c);
  } else {
    DiagramSum prod = disjoint_union(s, exp_union(Rat(-1) * G, order));
    for (auto& [d, c] : prod.terms())
      if (!detail::has_base_strut(d, bs) && count_legs_with_bases(d, bases) <= order)
        R.insert_canonical(d, c);
  }

  DiagramSum lhs = truncate_by_legs(s, bases, order);
  DiagramSum rhs =
      truncate_by_legs(G.is_zero() ? R : disjoint_union(exp_union(G, order), R), bases, order);
  if (!(lhs == rhs))
    throw non_integrable_error("decompose: sum is not Gaussian with substantial remainder");
  return Integrand{M, bases, R};
}

/// Integrates out a subset of the covariance colors, leaving an integrand in
/// the remaining ones.  The new covariance is the Schur complement
/// B - C* A^{-1} C; in the substantial part the integrated-out legs either
/// pair through -A^{-1} or turn into kept-color legs through -(A^{-1} C).
inline Integrand integrate_partial(const Integrand& I, const std::vector<std::string>& out_bases) {
  std::vector<std::size_t> ai, bi;
  for (std::size_t k = 0; k < I.bases.size(); ++k) {
    if (std::find(out_bases.begin(), out_bases.end(), I.bases[k]) != out_bases.end())
      ai.push_back(k);
    else
      bi.push_back(k);
  }
  if (ai.size() != out_bases.size()) throw error("integrate_partial: unknown base color");
  LocMatrix A(ai.size(), ai.size()), B(bi.size(), bi.size()), C(ai.size(), bi.size());
  for (std::size_t i = 0; i < ai.size(); ++i)
    for (std::size_t j = 0; j < ai.size(); ++j) A(i, j) = I.cov(ai[i], ai[j]);
  for (std::size_t i = 0; i < bi.size(); ++i)
    for (std::size_t j = 0; j < bi.size(); ++j) B(i, j) = I.cov(bi[i], bi[j]);
  for (std::size_t i = 0; i < ai.size(); ++i)
    for (std::size_t j = 0; j < bi.size(); ++j) C(i, j) = I.cov(ai[i], bi[j]);

  LocMatrix Ainv = herm_invert(A);
  LocMatrix AinvC = Ainv * C;
  LocMatrix schur = herm_project(B - C.star() * AinvC);

  std::vector<std::string> kept;
  for (std::size_t k : bi) kept.push_back(I.bases[k]);

  auto a_index = [&](const std::string& base) {
    for (std::size_t i = 0; i < ai.size(); ++i)
      if (I.bases[ai[i]] == base) return static_cast<int>(i);
    return -1;
  };

  DiagramSum sub(I.substantial.cap());
  for (auto& [d, c] : I.substantial.terms()) {
    std::vector<int32_t> alegs;
    for (int32_t l = 0; l < static_cast<int32_t>(d.legs.size()); ++l)
      if (!d.legs[l].dual && a_index(d.legs[l].base) >= 0) alegs.push_back(l);
    if (alegs.empty()) {
      sub.insert_canonical(d, c);
      continue;
    }
    std::vector<std::pair<int32_t, int32_t>> pairs;
    std::vector<int32_t> singles;
    const Diagram& dd = d;
    const Rat cc = c;
    detail::partial_matchings(
        alegs, pairs, singles,
        [&](const std::vector<std::pair<int32_t, int32_t>>& ps, const std::vector<int32_t>& ss) {
          // Options per gadget: pairs use -A^{-1}, singles use -(A^{-1} C)
          // against every kept color.
          struct GadgetChoice {
            std::vector<detail::StrutGadget> gs;
            Rat coef;
          };
          std::vector<GadgetChoice> partial{{{}, cc}};
          for (auto& [p, q] : ps) {
            int iq = a_index(dd.legs[q].base), ip = a_index(dd.legs[p].base);
            auto opts = detail::bead_options(Ainv(iq, ip));
            std::vector<GadgetChoice> next;
            for (auto& pc : partial)
              for (auto& [bead, w] : opts) {
                GadgetChoice g = pc;
                detail::StrutGadget sg;
                sg.tail_target = q;
                sg.head_target = p;
                sg.tail_color = Color{dd.legs[q].base, true};
                sg.head_color = Color{dd.legs[p].base, true};
                sg.bead = bead;
                g.gs.push_back(std::move(sg));
                g.coef *= -w;
                next.push_back(std::move(g));
              }
            partial = std::move(next);
          }
          for (int32_t l : ss) {
            int ia = a_index(dd.legs[l].base);
            std::vector<GadgetChoice> next;
            for (auto& pc : partial)
              for (std::size_t j = 0; j < bi.size(); ++j) {
                if (AinvC(ia, j).is_zero()) continue;
                for (auto& [bead, w] : detail::bead_options(AinvC(ia, j))) {
                  GadgetChoice g = pc;
                  detail::StrutGadget sg;
                  sg.tail_target = l;
                  sg.head_target = -1;  // stays an external leg
                  sg.tail_color = Color{dd.legs[l].base, true};
                  sg.head_color = Color{kept[j], false};
                  sg.bead = bead;
                  g.gs.push_back(std::move(sg));
                  g.coef *= -w;
                  next.push_back(std::move(g));
                }
              }
            partial = std::move(next);
          }
          for (auto& pc : partial)
            if (pc.coef != 0) sub.add(detail::weld_gadgets(dd, pc.gs), pc.coef);
        });
  }
  return Integrand{schur, kept, sub};
}

}  // namespace ratkon
