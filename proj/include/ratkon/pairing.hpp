#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "ratkon/diagram.hpp"

namespace ratkon {

namespace detail {

/// The unique edge end attached to each leg: (edge index, true when the leg
/// is end a).
inline std::vector<std::pair<int32_t, bool>> leg_ends(const Diagram& d) {
  std::vector<std::pair<int32_t, bool>> ends(d.legs.size(), {-1, false});
  for (int32_t ei = 0; ei < static_cast<int32_t>(d.edges.size()); ++ei) {
    const Diagram::Edge& e = d.edges[ei];
    if (d.is_leg(e.a.node)) ends[e.a.node] = {ei, true};
    if (d.is_leg(e.b.node)) ends[e.b.node] = {ei, false};
  }
  for (auto& [ei, atA] : ends)
    if (ei < 0) throw error("leg without an edge");
  return ends;
}

}  // namespace detail

/// Welds the given leg pairs simultaneously.  In each pair the first leg is
/// the dual-colored one; colors must match base-for-base.  Edges meeting at a
/// weld merge into one edge whose bead is the path reading from the dual
/// side's interior end; chains of welded struts closing on themselves become
/// beaded circles.  The result is raw (not canonical).
inline Diagram weld_pairs(const Diagram& d, const std::vector<std::pair<int32_t, int32_t>>& pairs) {
  auto ends = detail::leg_ends(d);
  std::vector<int32_t> partner(d.legs.size(), -1);
  for (auto& [u, v] : pairs) {
    if (u == v || u < 0 || v < 0 || !d.is_leg(u) || !d.is_leg(v)) throw error("bad weld pair");
    if (partner[u] != -1 || partner[v] != -1) throw error("leg welded twice");
    if (!d.legs[u].dual || d.legs[v].dual || d.legs[u].base != d.legs[v].base)
      throw error("weld pair colors do not match (need dual vs plain, same base)");
    partner[u] = v;
    partner[v] = u;
  }

  Diagram out;
  out.circles = d.circles;
  out.n_int = d.n_int;
  // Surviving legs keep their relative order; internal vertices shift.
  std::vector<int32_t> node_map(d.nodes(), -1);
  for (int32_t l = 0; l < static_cast<int32_t>(d.legs.size()); ++l)
    if (partner[l] == -1) {
      node_map[l] = static_cast<int32_t>(out.legs.size());
      out.legs.push_back(d.legs[l]);
    }
  for (int32_t v = static_cast<int32_t>(d.legs.size()); v < d.nodes(); ++v)
    node_map[v] = static_cast<int32_t>(out.legs.size()) + (v - static_cast<int32_t>(d.legs.size()));

  // Walk maximal chains of edges linked through welded legs.
  std::vector<char> visited(d.edges.size(), 0);
  auto end_of = [&](int32_t ei, bool head) -> const Diagram::End& {
    return head ? d.edges[ei].b : d.edges[ei].a;
  };
  // Reading of the edge when traversed from the given end to the other.
  auto read_from = [&](int32_t ei, bool from_a) {
    return from_a ? d.edges[ei].bead : d.edges[ei].bead.involute();
  };

  auto walk = [&](int32_t ei, bool enter_at_a) {
    // Traverses from the given end, following welds; returns the final end
    // and accumulates the bead product; marks edges visited.
    Bead bead = Bead::one();
    int32_t cur = ei;
    bool at_a = enter_at_a;
    while (true) {
      visited[cur] = 1;
      bead = bead * read_from(cur, at_a);
      const Diagram::End& exit = end_of(cur, at_a);  // the end we arrive at
      if (!d.is_leg(exit.node) || partner[exit.node] == -1)
        return std::tuple<Bead, Diagram::End, bool>{bead, exit, false};
      int32_t nxt = ends[partner[exit.node]].first;
      bool nxt_at_a = ends[partner[exit.node]].second;
      if (visited[nxt]) {  // closed a cycle
        return std::tuple<Bead, Diagram::End, bool>{bead, exit, true};
      }
      cur = nxt;
      at_a = nxt_at_a;
    }
  };

  for (int32_t ei = 0; ei < static_cast<int32_t>(d.edges.size()); ++ei) {
    if (visited[ei]) continue;
    const Diagram::Edge& e = d.edges[ei];
    bool a_anchor = !d.is_leg(e.a.node) || partner[e.a.node] == -1;
    bool b_anchor = !d.is_leg(e.b.node) || partner[e.b.node] == -1;
    if (a_anchor || b_anchor) {
      // Start from an anchor end and walk across to the other anchor.  When
      // exactly one end is a welded dual leg, start from the side that makes
      // the dual interior the tail.
      bool from_a = a_anchor;
      if (a_anchor && b_anchor) from_a = true;
      const Diagram::End start = from_a ? e.a : e.b;
      auto [bead, fin, cycle] = walk(ei, from_a);
      if (cycle) throw error("weld chain inconsistency");
      Diagram::Edge ne;
      ne.a = {node_map[start.node], start.slot};
      ne.b = {node_map[fin.node], fin.slot};
      ne.bead = bead;
      out.edges.push_back(std::move(ne));
    }
  }
  // Remaining unvisited edges belong to closed cycles of welded struts.
  for (int32_t ei = 0; ei < static_cast<int32_t>(d.edges.size()); ++ei) {
    if (visited[ei]) continue;
    auto [bead, fin, cycle] = walk(ei, true);
    if (!cycle) throw error("weld chain inconsistency");
    out.circles.push_back(bead);
  }
  return out;
}

namespace detail {

/// Enumerates injective assignments of the duals into the plains (all of the
/// duals, some of the plains), appending pairs to acc.  When `all_plains` is
/// set the map must also be surjective (a bijection).
template <typename F>
void for_each_assignment(const std::vector<int32_t>& duals, const std::vector<int32_t>& plains,
                         bool all_plains, std::size_t at, std::vector<char>& used,
                         std::vector<std::pair<int32_t, int32_t>>& acc, F&& f) {
  if (at == duals.size()) {
    f();
    return;
  }
  for (std::size_t j = 0; j < plains.size(); ++j) {
    if (used[j]) continue;
    used[j] = 1;
    acc.emplace_back(duals[at], plains[j]);
    for_each_assignment(duals, plains, all_plains, at + 1, used, acc, f);
    acc.pop_back();
    used[j] = 0;
  }
}

struct BaseLegs {
  std::vector<int32_t> duals, plains;
};

/// Enumerates the combined pairings over several bases, calling f with the
/// full pair list.  Returns false (without calling f) when some base cannot
/// pair all of its duals, or, under `all_plains`, when counts differ.
template <typename F>
bool for_each_pairing(const std::vector<BaseLegs>& groups, bool all_plains, F&& f) {
  for (auto& g : groups) {
    if (g.duals.size() > g.plains.size()) return false;
    if (all_plains && g.duals.size() != g.plains.size()) return false;
  }
  std::vector<std::pair<int32_t, int32_t>> acc;
  auto rec = [&](auto&& self, std::size_t gi) -> void {
    if (gi == groups.size()) {
      f(acc);
      return;
    }
    std::vector<char> used(groups[gi].plains.size(), 0);
    for_each_assignment(groups[gi].duals, groups[gi].plains, all_plains, 0, used, acc,
                        [&] { self(self, gi + 1); });
  };
  rec(rec, 0);
  return true;
}

/// Legs of d with the given base, split dual/plain, restricted to leg ids in
/// [lo, hi).
inline BaseLegs base_legs(const Diagram& d, const std::string& base, int32_t lo, int32_t hi) {
  BaseLegs g;
  for (int32_t l = lo; l < hi && l < static_cast<int32_t>(d.legs.size()); ++l) {
    if (d.legs[l].base != base) continue;
    (d.legs[l].dual ? g.duals : g.plains).push_back(l);
  }
  return g;
}

}  // namespace detail

/// Contracts a color within each term: glues every dual-colored leg of the
/// base to a plain leg of the same base, summing over all bijections.  Terms
/// where the counts differ contribute zero.
inline DiagramSum contract_color(const DiagramSum& s, const std::string& base) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms()) {
    detail::BaseLegs g = detail::base_legs(d, base, 0, static_cast<int32_t>(d.legs.size()));
    if (g.duals.empty() && g.plains.empty()) {
      r.insert_canonical(d, c);
      continue;
    }
    const Diagram& dd = d;
    const Rat& cc = c;
    detail::for_each_pairing({g}, true, [&](const std::vector<std::pair<int32_t, int32_t>>& pairs) {
      r.add(weld_pairs(dd, pairs), cc);
    });
  }
  return r;
}

/// Contraction of the wrapping color h.
inline DiagramSum contract_h(const DiagramSum& s) { return contract_color(s, "h"); }

namespace detail {

/// Shared worker for the two-argument gluings: pairs dual legs of the left
/// factor with plain legs of the right factor over the given bases.
inline DiagramSum glue_sides(const DiagramSum& A, const DiagramSum& B,
                             const std::vector<std::string>& bases, bool all_plains) {
  DiagramSum r(std::min(A.cap(), B.cap()));
  for (auto& [da, ca] : A.terms())
    for (auto& [db, cb] : B.terms()) {
      if (static_cast<unsigned>(da.degree() + db.degree()) > r.cap()) continue;
      Diagram u = disjoint_union_raw(da, db);
      int32_t la = static_cast<int32_t>(da.legs.size());
      int32_t lu = static_cast<int32_t>(u.legs.size());
      std::vector<BaseLegs> groups;
      for (auto& b : bases) {
        BaseLegs g;
        g.duals = base_legs(u, b, 0, la).duals;
        g.plains = base_legs(u, b, la, lu).plains;
        groups.push_back(std::move(g));
      }
      Rat c = ca * cb;
      for_each_pairing(groups, all_plains,
                       [&](const std::vector<std::pair<int32_t, int32_t>>& pairs) {
                         r.add(weld_pairs(u, pairs), c);
                       });
    }
  return r;
}

}  // namespace detail

/// Pairs ALL dual legs of the left factor with ALL plain legs of the right
/// factor, base for base (term pairs with mismatched counts contribute zero).
inline DiagramSum pair_all(const DiagramSum& A, const DiagramSum& B,
                           const std::vector<std::string>& bases) {
  return detail::glue_sides(A, B, bases, true);
}

/// Flat gluing: pairs ALL dual legs of the left factor with SOME plain legs
/// of the right factor (injectively); the right factor's surplus legs stay.
inline DiagramSum flat_glue(const DiagramSum& A, const DiagramSum& B,
                            const std::vector<std::string>& bases) {
  return detail::glue_sides(A, B, bases, false);
}

/// Divergence: within each term, pairs ALL dual legs of the given bases with
/// SOME of the term's own plain legs of those bases.  Requires the sum to be
/// substantial for the bases (no strut with both legs drawn from the bases or
/// their duals).
inline DiagramSum divergence(const DiagramSum& s, const std::vector<std::string>& bases) {
  std::set<std::string> bset(bases.begin(), bases.end());
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms()) {
    for (auto& e : d.edges)
      if (d.is_leg(e.a.node) && d.is_leg(e.b.node) && bset.count(d.legs[e.a.node].base) &&
          bset.count(d.legs[e.b.node].base))
        throw not_substantial_error("divergence of a sum with a strut on the integration colors");
    std::vector<detail::BaseLegs> groups;
    for (auto& b : bases)
      groups.push_back(detail::base_legs(d, b, 0, static_cast<int32_t>(d.legs.size())));
    const Diagram& dd = d;
    const Rat& cc = c;
    detail::for_each_pairing(groups, false,
                             [&](const std::vector<std::pair<int32_t, int32_t>>& pairs) {
                               r.add(weld_pairs(dd, pairs), cc);
                             });
  }
  return r;
}

}  // namespace ratkon
