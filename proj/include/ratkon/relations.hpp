#pragma once

#include <map>
#include <set>
#include <vector>

#include "ratkon/diagram.hpp"

namespace ratkon {

/// Pushes the word f across internal vertex v: every incident edge gets f
/// appended at its v end, read toward the vertex.  A diagram equals its
/// pushed version in the quotient (vertex invariance).
inline Diagram push_at_vertex(const Diagram& d, int32_t v, const FreeWord& f) {
  Diagram r = d;
  Bead bf = Bead::word(f);
  Bead bfi = Bead::word(f.inverse());
  for (auto& e : r.edges) {
    if (e.b.node == v) e.bead = e.bead * bf;      // read ends at v: append
    if (e.a.node == v) e.bead = bfi * e.bead;     // read starts at v: prepend inverse
  }
  return r;
}

/// IHX rewirings of an internal trivial-bead edge between distinct vertices.
/// With the edge's companion ports (p1, p2) at one end and (p3, p4) at the
/// other (in rotation order after the edge), the relation is I - H + X where
/// H swaps p1 with p3, and X additionally swaps p2 with p3.  This is the
/// Jacobi identity f(a,b,k)f(k,c,d) + f(b,c,k)f(k,a,d) + f(c,a,k)f(k,b,d) = 0
/// written with -H and +X carrying the rotation flips, so the relation is
/// true for every presentation of the diagram, not just a preferred one.
struct IHXTriple {
  Diagram i, h, x;
  bool valid = false;
};

inline IHXTriple ihx_at_edge(const Diagram& d, std::size_t ei) {
  IHXTriple t;
  const Diagram::Edge& e = d.edges[ei];
  if (d.is_leg(e.a.node) || d.is_leg(e.b.node) || e.a.node == e.b.node || !e.bead.is_one())
    return t;
  // Swaps the edge ends sitting at two (vertex, slot) ports, resolving the
  // ports against the diagram being rewired so swaps compose.
  auto swap_ports = [](Diagram& g, std::pair<int32_t, int8_t> x, std::pair<int32_t, int8_t> y) {
    auto port_at = [&g](int32_t node, int8_t slot) -> Diagram::End& {
      for (auto& ed : g.edges) {
        if (ed.a.node == node && ed.a.slot == slot) return ed.a;
        if (ed.b.node == node && ed.b.slot == slot) return ed.b;
      }
      throw error("dangling slot");
    };
    std::swap(port_at(x.first, x.second), port_at(y.first, y.second));
  };
  int32_t u = e.a.node, v = e.b.node;
  auto next_slot = [](int8_t s, int step) { return static_cast<int8_t>((s + step) % 3); };
  std::pair<int32_t, int8_t> p1{u, next_slot(e.a.slot, 1)};
  std::pair<int32_t, int8_t> p2{u, next_slot(e.a.slot, 2)};
  std::pair<int32_t, int8_t> p3{v, next_slot(e.b.slot, 1)};
  std::pair<int32_t, int8_t> p4{v, next_slot(e.b.slot, 2)};
  (void)p4;
  t.i = d;
  t.h = d;
  swap_ports(t.h, p1, p3);
  t.x = d;
  swap_ports(t.x, p1, p3);
  swap_ports(t.x, p2, p3);
  t.valid = true;
  return t;
}

/// Generates relation vectors (as diagram sums) touching the given support:
/// vertex invariance for each internal vertex and generator, and IHX for
/// each eligible internal edge.
inline std::vector<DiagramSum> relation_generators(const Diagram& d, int g, unsigned cap) {
  std::vector<DiagramSum> rels;
  for (int32_t v = static_cast<int32_t>(d.legs.size()); v < d.nodes(); ++v)
    for (int i = 1; i <= g; ++i) {
      DiagramSum r(cap);
      r.add(d, 1);
      r.add(push_at_vertex(d, v, FreeWord::gen(i, 1)), -1);
      if (!r.is_zero()) rels.push_back(std::move(r));
    }
  for (std::size_t ei = 0; ei < d.edges.size(); ++ei) {
    IHXTriple t = ihx_at_edge(d, ei);
    if (!t.valid) continue;
    DiagramSum r(cap);
    r.add(t.i, 1);
    r.add(t.h, -1);
    r.add(t.x, 1);
    if (!r.is_zero()) rels.push_back(std::move(r));
  }
  return rels;
}

/// Tests membership of x in the rational span of the relation generators,
/// growing the generator set from the support of x for `rounds` iterations.
/// Sound for "yes": a true result certifies x == 0 in the quotient by the
/// generated relations.  A false result only means the closure did not find
/// a certificate within the iteration budget.
inline bool zero_mod_relations(const DiagramSum& x, int g, int rounds = 2) {
  if (x.is_zero()) return true;
  std::set<Diagram> support;
  for (auto& [d, c] : x.terms()) support.insert(d);
  std::vector<DiagramSum> rels;
  std::set<Diagram> expanded;
  for (int round = 0; round < rounds; ++round) {
    std::set<Diagram> next = support;
    for (auto& d : support) {
      if (expanded.count(d)) continue;
      expanded.insert(d);
      for (auto& r : relation_generators(d, g, x.cap())) {
        for (auto& [rd, rc] : r.terms()) next.insert(rd);
        rels.push_back(r);
      }
    }
    if (next.size() == support.size() && round > 0) break;
    support = std::move(next);
  }
  // Index the basis.
  std::map<Diagram, std::size_t> index;
  for (auto& d : support) index.emplace(d, index.size());
  for (auto& r : rels)
    for (auto& [d, c] : r.terms())
      index.emplace(d, index.size());
  std::size_t dim = index.size();

  // Row-reduce the relation matrix and reduce x against it.
  std::vector<std::map<std::size_t, Rat>> rows;
  auto reduce = [&](std::map<std::size_t, Rat> vec) {
    for (auto& row : rows) {
      if (vec.empty()) break;
      std::size_t lead = row.begin()->first;
      auto it = vec.find(lead);
      if (it == vec.end()) continue;
      Rat f = it->second / row.begin()->second;
      for (auto& [j, rv] : row) {
        auto jt = vec.find(j);
        Rat nv = (jt == vec.end() ? Rat(0) : jt->second) - f * rv;
        if (nv == 0) {
          if (jt != vec.end()) vec.erase(jt);
        } else {
          vec[j] = nv;
        }
      }
    }
    return vec;
  };
  auto to_vec = [&](const DiagramSum& s) {
    std::map<std::size_t, Rat> v;
    for (auto& [d, c] : s.terms()) v[index.at(d)] = c;
    return v;
  };
  for (auto& r : rels) {
    auto v = reduce(to_vec(r));
    if (!v.empty()) {
      rows.push_back(std::move(v));
      std::sort(rows.begin(), rows.end(),
                [](const auto& a, const auto& b) { return a.begin()->first < b.begin()->first; });
    }
  }
  (void)dim;
  return reduce(to_vec(x)).empty();
}

}  // namespace ratkon
