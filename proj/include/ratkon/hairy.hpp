#pragma once

#include <vector>

#include "ratkon/diagram.hpp"
#include "ratkon/hring.hpp"

namespace ratkon {

namespace detail {

/// A weighted bead choice: polynomial localized elements split into one bead
/// per group word (beads are multilinear); presentations stay atomic.
inline std::vector<std::pair<Bead, Rat>> bead_options(const LocElement& x) {
  std::vector<std::pair<Bead, Rat>> opts;
  if (x.is_polynomial()) {
    for (auto& [w, c] : x.gr().terms()) opts.emplace_back(Bead::word(w), c);
  } else {
    opts.emplace_back(Bead::atom(x), Rat(1));
  }
  return opts;
}

/// A spliced replacement for one edge: new legs inserted along the edge with
/// arc beads between them (arcs.size() == legs.size() + 1).
struct Splice {
  std::vector<Bead> arcs;
  std::vector<Color> legs;
  Rat coef;
};

/// A spliced replacement for a circle: arcs[t] joins leg t to leg t+1 (mod);
/// with no legs the circle is just the single bead arcs[0].
struct CircleSplice {
  std::vector<Bead> arcs;  // size legs.size(), or 1 when legs is empty
  std::vector<Color> legs;
  Rat coef;
};

/// The identity splice (keeps the bead, adds nothing).
inline Splice identity_splice(const Bead& b) { return Splice{{b}, {}, Rat(1)}; }
inline CircleSplice identity_circle_splice(const Bead& b) {
  return CircleSplice{{b}, {}, Rat(1)};
}

/// Splices from a hair expansion word: trivial arcs, one leg per letter.
inline Splice hair_splice(const NCWord& w, const Rat& c) {
  Splice s;
  s.coef = c;
  for (NCLetter l : w) s.legs.push_back(color_of_letter(l));
  s.arcs.assign(w.size() + 1, Bead::one());
  return s;
}

/// Merges factors across zero h-powers so runs are strictly positive.
inline HTerm normalize_hterm(const HTerm& t) {
  HTerm r;
  r.c = t.c;
  r.fs.push_back(t.fs[0]);
  for (std::size_t i = 0; i < t.hs.size(); ++i) {
    if (t.hs[i] == 0) {
      r.fs.back() = r.fs.back() * t.fs[i + 1];
    } else {
      r.hs.push_back(t.hs[i]);
      r.fs.push_back(t.fs[i + 1]);
    }
  }
  return r;
}

/// All splices of an H-ring term: the h-powers become runs of wrap-colored
/// legs; the localized factors become arc beads (split multilinearly).
inline void hterm_splices(const HTerm& raw, std::vector<Splice>& out) {
  HTerm t = normalize_hterm(raw);
  std::vector<std::vector<std::pair<Bead, Rat>>> opts;
  for (auto& f : t.fs) opts.push_back(bead_options(f));
  for (auto& ob : opts)
    if (ob.empty()) return;  // a zero factor kills the term
  std::vector<std::size_t> pick(opts.size(), 0);
  while (true) {
    Splice s;
    s.coef = t.c;
    s.arcs.push_back(opts[0][pick[0]].first);
    s.coef *= opts[0][pick[0]].second;
    for (std::size_t i = 0; i < t.hs.size(); ++i) {
      for (unsigned m = 0; m < t.hs[i]; ++m) {
        s.legs.push_back(wrap_color());
        if (m + 1 < t.hs[i]) s.arcs.push_back(Bead::one());
      }
      s.arcs.push_back(opts[i + 1][pick[i + 1]].first);
      s.coef *= opts[i + 1][pick[i + 1]].second;
    }
    if (s.coef != 0) out.push_back(std::move(s));
    // next combination
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == opts[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
}

/// All circle splices of an H-ring term placed cyclically: the trailing and
/// leading factors merge across the wrap.
inline void hterm_circle_splices(const HTerm& raw, std::vector<CircleSplice>& out) {
  HTerm t = normalize_hterm(raw);
  std::vector<std::vector<std::pair<Bead, Rat>>> opts;
  for (auto& f : t.fs) opts.push_back(bead_options(f));
  for (auto& ob : opts)
    if (ob.empty()) return;  // a zero factor kills the term
  std::vector<std::size_t> pick(opts.size(), 0);
  while (true) {
    CircleSplice s;
    s.coef = t.c;
    std::vector<Bead> chosen;
    for (std::size_t i = 0; i < opts.size(); ++i) {
      chosen.push_back(opts[i][pick[i]].first);
      s.coef *= opts[i][pick[i]].second;
    }
    if (t.h_degree() == 0) {
      s.arcs.push_back(chosen[0]);
    } else {
      // legs around the circle; arc after the last leg wraps as f_k * f_0
      for (std::size_t i = 0; i < t.hs.size(); ++i) {
        for (unsigned m = 0; m < t.hs[i]; ++m) {
          s.legs.push_back(wrap_color());
          bool last_leg_of_term = (i + 1 == t.hs.size()) && (m + 1 == t.hs[i]);
          if (last_leg_of_term)
            s.arcs.push_back(chosen.back() * chosen.front());
          else if (m + 1 < t.hs[i])
            s.arcs.push_back(Bead::one());
          else
            s.arcs.push_back(chosen[i + 1]);
        }
      }
    }
    if (s.coef != 0) out.push_back(std::move(s));
    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == opts[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
}

/// Materializes a term after choosing a splice for every edge and circle.
inline Diagram materialize_splices(const Diagram& d, const std::vector<const Splice*>& es,
                                   const std::vector<const CircleSplice*>& cs) {
  int32_t L = static_cast<int32_t>(d.legs.size());
  int32_t NL = 0;
  for (auto* s : es) NL += static_cast<int32_t>(s->legs.size());
  for (auto* s : cs) NL += static_cast<int32_t>(s->legs.size());
  Diagram r;
  r.legs = d.legs;
  r.n_int = d.n_int + NL;  // one new vertex per new leg
  int32_t next_leg = L;
  int32_t next_vert = L + NL + d.n_int;
  auto map_node = [&](int32_t v) { return d.is_leg(v) ? v : v + NL; };

  for (std::size_t ei = 0; ei < d.edges.size(); ++ei) {
    const Diagram::Edge& e = d.edges[ei];
    const Splice& s = *es[ei];
    int T = static_cast<int>(s.legs.size());
    Diagram::End a{map_node(e.a.node), e.a.slot};
    Diagram::End b{map_node(e.b.node), e.b.slot};
    if (T == 0) {
      r.edges.push_back({a, b, s.arcs[0]});
      continue;
    }
    std::vector<int32_t> verts(T), legs(T);
    for (int t = 0; t < T; ++t) {
      verts[t] = next_vert++;
      legs[t] = next_leg++;
      r.legs.push_back(s.legs[t]);
    }
    r.edges.push_back({a, {verts[0], 0}, s.arcs[0]});
    for (int t = 0; t + 1 < T; ++t)
      r.edges.push_back({{verts[t], 1}, {verts[t + 1], 0}, s.arcs[t + 1]});
    r.edges.push_back({{verts[T - 1], 1}, b, s.arcs[T]});
    for (int t = 0; t < T; ++t) r.edges.push_back({{verts[t], 2}, {legs[t], 0}, Bead::one()});
  }

  for (std::size_t ci = 0; ci < d.circles.size(); ++ci) {
    const CircleSplice& s = *cs[ci];
    int T = static_cast<int>(s.legs.size());
    if (T == 0) {
      r.circles.push_back(s.arcs[0]);
      continue;
    }
    std::vector<int32_t> verts(T), legs(T);
    for (int t = 0; t < T; ++t) {
      verts[t] = next_vert++;
      legs[t] = next_leg++;
      r.legs.push_back(s.legs[t]);
    }
    for (int t = 0; t < T; ++t) {
      r.edges.push_back({{verts[t], 1}, {verts[(t + 1) % T], 0}, s.arcs[t]});
      r.edges.push_back({{verts[t], 2}, {legs[t], 0}, Bead::one()});
    }
  }
  return r;
}

/// Sums over splice choices for all edges and circles, respecting a shared
/// budget on the number of inserted legs.
inline void assemble_spliced(const Diagram& d, const Rat& coef,
                             const std::vector<std::vector<Splice>>& edge_opts,
                             const std::vector<std::vector<CircleSplice>>& circ_opts,
                             unsigned leg_budget, DiagramSum& out) {
  std::vector<const Splice*> es(d.edges.size(), nullptr);
  std::vector<const CircleSplice*> cs(d.circles.size(), nullptr);
  auto rec = [&](auto&& self, std::size_t idx, unsigned used, Rat c) -> void {
    if (idx < d.edges.size()) {
      for (const Splice& s : edge_opts[idx]) {
        unsigned u = used + static_cast<unsigned>(s.legs.size());
        if (u > leg_budget) continue;
        es[idx] = &s;
        self(self, idx + 1, u, c * s.coef);
      }
      return;
    }
    std::size_t ci = idx - d.edges.size();
    if (ci < d.circles.size()) {
      for (const CircleSplice& s : circ_opts[ci]) {
        unsigned u = used + static_cast<unsigned>(s.legs.size());
        if (u > leg_budget) continue;
        cs[ci] = &s;
        self(self, idx + 1, u, c * s.coef);
      }
      return;
    }
    out.add(materialize_splices(d, es, cs), c);
  };
  rec(rec, 0, 0, coef);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hair.

/// Replaces every bead by its truncated expansion: each expansion letter
/// becomes a new leg (colored h1, h2, ... by generator) on a new rim vertex
/// with rotation (incoming arc, outgoing arc, leg).  The budget bounds the
/// total number of inserted legs per term.  All resulting beads are trivial.
inline DiagramSum hair(const DiagramSum& s, unsigned budget) {
  DiagramSum out(s.cap());
  for (auto& [d, c] : s.terms()) {
    std::vector<std::vector<detail::Splice>> eo(d.edges.size());
    std::vector<std::vector<detail::CircleSplice>> co(d.circles.size());
    bool dead = false;
    for (std::size_t i = 0; i < d.edges.size() && !dead; ++i) {
      NCSeries x = d.edges[i].bead.expand(budget);
      for (auto& [w, cw] : x.terms()) eo[i].push_back(detail::hair_splice(w, cw));
      dead = eo[i].empty();
    }
    for (std::size_t i = 0; i < d.circles.size() && !dead; ++i) {
      NCSeries x = d.circles[i].expand(budget);
      for (auto& [w, cw] : x.terms()) {
        detail::Splice sp = detail::hair_splice(w, cw);
        detail::CircleSplice csp;
        csp.coef = sp.coef;
        csp.legs = sp.legs;
        if (csp.legs.empty())
          csp.arcs.push_back(Bead::one());
        else
          csp.arcs.assign(csp.legs.size(), Bead::one());
        co[i].push_back(std::move(csp));
      }
      dead = co[i].empty();
    }
    if (dead) continue;
    detail::assemble_spliced(d, c, eo, co, budget, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The wrapping conjugation and its derivation on diagrams.

/// phi at `site`: applies t_site -> e^{-h} t_site e^{h} to every bead, the
/// h-letters becoming wrap-colored legs; truncated at `hcap` h-legs per term.
inline DiagramSum phi_diagrams(const DiagramSum& s, int site, unsigned hcap) {
  DiagramSum out(s.cap());
  for (auto& [d, c] : s.terms()) {
    std::vector<std::vector<detail::Splice>> eo(d.edges.size());
    std::vector<std::vector<detail::CircleSplice>> co(d.circles.size());
    bool dead = false;
    for (std::size_t i = 0; i < d.edges.size() && !dead; ++i) {
      HElement x = phi_conj(HElement(d.edges[i].bead.value()), site, hcap);
      for (auto& t : x.terms()) detail::hterm_splices(t, eo[i]);
      dead = eo[i].empty();
    }
    for (std::size_t i = 0; i < d.circles.size() && !dead; ++i) {
      HElement x = phi_conj(HElement(d.circles[i].value()), site, hcap);
      for (auto& t : x.terms()) detail::hterm_circle_splices(t, co[i]);
      dead = co[i].empty();
    }
    if (dead) continue;
    detail::assemble_spliced(d, c, eo, co, hcap, out);
  }
  return out;
}

/// eta at `site` on diagrams: the Leibniz derivation that replaces one bead
/// at a time by its eta image (one wrap-colored leg inserted).
inline DiagramSum eta_diagrams(const DiagramSum& s, int site) {
  DiagramSum out(s.cap());
  for (auto& [d, c] : s.terms()) {
    std::vector<detail::Splice> ident_e;
    for (auto& e : d.edges) ident_e.push_back(detail::identity_splice(e.bead));
    std::vector<detail::CircleSplice> ident_c;
    for (auto& cb : d.circles) ident_c.push_back(detail::identity_circle_splice(cb));

    for (std::size_t k = 0; k < d.edges.size(); ++k) {
      HElement x = eta(d.edges[k].bead.value(), site);
      std::vector<std::vector<detail::Splice>> eo(d.edges.size());
      std::vector<std::vector<detail::CircleSplice>> co(d.circles.size());
      for (std::size_t i = 0; i < d.edges.size(); ++i)
        if (i != k) eo[i].push_back(ident_e[i]);
      for (std::size_t i = 0; i < d.circles.size(); ++i) co[i].push_back(ident_c[i]);
      for (auto& t : x.terms()) detail::hterm_splices(t, eo[k]);
      if (eo[k].empty()) continue;
      detail::assemble_spliced(d, c, eo, co, d.legs.size() + 2, out);
    }
    for (std::size_t k = 0; k < d.circles.size(); ++k) {
      HElement x = eta(d.circles[k].value(), site);
      std::vector<std::vector<detail::Splice>> eo(d.edges.size());
      std::vector<std::vector<detail::CircleSplice>> co(d.circles.size());
      for (std::size_t i = 0; i < d.edges.size(); ++i) eo[i].push_back(ident_e[i]);
      for (std::size_t i = 0; i < d.circles.size(); ++i)
        if (i != k) co[i].push_back(ident_c[i]);
      for (auto& t : x.terms()) detail::hterm_circle_splices(t, co[k]);
      if (co[k].empty()) continue;
      detail::assemble_spliced(d, c, eo, co, d.legs.size() + 2, out);
    }
  }
  return out;
}

/// Beaded circles from the h-degree-one part of an H-ring element: a term
/// c f0 h f1 becomes c times the one-legged circle with arc bead f1 * f0.
inline DiagramSum circles_of_h(const HElement& x, unsigned cap) {
  DiagramSum out(cap);
  Diagram base;
  base.circles.push_back(Bead::one());
  for (auto& t : x.terms()) {
    std::vector<detail::CircleSplice> cs;
    detail::hterm_circle_splices(t, cs);
    for (auto& sp : cs) {
      std::vector<const detail::CircleSplice*> pick{&sp};
      out.add(detail::materialize_splices(base, {}, pick), sp.coef);
    }
  }
  return out;
}

}  // namespace ratkon
