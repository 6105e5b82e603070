#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "ratkon/errors.hpp"
#include "ratkon/loc.hpp"

namespace ratkon {

/// A leg color: a base symbol plus a dual marker (rendered with a leading
/// partial sign).  The bases "h", "h'", "h1", "h2", ... are reserved for the
/// expansion variables.
struct Color {
  std::string base;
  bool dual = false;

  auto operator<=>(const Color&) const = default;
  std::string str() const { return dual ? "@" + base : base; }
};

inline Color wrap_color(bool dual = false) { return Color{"h", dual}; }
inline Color wrap_prime_color(bool dual = false) { return Color{"h'", dual}; }
inline Color hair_color(int i) { return Color{"h" + std::to_string(i), false}; }

inline Color color_of_letter(NCLetter l) {
  if (l == kLetterH) return wrap_color();
  if (l == kLetterHPrime) return wrap_prime_color();
  return hair_color(l);
}

// ---------------------------------------------------------------------------
// Beads.

/// A shared, structurally compared localized element used as an atomic bead
/// factor.
using LocAtom = std::shared_ptr<const LocElement>;

/// An edge bead: a product of group words and atomic localized factors, read
/// along the edge orientation.  Rational scalars never live in beads; they
/// belong to the term coefficient.  Adjacent word factors are merged and
/// identity words dropped, so the factor list is a normal form.
class Bead {
 public:
  using Factor = std::variant<FreeWord, LocAtom>;

  Bead() = default;
  static Bead one() { return Bead(); }
  static Bead word(const FreeWord& w) {
    Bead b;
    if (!w.is_identity()) b.fs_.push_back(w);
    return b;
  }
  static Bead atom(const LocElement& e) {
    Bead b;
    b.fs_.push_back(std::make_shared<const LocElement>(e));
    return b;
  }
  static Bead atom(LocAtom a) {
    Bead b;
    b.fs_.push_back(std::move(a));
    return b;
  }

  bool is_one() const { return fs_.empty(); }
  const std::vector<Factor>& factors() const { return fs_; }

  friend Bead operator*(const Bead& x, const Bead& y) {
    Bead r = x;
    for (const Factor& f : y.fs_) r.push(f);
    return r;
  }

  Bead involute() const {
    Bead r;
    for (auto it = fs_.rbegin(); it != fs_.rend(); ++it) {
      if (std::holds_alternative<FreeWord>(*it))
        r.push(std::get<FreeWord>(*it).inverse());
      else
        r.push(std::make_shared<const LocElement>(std::get<LocAtom>(*it)->star()));
    }
    return r;
  }

  /// The bead's value in the localization.
  LocElement value() const {
    LocElement v = LocElement::one();
    for (const Factor& f : fs_) {
      if (std::holds_alternative<FreeWord>(f))
        v = v * LocElement(GroupRingElement(std::get<FreeWord>(f)));
      else
        v = v * *std::get<LocAtom>(f);
    }
    return v;
  }

  /// Truncated expansion of the bead's value.
  NCSeries expand(unsigned cap) const {
    NCSeries s = NCSeries::one(cap);
    for (const Factor& f : fs_) {
      if (std::holds_alternative<FreeWord>(f))
        s *= magnus_expand(GroupRingElement(std::get<FreeWord>(f)), cap);
      else
        s *= magnus_expand(*std::get<LocAtom>(f), cap);
      if (s.is_zero()) break;
    }
    return s;
  }

  static std::strong_ordering cmp_factor(const Factor& a, const Factor& b) {
    bool aa = std::holds_alternative<LocAtom>(a), ba = std::holds_alternative<LocAtom>(b);
    if (aa != ba) return aa <=> ba;
    if (!aa) return std::get<FreeWord>(a) <=> std::get<FreeWord>(b);
    return *std::get<LocAtom>(a) <=> *std::get<LocAtom>(b);
  }

  std::strong_ordering operator<=>(const Bead& o) const {
    std::size_t n = std::min(fs_.size(), o.fs_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (auto c = cmp_factor(fs_[i], o.fs_[i]); c != 0) return c;
    return fs_.size() <=> o.fs_.size();
  }
  bool operator==(const Bead& o) const { return (*this <=> o) == 0; }

  std::string str() const {
    if (fs_.empty()) return "1";
    std::string s;
    for (const Factor& f : fs_) {
      if (!s.empty()) s += "*";
      if (std::holds_alternative<FreeWord>(f))
        s += std::get<FreeWord>(f).str();
      else
        s += "[" + std::get<LocAtom>(f)->str() + "]";
    }
    return s;
  }

  /// A cyclic rotation of the factor list (for circle canonicalization).
  Bead rotated(std::size_t k) const {
    Bead r;
    for (std::size_t i = 0; i < fs_.size(); ++i) r.push(fs_[(i + k) % fs_.size()]);
    return r;
  }

 private:
  void push(const Factor& f) {
    if (std::holds_alternative<FreeWord>(f)) {
      const FreeWord& w = std::get<FreeWord>(f);
      if (w.is_identity()) return;
      if (!fs_.empty() && std::holds_alternative<FreeWord>(fs_.back())) {
        FreeWord m = std::get<FreeWord>(fs_.back()) * w;
        fs_.pop_back();
        if (!m.is_identity()) fs_.push_back(m);
        return;
      }
    }
    fs_.push_back(f);
  }

  std::vector<Factor> fs_;
};

// ---------------------------------------------------------------------------
// Diagrams.

/// A beaded unitrivalent diagram.
///
/// Nodes 0..legs.size()-1 are the (univalent, colored) legs; the next n_int
/// ids are internal trivalent vertices.  Each internal vertex has slots
/// 0,1,2 whose stored order represents its cyclic orientation (an even
/// permutation of the slots is the same orientation; an odd one flips the
/// diagram's sign).  Edges are oriented; the bead is read along the
/// orientation.  Vertex-free beaded circles are kept separately.
struct Diagram {
  struct End {
    int32_t node = 0;
    int8_t slot = 0;
    auto operator<=>(const End&) const = default;
  };
  struct Edge {
    End a, b;  // oriented a -> b
    Bead bead;
    std::strong_ordering operator<=>(const Edge& o) const {
      if (auto c = a <=> o.a; c != 0) return c;
      if (auto c = b <=> o.b; c != 0) return c;
      return bead <=> o.bead;
    }
    bool operator==(const Edge& o) const { return (*this <=> o) == 0; }
  };

  std::vector<Color> legs;
  int32_t n_int = 0;
  std::vector<Edge> edges;
  std::vector<Bead> circles;

  bool is_leg(int32_t node) const { return node < static_cast<int32_t>(legs.size()); }
  int32_t nodes() const { return static_cast<int32_t>(legs.size()) + n_int; }
  /// Degree: the number of trivalent vertices.
  int degree() const { return n_int; }
  bool empty() const { return legs.empty() && n_int == 0 && circles.empty(); }

  /// A strut: one beaded edge between two legs and nothing else.
  bool is_strut() const {
    return n_int == 0 && circles.empty() && legs.size() == 2 && edges.size() == 1;
  }

  int count_legs(const Color& c) const {
    int n = 0;
    for (auto& l : legs) n += (l == c);
    return n;
  }
  bool has_leg_base(const std::string& base) const {
    for (auto& l : legs)
      if (l.base == base) return true;
    return false;
  }

  std::strong_ordering operator<=>(const Diagram& o) const {
    if (auto c = legs <=> o.legs; c != 0) return c;
    if (auto c = n_int <=> o.n_int; c != 0) return c;
    if (auto c = edges <=> o.edges; c != 0) return c;
    return circles <=> o.circles;
  }
  bool operator==(const Diagram& o) const { return (*this <=> o) == 0; }

  void validate() const {
    std::vector<int> seen(static_cast<std::size_t>(nodes()) * 3, 0);
    for (auto& e : edges)
      for (const End* p : {&e.a, &e.b}) {
        if (p->node < 0 || p->node >= nodes()) throw error("edge endpoint out of range");
        int max_slot = is_leg(p->node) ? 1 : 3;
        if (p->slot < 0 || p->slot >= max_slot) throw error("slot out of range");
        if (seen[static_cast<std::size_t>(p->node) * 3 + p->slot]++)
          throw error("slot used twice");
      }
    for (int32_t v = 0; v < nodes(); ++v) {
      int want = is_leg(v) ? 1 : 3;
      int got = 0;
      for (int s = 0; s < 3; ++s) got += seen[static_cast<std::size_t>(v) * 3 + s];
      if (got != want) throw error("node valence mismatch");
    }
  }

  std::string str() const {
    std::string s = "{legs[";
    for (std::size_t i = 0; i < legs.size(); ++i) s += (i ? " " : "") + legs[i].str();
    s += "] v" + std::to_string(n_int);
    for (auto& e : edges)
      s += " " + std::to_string(e.a.node) + "." + std::to_string(e.a.slot) + ">" +
           std::to_string(e.b.node) + "." + std::to_string(e.b.slot) +
           (e.bead.is_one() ? "" : "(" + e.bead.str() + ")");
    for (auto& c : circles) s += " O(" + c.str() + ")";
    return s + "}";
  }
};

// ---------------------------------------------------------------------------
// Canonical labeling.

namespace detail {

/// One emitted traversal token; candidate encodings compare lexicographically
/// over these.
struct Tok {
  int8_t kind = 0;  // 0 seen-edge, 1 leg, 2 old-vertex, 3 new-vertex, 4 circle
  int32_t a = 0, b = 0;
  Color color{};
  Bead bead{};

  std::strong_ordering operator<=>(const Tok& o) const {
    if (auto c = kind <=> o.kind; c != 0) return c;
    if (auto c = a <=> o.a; c != 0) return c;
    if (auto c = b <=> o.b; c != 0) return c;
    if (auto c = color <=> o.color; c != 0) return c;
    return bead <=> o.bead;
  }
  bool operator==(const Tok& o) const { return (*this <=> o) == 0; }
};

inline std::strong_ordering cmp_toks(const std::vector<Tok>& x, const std::vector<Tok>& y) {
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i)
    if (auto c = x[i] <=> y[i]; c != 0) return c;
  return x.size() <=> y.size();
}

struct PortRef {
  int32_t edge = -1;
  bool at_a = false;  // true when this port is end a of the edge
};

inline int perm3_sign(const std::array<int8_t, 3>& p) {
  int inv = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) inv += p[i] > p[j];
  return inv % 2 ? -1 : 1;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const Diagram& d) : d_(d) {}

  std::pair<Diagram, Rat> run() {
    split_components();
    Rat sign = 1;
    std::vector<Piece> pieces;
    for (auto& g : comps_) {
      Piece p;
      if (g.verts.empty()) {
        p = strut_piece(g);
      } else {
        if (!canonical_component(g, p)) return {Diagram{}, Rat(0)};
        sign *= best_sign_;
      }
      pieces.push_back(std::move(p));
    }
    for (const Bead& b : d_.circles) pieces.push_back(circle_piece(b));

    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& x, const Piece& y) { return cmp_toks(x.key, y.key) < 0; });
    return {assemble(pieces), sign};
  }

 private:
  struct Piece {
    std::vector<Tok> key;
    std::vector<Color> legs;
    int32_t n_int = 0;
    struct PEdge {
      int32_t ta = 0, tb = 0;  // local ids: legs and internals numbered separately
      bool ta_leg = false, tb_leg = false;
      int8_t sa = 0, sb = 0;
      Bead bead;
    };
    std::vector<PEdge> edges;
    std::vector<Bead> circles;
  };

  struct CompGraph {
    std::vector<int32_t> verts;
    std::vector<int32_t> edge_ids;
    std::map<int32_t, std::array<PortRef, 3>> ports;
  };

  struct CandState {
    std::vector<int32_t> order;                    // discovered internal vertices
    std::map<int32_t, int32_t> number;             // vertex id -> number
    std::map<int32_t, std::array<int8_t, 3>> rot;  // position -> stored slot
    std::vector<int16_t> edge_emitted;             // per component edge: idx+1
    int16_t n_emitted = 0;
    std::vector<Tok> toks;
    int sign = 1;
    int cmp = 0;  // 0: equal to best so far, -1: strictly smaller
  };

  void split_components() {
    int32_t n = d_.nodes();
    std::vector<int32_t> comp(n, -1);
    std::vector<std::vector<int32_t>> adj(n);
    for (auto& e : d_.edges) {
      adj[e.a.node].push_back(e.b.node);
      adj[e.b.node].push_back(e.a.node);
    }
    int ncomp = 0;
    for (int32_t s = 0; s < n; ++s) {
      if (comp[s] != -1) continue;
      std::vector<int32_t> stack{s};
      comp[s] = ncomp;
      while (!stack.empty()) {
        int32_t v = stack.back();
        stack.pop_back();
        for (int32_t w : adj[v])
          if (comp[w] == -1) {
            comp[w] = ncomp;
            stack.push_back(w);
          }
      }
      ++ncomp;
    }
    comps_.assign(ncomp, {});
    for (int32_t v = static_cast<int32_t>(d_.legs.size()); v < n; ++v)
      comps_[comp[v]].verts.push_back(v);
    for (int32_t ei = 0; ei < static_cast<int32_t>(d_.edges.size()); ++ei)
      comps_[comp[d_.edges[ei].a.node]].edge_ids.push_back(ei);
    // Drop empty components (isolated legs are rejected by validate()).
    std::erase_if(comps_, [](const CompGraph& g) { return g.edge_ids.empty(); });
    for (auto& g : comps_) {
      for (int32_t v : g.verts) g.ports[v] = {};
      for (int32_t k = 0; k < static_cast<int32_t>(g.edge_ids.size()); ++k) {
        const Diagram::Edge& e = d_.edges[g.edge_ids[k]];
        if (!d_.is_leg(e.a.node)) g.ports[e.a.node][e.a.slot] = {k, true};
        if (!d_.is_leg(e.b.node)) g.ports[e.b.node][e.b.slot] = {k, false};
      }
    }
  }

  Piece strut_piece(const CompGraph& g) {
    const Diagram::Edge& e = d_.edges[g.edge_ids[0]];
    Color ca = d_.legs[e.a.node], cb = d_.legs[e.b.node];
    Bead fw = e.bead, bw = e.bead.involute();
    bool forward;
    if (ca != cb)
      forward = ca < cb;
    else
      forward = (fw <=> bw) <= 0;
    const Color& t = forward ? ca : cb;
    const Color& h = forward ? cb : ca;
    const Bead& bead = forward ? fw : bw;
    Piece p;
    p.legs = {t, h};
    Piece::PEdge pe;
    pe.ta = 0;
    pe.tb = 1;
    pe.ta_leg = pe.tb_leg = true;
    pe.bead = bead;
    p.edges.push_back(std::move(pe));
    p.key.push_back(Tok{1, 0, 0, t, Bead{}});
    p.key.push_back(Tok{1, 0, 0, h, bead});
    return p;
  }

  Piece circle_piece(const Bead& b) {
    Bead best = canonical_circle_bead(b);
    Piece p;
    p.circles.push_back(best);
    p.key.push_back(Tok{4, 0, 0, Color{}, best});
    return p;
  }

  static Bead canonical_circle_bead(const Bead& b) {
    bool all_words = true;
    for (auto& f : b.factors()) all_words = all_words && std::holds_alternative<FreeWord>(f);
    if (all_words) {
      FreeWord w;
      for (auto& f : b.factors()) w = w * std::get<FreeWord>(f);
      std::vector<int32_t> ls = w.letters();
      while (ls.size() >= 2 && ls.front() == -ls.back()) {
        ls.erase(ls.begin());
        ls.pop_back();
      }
      FreeWord cw = FreeWord::from_letters(ls);
      Bead best = Bead::word(cw);
      for (const FreeWord& base : {cw, cw.inverse()}) {
        const std::vector<int32_t>& v = base.letters();
        for (std::size_t k = 0; k < std::max<std::size_t>(v.size(), 1); ++k) {
          std::vector<int32_t> rot(v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
          rot.insert(rot.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k));
          Bead cand = Bead::word(FreeWord::from_letters(rot));
          if (cand < best) best = cand;
        }
      }
      return best;
    }
    Bead best = b;
    for (const Bead& base : {b, b.involute()})
      for (std::size_t k = 0; k < base.factors().size(); ++k) {
        Bead cand = base.rotated(k);
        if (cand < best) best = cand;
      }
    return best;
  }

  /// Canonicalizes one component with internal vertices.  Returns false when
  /// the component is zero by antisymmetry.
  bool canonical_component(const CompGraph& g, Piece& out) {
    have_best_ = false;
    zero_ = false;
    for (int32_t root : g.verts) {
      std::array<int8_t, 3> perm = {0, 1, 2};
      do {
        CandState st;
        st.order.push_back(root);
        st.number[root] = 0;
        st.rot[root] = perm;
        st.sign = perm3_sign(perm);
        st.edge_emitted.assign(g.edge_ids.size(), 0);
        st.cmp = have_best_ ? 0 : -1;
        explore(g, std::move(st), 0, 0);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    if (zero_) return false;
    out = rebuild(g);
    return true;
  }

  void explore(const CompGraph& g, CandState st, std::size_t vi, int pos) {
    while (vi < st.order.size()) {
      if (pos == 3) {
        ++vi;
        pos = 0;
        continue;
      }
      int32_t v = st.order[vi];
      int8_t slot = st.rot[v][pos];
      const PortRef& pr = g.ports.at(v)[slot];
      const Diagram::Edge& e = d_.edges[g.edge_ids[pr.edge]];
      Tok tok;
      if (st.edge_emitted[pr.edge]) {
        tok.kind = 0;
        tok.a = st.edge_emitted[pr.edge] - 1;
        if (!push_tok(st, tok)) return;
        ++pos;
        continue;
      }
      st.edge_emitted[pr.edge] = ++st.n_emitted;
      bool fwd = pr.at_a;
      const Diagram::End& other = fwd ? e.b : e.a;
      tok.bead = fwd ? e.bead : e.bead.involute();
      if (d_.is_leg(other.node)) {
        tok.kind = 1;
        tok.color = d_.legs[other.node];
        if (!push_tok(st, tok)) return;
        ++pos;
        continue;
      }
      auto it = st.number.find(other.node);
      if (it != st.number.end()) {
        tok.kind = 2;
        tok.a = it->second;
        const auto& r = st.rot[other.node];
        tok.b = static_cast<int32_t>(std::find(r.begin(), r.end(), other.slot) - r.begin());
        if (!push_tok(st, tok)) return;
        ++pos;
        continue;
      }
      // New vertex: its entry port becomes position 0; fork on the two
      // cyclic completions of its rotation.
      tok.kind = 3;
      if (!push_tok(st, tok)) return;
      int8_t q = other.slot;
      std::array<int8_t, 2> rest{};
      int k = 0;
      for (int8_t s = 0; s < 3; ++s)
        if (s != q) rest[k++] = s;
      for (int flip = 0; flip < 2; ++flip) {
        CandState st2 = st;
        st2.order.push_back(other.node);
        st2.number[other.node] = static_cast<int32_t>(st2.order.size()) - 1;
        std::array<int8_t, 3> rot = {q, flip ? rest[1] : rest[0], flip ? rest[0] : rest[1]};
        st2.rot[other.node] = rot;
        st2.sign *= perm3_sign(rot);
        explore(g, std::move(st2), vi, pos + 1);
      }
      return;
    }
    finish(std::move(st));
  }

  /// Appends a token, comparing against the best encoding; returns false to
  /// prune candidates that are already lexicographically larger.  All
  /// candidate encodings of one component have equal length, so positional
  /// comparison is sound.
  bool push_tok(CandState& st, const Tok& tok) {
    st.toks.push_back(tok);
    if (st.cmp == -1) return true;
    std::size_t i = st.toks.size() - 1;
    if (i >= best_toks_.size()) return true;
    auto c = tok <=> best_toks_[i];
    if (c == 0) return true;
    if (c < 0) {
      st.cmp = -1;
      return true;
    }
    return false;
  }

  void finish(CandState st) {
    if (!have_best_ || cmp_toks(st.toks, best_toks_) < 0) {
      have_best_ = true;
      zero_ = false;
      best_toks_ = std::move(st.toks);
      best_sign_ = st.sign;
      best_order_ = std::move(st.order);
      best_rot_ = std::move(st.rot);
      return;
    }
    if (cmp_toks(st.toks, best_toks_) == 0 && st.sign != best_sign_) zero_ = true;
  }

  Piece rebuild(const CompGraph& g) {
    Piece p;
    p.key = best_toks_;
    p.n_int = static_cast<int32_t>(best_order_.size());
    std::map<int32_t, int32_t> vnum;
    for (std::size_t i = 0; i < best_order_.size(); ++i)
      vnum[best_order_[i]] = static_cast<int32_t>(i);
    std::vector<char> emitted(g.edge_ids.size(), 0);
    auto canon_pos = [&](int32_t vert, int8_t slot) -> int8_t {
      const auto& r = best_rot_.at(vert);
      return static_cast<int8_t>(std::find(r.begin(), r.end(), slot) - r.begin());
    };
    for (std::size_t vi = 0; vi < best_order_.size(); ++vi) {
      int32_t v = best_order_[vi];
      for (int pos = 0; pos < 3; ++pos) {
        int8_t slot = best_rot_.at(v)[pos];
        const PortRef& pr = g.ports.at(v)[slot];
        if (emitted[pr.edge]) continue;
        emitted[pr.edge] = 1;
        const Diagram::Edge& e = d_.edges[g.edge_ids[pr.edge]];
        bool fwd = pr.at_a;
        const Diagram::End& other = fwd ? e.b : e.a;
        Piece::PEdge ne;
        ne.ta = static_cast<int32_t>(vi);
        ne.ta_leg = false;
        ne.sa = static_cast<int8_t>(pos);
        ne.bead = fwd ? e.bead : e.bead.involute();
        if (d_.is_leg(other.node)) {
          ne.tb = static_cast<int32_t>(p.legs.size());
          ne.tb_leg = true;
          ne.sb = 0;
          p.legs.push_back(d_.legs[other.node]);
        } else {
          ne.tb = vnum.at(other.node);
          ne.tb_leg = false;
          ne.sb = canon_pos(other.node, other.slot);
        }
        p.edges.push_back(std::move(ne));
      }
    }
    return p;
  }

  static Diagram assemble(const std::vector<Piece>& pieces) {
    Diagram out;
    std::size_t total_legs = 0;
    for (auto& p : pieces) total_legs += p.legs.size();
    int32_t leg_off = 0, int_off = static_cast<int32_t>(total_legs);
    for (auto& p : pieces) {
      out.legs.insert(out.legs.end(), p.legs.begin(), p.legs.end());
      out.n_int += p.n_int;
      for (auto& ne : p.edges) {
        Diagram::Edge e;
        e.a = {ne.ta_leg ? leg_off + ne.ta : int_off + ne.ta, ne.sa};
        e.b = {ne.tb_leg ? leg_off + ne.tb : int_off + ne.tb, ne.sb};
        e.bead = ne.bead;
        out.edges.push_back(std::move(e));
      }
      out.circles.insert(out.circles.end(), p.circles.begin(), p.circles.end());
      leg_off += static_cast<int32_t>(p.legs.size());
      int_off += p.n_int;
    }
    return out;
  }

  const Diagram& d_;
  std::vector<CompGraph> comps_;
  bool have_best_ = false;
  bool zero_ = false;
  std::vector<Tok> best_toks_;
  int best_sign_ = 1;
  std::vector<int32_t> best_order_;
  std::map<int32_t, std::array<int8_t, 3>> best_rot_;
};

}  // namespace detail

/// Canonicalizes a diagram: returns the canonical representative and a sign.
/// Sign 0 means the diagram equals its own negative under antisymmetry and
/// is therefore zero in the diagram algebra.
inline std::pair<Diagram, Rat> canonicalize(const Diagram& d) {
  return detail::Canonicalizer(d).run();
}

// ---------------------------------------------------------------------------
// Diagram sums.

/// A finite rational combination of canonical diagrams, truncated at a
/// vertex-degree cap.  Terms beyond the cap are dropped on entry.
class DiagramSum {
 public:
  explicit DiagramSum(unsigned cap) : cap_(cap) {}
  static DiagramSum zero(unsigned cap) { return DiagramSum(cap); }
  static DiagramSum unit(unsigned cap) {
    DiagramSum s(cap);
    s.terms_[Diagram{}] = 1;
    return s;
  }
  static DiagramSum single(const Diagram& d, unsigned cap, const Rat& c = Rat(1)) {
    DiagramSum s(cap);
    s.add(d, c);
    return s;
  }

  unsigned cap() const { return cap_; }
  const std::map<Diagram, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rat coeff(const Diagram& d) const {
    auto [can, sign] = canonicalize(d);
    if (sign == 0) return 0;
    auto it = terms_.find(can);
    return it == terms_.end() ? Rat(0) : it->second * sign;
  }

  /// Adds c times the (not necessarily canonical) diagram d.
  void add(const Diagram& d, const Rat& c) {
    if (c == 0) return;
    if (static_cast<unsigned>(d.degree()) > cap_) return;
    auto [can, sign] = canonicalize(d);
    if (sign == 0) return;
    insert_canonical(can, c * sign);
  }

  /// Adds c times an already canonical diagram (skips relabeling).
  void insert_canonical(const Diagram& d, const Rat& c) {
    if (c == 0) return;
    if (static_cast<unsigned>(d.degree()) > cap_) return;
    auto it = terms_.find(d);
    if (it == terms_.end()) {
      terms_.emplace(d, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  DiagramSum& operator+=(const DiagramSum& o) {
    for (auto& [d, c] : o.terms_) insert_canonical(d, c);
    return *this;
  }
  friend DiagramSum operator+(DiagramSum a, const DiagramSum& b) { return a += b; }
  friend DiagramSum operator-(const DiagramSum& a, const DiagramSum& b) {
    DiagramSum r = a;
    for (auto& [d, c] : b.terms_) r.insert_canonical(d, -c);
    return r;
  }
  friend DiagramSum operator*(const Rat& c, const DiagramSum& a) {
    DiagramSum r(a.cap_);
    if (c == 0) return r;
    for (auto& [d, x] : a.terms_) r.terms_.emplace(d, c * x);
    return r;
  }

  bool operator==(const DiagramSum& o) const { return terms_ == o.terms_; }

  /// Terms of vertex degree exactly n.
  DiagramSum degree_part(int n) const {
    DiagramSum r(cap_);
    for (auto& [d, c] : terms_)
      if (d.degree() == n) r.terms_.emplace(d, c);
    return r;
  }
  DiagramSum truncated(unsigned cap) const {
    DiagramSum r(std::min(cap, cap_));
    for (auto& [d, c] : terms_)
      if (static_cast<unsigned>(d.degree()) <= r.cap_) r.terms_.emplace(d, c);
    return r;
  }

  int min_degree() const {
    int m = -1;
    for (auto& [d, c] : terms_)
      if (m < 0 || d.degree() < m) m = d.degree();
    return m;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [d, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += to_string(c) + " " + d.str();
    }
    return s;
  }

 private:
  unsigned cap_;
  std::map<Diagram, Rat> terms_;
};

/// Disjoint union of raw diagrams (node ids renumbered: legs first).
inline Diagram disjoint_union_raw(const Diagram& a, const Diagram& b) {
  Diagram r;
  r.legs = a.legs;
  r.legs.insert(r.legs.end(), b.legs.begin(), b.legs.end());
  r.n_int = a.n_int + b.n_int;
  int32_t la = static_cast<int32_t>(a.legs.size());
  int32_t lb = static_cast<int32_t>(b.legs.size());
  auto remap_a = [&](Diagram::End e) {
    if (e.node >= la) e.node += lb;
    return e;
  };
  auto remap_b = [&](Diagram::End e) {
    if (e.node < lb)
      e.node += la;
    else
      e.node += la + a.n_int;
    return e;
  };
  for (auto e : a.edges) r.edges.push_back({remap_a(e.a), remap_a(e.b), e.bead});
  for (auto e : b.edges) r.edges.push_back({remap_b(e.a), remap_b(e.b), e.bead});
  r.circles = a.circles;
  r.circles.insert(r.circles.end(), b.circles.begin(), b.circles.end());
  return r;
}

inline DiagramSum disjoint_union(const DiagramSum& a, const DiagramSum& b) {
  DiagramSum r(std::min(a.cap(), b.cap()));
  for (auto& [da, ca] : a.terms())
    for (auto& [db, cb] : b.terms()) {
      if (static_cast<unsigned>(da.degree() + db.degree()) > r.cap()) continue;
      r.add(disjoint_union_raw(da, db), ca * cb);
    }
  return r;
}

/// Union exponential: unit + s + s⊔s/2! + ...  The expansion stops when the
/// union degree exceeds the cap; when s has degree-zero (strutlike) terms the
/// series does not terminate by degree, so a factor bound must be given.
inline DiagramSum exp_union(const DiagramSum& s, int max_factors = -1) {
  for (auto& [d, c] : s.terms())
    if (d.empty()) throw constant_term_error("exp_union of a sum with an empty-diagram term");
  if (max_factors < 0) {
    if (!s.is_zero() && s.min_degree() == 0)
      throw cap_exceeded_error("exp_union needs an explicit factor bound for degree-zero terms");
    max_factors = static_cast<int>(s.cap());
  }
  DiagramSum result = DiagramSum::unit(s.cap());
  DiagramSum power = DiagramSum::unit(s.cap());
  for (int k = 1; k <= max_factors; ++k) {
    power = disjoint_union(power, s);
    power = Rat(1, k) * power;
    if (power.is_zero()) break;
    result += power;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Construction helpers.

/// A strut from color `from` to color `to` with each group-ring term of
/// `bead` split into its own diagram (beads are multilinear).
inline DiagramSum strut_sum(const Color& from, const Color& to, const GroupRingElement& bead,
                            unsigned cap, const Rat& coef = Rat(1)) {
  DiagramSum s(cap);
  for (auto& [w, c] : bead.terms()) {
    Diagram d;
    d.legs = {from, to};
    d.edges.push_back({{0, 0}, {1, 0}, Bead::word(w)});
    s.add(d, coef * c);
  }
  return s;
}

inline DiagramSum strut_sum(const Color& from, const Color& to, const LocElement& bead,
                            unsigned cap, const Rat& coef = Rat(1)) {
  if (bead.is_polynomial()) return strut_sum(from, to, bead.gr(), cap, coef);
  DiagramSum s(cap);
  Diagram d;
  d.legs = {from, to};
  d.edges.push_back({{0, 0}, {1, 0}, Bead::atom(bead)});
  s.add(d, coef);
  return s;
}

/// A beaded circle for each group-ring term.
inline DiagramSum circle_sum(const GroupRingElement& bead, unsigned cap, const Rat& coef = Rat(1)) {
  DiagramSum s(cap);
  for (auto& [w, c] : bead.terms()) {
    Diagram d;
    d.circles.push_back(Bead::word(w));
    s.add(d, coef * c);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Bead substitutions.

/// Applies the homomorphism given by generator images to a word.
inline FreeWord map_word(const FreeWord& w, const std::vector<FreeWord>& images) {
  FreeWord r;
  for (int32_t l : w.letters()) {
    int i = std::abs(l);
    if (i > static_cast<int>(images.size())) throw error("generator image missing");
    const FreeWord& im = images[static_cast<std::size_t>(i) - 1];
    r = r * (l > 0 ? im : im.inverse());
  }
  return r;
}

inline GroupRingElement map_gr(const GroupRingElement& x, const std::vector<FreeWord>& images) {
  GroupRingElement r;
  for (auto& [w, c] : x.terms()) r.add_term(map_word(w, images), c);
  return r;
}

inline LocElement map_loc(const LocElement& x, const std::vector<FreeWord>& images) {
  if (x.is_polynomial()) return LocElement(map_gr(x.gr(), images));
  const MatrixPresentation& p = x.presentation();
  MatrixPresentation q;
  q.core = GRMatrix(p.core.rows, p.core.cols);
  for (std::size_t i = 0; i < p.core.rows; ++i)
    for (std::size_t j = 0; j < p.core.cols; ++j) q.core(i, j) = map_gr(p.core(i, j), images);
  for (auto& e : p.selector) q.selector.push_back(map_gr(e, images));
  for (auto& e : p.column) q.column.push_back(map_gr(e, images));
  return LocElement(q);
}

inline Bead map_bead(const Bead& b, const std::vector<FreeWord>& images) {
  Bead r;
  for (auto& f : b.factors()) {
    if (std::holds_alternative<FreeWord>(f))
      r = r * Bead::word(map_word(std::get<FreeWord>(f), images));
    else
      r = r * Bead::atom(map_loc(*std::get<LocAtom>(f), images));
  }
  return r;
}

/// Generator images of the basing change t_i -> t_j^-1 t_i t_j (other
/// generators fixed); g is the ambient generator count.
inline std::vector<FreeWord> string_alpha_images(int i, int j, int g) {
  std::vector<FreeWord> images;
  for (int k = 1; k <= g; ++k) {
    if (k == i)
      images.push_back(FreeWord::gen(j, -1) * FreeWord::gen(i, 1) * FreeWord::gen(j, 1));
    else
      images.push_back(FreeWord::gen(k, 1));
  }
  return images;
}

inline DiagramSum substitute_beads(const DiagramSum& s, const std::vector<FreeWord>& images) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms()) {
    Diagram m = d;
    for (auto& e : m.edges) e.bead = map_bead(e.bead, images);
    for (auto& cb : m.circles) cb = map_bead(cb, images);
    r.add(m, c);
  }
  return r;
}

/// Multiplies the bead at every leg of color `col` by the word f, with the
/// leg's edge read toward the leg (the outward reading is post-multiplied).
inline DiagramSum push_group(const DiagramSum& s, const Color& col, const FreeWord& f) {
  DiagramSum r(s.cap());
  Bead bf = Bead::word(f);
  for (auto& [d, c] : s.terms()) {
    Diagram m = d;
    for (auto& e : m.edges) {
      if (m.is_leg(e.b.node) && m.legs[e.b.node] == col) e.bead = e.bead * bf;
      if (m.is_leg(e.a.node) && m.legs[e.a.node] == col)
        e.bead = (e.bead.involute() * bf).involute();
    }
    r.add(m, c);
  }
  return r;
}

/// Renames every leg of one color to another.
inline DiagramSum recolor_legs(const DiagramSum& s, const Color& from, const Color& to) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms()) {
    Diagram m = d;
    for (auto& l : m.legs)
      if (l == from) l = to;
    r.add(m, c);
  }
  return r;
}

/// One option for relabeling a leg: new color, bead pushed onto the leg (in
/// the toward-leg reading), and a weight.
struct LegImage {
  Color color;
  Bead bead = Bead::one();
  Rat coef = Rat(1);
};

/// Relabels each leg of the given color by a formal combination of colored,
/// beaded legs: every such leg independently becomes each option, weights
/// multiplying.  Encodes substitutions like s(x + y) or s(xM).
inline DiagramSum relabel_legs_linear(const DiagramSum& s, const Color& from,
                                      const std::vector<LegImage>& images) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms()) {
    std::vector<int32_t> hits;
    for (int32_t l = 0; l < static_cast<int32_t>(d.legs.size()); ++l)
      if (d.legs[l] == from) hits.push_back(l);
    Diagram work = d;
    auto rec = [&](auto&& self, std::size_t at, const Rat& w) -> void {
      if (at == hits.size()) {
        r.add(work, c * w);
        return;
      }
      int32_t leg = hits[at];
      for (auto& img : images) {
        Diagram saved = work;
        work.legs[leg] = img.color;
        for (auto& e : work.edges) {
          if (e.b.node == leg) e.bead = e.bead * img.bead;
          if (e.a.node == leg) e.bead = img.bead.involute() * e.bead;
        }
        self(self, at + 1, w * img.coef);
        work = std::move(saved);
      }
    };
    rec(rec, 0, Rat(1));
  }
  return r;
}

/// Total number of legs whose base color is in `bases`.
inline int count_legs_with_bases(const Diagram& d, const std::vector<std::string>& bases) {
  int n = 0;
  for (auto& l : d.legs)
    for (auto& b : bases) n += (l.base == b);
  return n;
}

/// Keeps only terms with at most max_legs legs among the given base colors.
/// Identities between strut-bearing sums are compared after this truncation,
/// since strut terms all have vertex degree zero.
inline DiagramSum truncate_by_legs(const DiagramSum& s, const std::vector<std::string>& bases,
                                   int max_legs) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms())
    if (count_legs_with_bases(d, bases) <= max_legs) r.insert_canonical(d, c);
  return r;
}

// ---------------------------------------------------------------------------
// Wheels.

/// A wheel with the h-letters of the cyclic word as legs, in cyclic order.
/// Arc beads are trivial; each rim vertex has rotation
/// (incoming arc, outgoing arc, leg).
inline Diagram wheel_of_word(const NCWord& w) {
  int n = static_cast<int>(w.size());
  Diagram d;
  for (NCLetter l : w) d.legs.push_back(color_of_letter(l));
  d.n_int = n;
  for (int i = 0; i < n; ++i) {
    int32_t v = n + i, vn = n + (i + 1) % n;
    d.edges.push_back({{v, 1}, {vn, 0}, Bead::one()});  // arc: out-slot 1 -> in-slot 0
    d.edges.push_back({{v, 2}, {static_cast<int32_t>(i), 0}, Bead::one()});  // spoke
  }
  return d;
}

/// Converts a cyclic-series trace into a sum of wheels.  Degree-zero trace
/// terms carry no diagram and are skipped.
inline DiagramSum wheels_from_cyclic(const CyclicSeries& t, unsigned cap) {
  DiagramSum s(cap);
  for (auto& [w, c] : t.terms()) {
    if (w.empty()) continue;
    s.add(wheel_of_word(w), c);
  }
  return s;
}

}  // namespace ratkon
