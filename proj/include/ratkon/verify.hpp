#pragma once

// Identity-check registry.  Every verified identity of the calculus gets one
// named, seeded, deterministic check; the command-line driver and the test
// suite both run checks through this registry.  A check returns no witness on
// success and a description of the first failing term otherwise.

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ratkon/contraction.hpp"
#include "ratkon/gaussian.hpp"
#include "ratkon/hairy.hpp"
#include "ratkon/io.hpp"
#include "ratkon/pairing.hpp"
#include "ratkon/relations.hpp"
#include "ratkon/wrapping.hpp"

namespace ratkon::checks {

// ---------------------------------------------------------------------------
// Options, reports, deterministic case scheduling.

struct Options {
  int g = 2;             // free-group rank for random inputs
  int degree = -1;       // truncation override (-1: per-check default)
  std::uint64_t seed = 1;
  int cases = -1;        // case-count override (-1: per-check default)
  int site = 1;          // generator index used by conjugation checks
  std::string matrix;    // optional matrix override ("[t1]", "wrap2", ...)
  int threads = 0;       // 0: use RATKON_THREADS, else 1
};

struct Report {
  std::string identity;
  std::string params;
  bool pass = false;
  std::string witness;   // first failing term when pass is false
  double seconds = 0;
};

using Rng = std::mt19937_64;

/// Mixes the user seed, the identity name and the case index into one stream
/// seed, so every case is reproducible independently of scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, const std::string& name, std::uint64_t k) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h += seed * 0x9e3779b97f4a7c15ull + k * 0xbf58476d1ce4e5b9ull;
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return h;
}

inline int thread_budget(const Options& o) {
  if (o.threads > 0) return o.threads;
  if (const char* e = std::getenv("RATKON_THREADS")) {
    int v = std::atoi(e);
    if (v > 0) return v;
  }
  return 1;
}

/// Runs `n` independent cases of `f(case_index, rng)` and returns the witness
/// of the lowest failing index, regardless of how cases were scheduled.
template <typename F>
inline std::optional<std::string> run_cases(const Options& o, const std::string& name, int n,
                                            F&& f) {
  auto call = [&](int i) -> std::optional<std::string> {
    Rng rng(mix_seed(o.seed, name, static_cast<std::uint64_t>(i)));
    try {
      auto w = f(i, rng);
      if (w) return "case " + std::to_string(i) + ": " + *w;
      return std::nullopt;
    } catch (const std::exception& e) {
      return "case " + std::to_string(i) + ": exception: " + std::string(e.what());
    }
  };
  std::vector<std::optional<std::string>> res(static_cast<std::size_t>(std::max(0, n)));
  int nt = std::min(thread_budget(o), std::max(1, n));
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) res[static_cast<std::size_t>(i)] = call(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        for (int i; (i = next.fetch_add(1)) < n;) res[static_cast<std::size_t>(i)] = call(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& r : res)
    if (r) return r;
  return std::nullopt;
}

inline int eff_cases(const Options& o, int dflt) { return o.cases > 0 ? o.cases : dflt; }
inline unsigned eff_degree(const Options& o, unsigned dflt) {
  return o.degree >= 0 ? static_cast<unsigned>(o.degree) : dflt;
}
inline int eff_site(const Options& o) { return std::max(1, std::min(o.site, std::max(1, o.g))); }

// ---------------------------------------------------------------------------
// Random inputs.

inline int rand_int(Rng& g, int lo, int hi) {
  return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Rat rand_rat(Rng& g) {
  static const Rat pool[6] = {Rat(1), Rat(-1), Rat(2), Rat(-1, 2), Rat(1, 3), Rat(3)};
  return pool[rand_int(g, 0, 5)];
}

inline FreeWord rand_word(Rng& g, int gens, int maxlen) {
  int len = rand_int(g, 0, maxlen);
  std::vector<int32_t> ls;
  for (int i = 0; i < len; ++i) {
    int k = rand_int(g, 1, std::max(1, gens));
    ls.push_back(rand_int(g, 0, 1) ? k : -k);
  }
  return FreeWord::from_letters(std::move(ls));
}

inline FreeWord rand_word_nonempty(Rng& g, int gens, int maxlen) {
  for (int t = 0; t < 16; ++t) {
    FreeWord w = rand_word(g, gens, std::max(1, maxlen));
    if (!w.is_identity()) return w;
  }
  return FreeWord::gen(1);
}

inline GroupRingElement rand_gr(Rng& g, int gens, int maxterms, int maxlen) {
  GroupRingElement r;
  int n = rand_int(g, 1, std::max(1, maxterms));
  for (int i = 0; i < n; ++i) r.add_term(rand_word(g, gens, maxlen), rand_rat(g));
  return r;
}

/// A random element of augmentation zero (difference of two words).
inline GroupRingElement rand_gr_augzero(Rng& g, int gens, int maxlen) {
  GroupRingElement r;
  Rat c = rand_rat(g);
  r.add_term(rand_word(g, gens, maxlen), c);
  r.add_term(rand_word(g, gens, maxlen), -c);
  return r;
}

/// A random Hermitian polynomial matrix with a strictly diagonally dominant
/// augmentation, hence invertible over Q.
inline GRMatrix rand_herm_gr(Rng& g, std::size_t n, int gens, int maxlen) {
  GRMatrix m(n, n);
  std::vector<int> rowsum(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      GroupRingElement e;
      switch (rand_int(g, 0, 2)) {
        case 0: break;  // zero entry
        case 1:
          e.add_term(rand_word_nonempty(g, gens, maxlen), rand_int(g, 0, 1) ? Rat(1) : Rat(-1));
          rowsum[i] += 1;
          rowsum[j] += 1;
          break;
        default:
          e = rand_gr_augzero(g, gens, maxlen);
          break;
      }
      m(i, j) = e;
      m(j, i) = e.involute();
    }
  for (std::size_t i = 0; i < n; ++i) {
    GroupRingElement d(Rat(rowsum[i] + rand_int(g, 1, 2)));
    if (rand_int(g, 0, 1)) {
      FreeWord w = rand_word_nonempty(g, gens, maxlen);
      Rat c = rand_int(g, 0, 1) ? Rat(1) : Rat(-1);
      GroupRingElement sym;  // c (w + w~ - 2), self-conjugate of augmentation 0
      sym.add_term(w, c);
      sym.add_term(w.involute(), c);
      sym.add_term(FreeWord(), Rat(-2) * c);
      d = d + sym;
    }
    m(i, i) = d;
  }
  return m;
}

/// A random Hermitian polynomial matrix with no augmentation condition.
inline GRMatrix rand_herm_gr_free(Rng& g, std::size_t n, int gens, int maxlen) {
  GRMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      GroupRingElement e = rand_gr(g, gens, 2, maxlen);
      m(i, j) = e;
      m(j, i) = e.involute();
    }
    GroupRingElement d(Rat(rand_int(g, -2, 2)));
    FreeWord w = rand_word_nonempty(g, gens, maxlen);
    Rat c = rand_rat(g);
    d.add_term(w, c);
    d.add_term(w.involute(), c);
    m(i, i) = d;
  }
  return m;
}

/// A random localized element.  Presentation cores have unit-like diagonals
/// and augmentation-zero off-diagonal entries, so the core augmentation is
/// diagonal and invertible over Q.
inline LocElement rand_loc(Rng& g, int gens, int core_max) {
  if (core_max <= 0 || rand_int(g, 0, 2) == 0)
    return LocElement(rand_gr(g, gens, 2, 2));
  std::size_t n = static_cast<std::size_t>(rand_int(g, 1, core_max));
  MatrixPresentation p;
  p.core = GRMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    int k = rand_int(g, 1, std::max(1, gens));
    switch (rand_int(g, 0, 2)) {
      case 0: p.core(i, i) = GroupRingElement::one(); break;
      case 1: p.core(i, i) = GroupRingElement::gen(k, rand_int(g, 0, 1) ? 1 : -1); break;
      default:
        p.core(i, i) = GroupRingElement(Rat(2)) - GroupRingElement::gen(k);
        break;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rand_int(g, 0, 1)) p.core(i, j) = rand_gr_augzero(g, gens, 2);
  }
  p.selector.assign(n, GroupRingElement());
  p.column.assign(n, GroupRingElement());
  p.selector[static_cast<std::size_t>(rand_int(g, 0, static_cast<int>(n) - 1))] =
      rand_gr(g, gens, 1, 2);
  p.column[static_cast<std::size_t>(rand_int(g, 0, static_cast<int>(n) - 1))] =
      rand_gr(g, gens, 1, 2);
  if (rand_int(g, 0, 2) == 0)
    p.selector[0] = p.selector[0] + GroupRingElement::one();
  return LocElement(std::move(p));
}

/// A random localized element with nonzero augmentation.
inline LocElement rand_loc_unit(Rng& g, int gens, int core_max) {
  LocElement s = rand_loc(g, gens, core_max);
  if (s.augment() == 0) s = s + LocElement::one();
  return s;
}

/// A random product of localized factors and wrap-variable powers.
inline HElement rand_h(Rng& g, int gens, int core_max) {
  HElement r(rand_loc(g, gens, core_max));
  if (rand_int(g, 0, 1)) {
    r = r * HElement::h_power(static_cast<unsigned>(rand_int(g, 1, 2)));
    r = r * HElement(rand_loc(g, gens, core_max));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Random diagrams.

/// A connected diagram with the requested leg colors: a circle (no legs), a
/// looped vertex (one leg), a strut (two legs) or a caterpillar tree.
inline Diagram caterpillar(Rng& g, const std::vector<Color>& cs, int gens, int maxlen) {
  auto bead = [&] { return Bead::word(rand_word(g, gens, maxlen)); };
  auto push = [&](Diagram& d, Diagram::End a, Diagram::End b) {
    if (rand_int(g, 0, 1))
      d.edges.push_back({a, b, bead()});
    else
      d.edges.push_back({b, a, bead()});
  };
  Diagram d;
  d.legs = cs;
  int L = static_cast<int>(cs.size());
  if (L == 0) {
    d.circles.push_back(Bead::word(rand_word_nonempty(g, gens, std::max(1, maxlen))));
    return d;
  }
  if (L == 1) {
    d.n_int = 1;
    d.edges.push_back({{1, 0}, {1, 1}, Bead::word(rand_word_nonempty(g, gens, std::max(1, maxlen)))});
    push(d, {1, 2}, {0, 0});
    return d;
  }
  if (L == 2) {
    push(d, {0, 0}, {1, 0});
    return d;
  }
  int V = L - 2;
  d.n_int = V;
  auto vtx = [&](int k) { return static_cast<int32_t>(L + k); };
  push(d, {vtx(0), 0}, {0, 0});
  for (int k = 0; k < V; ++k) push(d, {vtx(k), 1}, {static_cast<int32_t>(k + 1), 0});
  for (int k = 0; k + 1 < V; ++k) push(d, {vtx(k), 2}, {vtx(k + 1), 0});
  push(d, {vtx(V - 1), 2}, {static_cast<int32_t>(L - 1), 0});
  return d;
}

/// Draws `count` colors from `pool` (with repetition), shuffled.
inline std::vector<Color> draw_colors(Rng& g, const std::vector<Color>& pool, int count) {
  std::vector<Color> cs;
  for (int i = 0; i < count; ++i)
    cs.push_back(pool[static_cast<std::size_t>(rand_int(g, 0, static_cast<int>(pool.size()) - 1))]);
  std::shuffle(cs.begin(), cs.end(), g);
  return cs;
}

// ---------------------------------------------------------------------------
// Comparison helpers and witnesses.

inline std::optional<std::string> sum_diff(const DiagramSum& a, const DiagramSum& b) {
  DiagramSum d = a - b;
  if (d.is_zero()) return std::nullopt;
  auto& [t, c] = *d.terms().begin();
  return "difference has coefficient " + to_string(c) + " on " + t.str();
}

/// Compares two sums whose beads may present the same value differently, by
/// expanding every bead into hair legs with a shared budget.
inline std::optional<std::string> hair_diff(const DiagramSum& a, const DiagramSum& b,
                                            unsigned budget) {
  return sum_diff(hair(a, budget), hair(b, budget));
}

inline std::optional<std::string> series_diff(const NCSeries& a, const NCSeries& b) {
  NCSeries d = a - b;
  if (d.is_zero()) return std::nullopt;
  auto& [w, c] = *d.terms().begin();
  return "difference has coefficient " + to_string(c) + " on word " + word_str(w);
}

inline std::optional<std::string> h_diff(const HElement& a, const HElement& b, unsigned cap) {
  return series_diff(a.expand(cap), b.expand(cap));
}

inline std::optional<std::string> cyc_diff(const CyclicSeries& a, const CyclicSeries& b) {
  CyclicSeries d = a - b;
  if (d.is_zero()) return std::nullopt;
  auto& [w, c] = *d.terms().begin();
  return "difference has coefficient " + to_string(c) + " on cyclic word " + word_str(w);
}

/// Restricts to terms with exactly k legs over the given bases.
inline DiagramSum legs_exactly(const DiagramSum& s, const std::vector<std::string>& bases, int k) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms())
    if (count_legs_with_bases(d, bases) == k) r.insert_canonical(d, c);
  return r;
}

inline int max_base_legs(const DiagramSum& s, const std::vector<std::string>& bases, bool dual) {
  int m = 0;
  for (auto& [d, c] : s.terms()) {
    int k = 0;
    for (auto& l : d.legs)
      if (l.dual == dual && std::find(bases.begin(), bases.end(), l.base) != bases.end()) ++k;
    m = std::max(m, k);
  }
  return m;
}

inline bool is_connected(const Diagram& d) {
  int n = static_cast<int>(d.legs.size()) + d.n_int;
  if (n == 0) return d.circles.size() == 1;
  if (!d.circles.empty()) return false;
  std::vector<int> up(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) up[static_cast<std::size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (up[static_cast<std::size_t>(x)] != x) {
      up[static_cast<std::size_t>(x)] = up[static_cast<std::size_t>(up[static_cast<std::size_t>(x)])];
      x = up[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (auto& e : d.edges) up[static_cast<std::size_t>(find(e.a.node))] = find(e.b.node);
  int root = find(0);
  for (int i = 1; i < n; ++i)
    if (find(i) != root) return false;
  return true;
}

inline DiagramSum connected_part(const DiagramSum& s) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms())
    if (is_connected(d)) r.insert_canonical(d, c);
  return r;
}

/// Gluing weight: legs + 2 * internal vertices + circles.  Additive under
/// disjoint union; a weld of two legs never increases it.
inline int weight(const Diagram& d) {
  return static_cast<int>(d.legs.size()) + 2 * d.degree() + static_cast<int>(d.circles.size());
}

inline DiagramSum filter_weight(const DiagramSum& s, int wmax) {
  DiagramSum r(s.cap());
  for (auto& [d, c] : s.terms())
    if (weight(d) <= wmax) r.insert_canonical(d, c);
  return r;
}

// ---------------------------------------------------------------------------
// Built-in matrices.

inline GRMatrix gr_matrix_t1() {
  GRMatrix m(1, 1);
  m(0, 0) = GroupRingElement::gen(1);
  return m;
}

inline GRMatrix gr_matrix_two_minus_t1() {
  GRMatrix m(1, 1);
  m(0, 0) = GroupRingElement(Rat(2)) - GroupRingElement::gen(1);
  return m;
}

/// The rank-two example matrix [[1, t3 - t2 t1^-1], [t3^-1 - t1 t2^-1, 1]].
inline GRMatrix gr_matrix_wrap2() {
  GRMatrix m(2, 2);
  m(0, 0) = GroupRingElement::one();
  m(1, 1) = GroupRingElement::one();
  GroupRingElement off = GroupRingElement::gen(3) -
                         GroupRingElement::gen(2) * GroupRingElement::gen(1, -1);
  m(0, 1) = off;
  m(1, 0) = off.involute();
  return m;
}

/// Parses "[a, b]" / "[[a, b], [c, d]]" matrix text, or a named matrix.
inline LocMatrix parse_matrix(const std::string& text) {
  if (text == "wrap2") return LocMatrix::from_gr(gr_matrix_wrap2());
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto split_entries = [&](const std::string& row) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char ch : row) {
      if (ch == '(' || ch == '[') ++depth;
      if (ch == ')' || ch == ']') --depth;
      if (ch == ',' && depth == 0) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  };
  skip();
  if (i >= text.size() || text[i] != '[') throw parse_error("expected '[' to open a matrix", i);
  ++i;
  skip();
  std::vector<std::vector<std::string>> rows;
  if (i < text.size() && text[i] == '[') {
    while (true) {
      skip();
      if (i >= text.size() || text[i] != '[') throw parse_error("expected '[' to open a row", i);
      std::size_t start = ++i;
      int depth = 0;
      while (i < text.size() && (text[i] != ']' || depth > 0)) {
        if (text[i] == '[' || text[i] == '(') ++depth;
        if (text[i] == ')') --depth;
        if (text[i] == ']') --depth;
        ++i;
      }
      if (i >= text.size()) throw parse_error("unterminated matrix row", i);
      rows.push_back(split_entries(text.substr(start, i - start)));
      ++i;
      skip();
      if (i < text.size() && text[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    skip();
    if (i >= text.size() || text[i] != ']') throw parse_error("expected ']' to close the matrix", i);
  } else {
    std::size_t start = i;
    int depth = 0;
    while (i < text.size() && (text[i] != ']' || depth > 0)) {
      if (text[i] == '[' || text[i] == '(') ++depth;
      if (text[i] == ')' || text[i] == ']') --depth;
      ++i;
    }
    if (i >= text.size()) throw parse_error("unterminated matrix", i);
    rows.push_back(split_entries(text.substr(start, i - start)));
    if (rows[0].size() != 1) throw parse_error("a one-row matrix must be written with nested brackets", start);
  }
  std::size_t n = rows.size();
  LocMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) throw parse_error("matrix is not square", 0);
    for (std::size_t c = 0; c < n; ++c) m(r, c) = parse_loc(rows[r][c]);
  }
  return m;
}

inline int matrix_rank_g(const LocMatrix& m) {
  int g = 1;
  for (auto& e : m.a) g = std::max(g, e.g());
  return g;
}

// ---------------------------------------------------------------------------
// Individual checks.

/// Integrating the exponential of a hairy Gaussian sum produces the wheel
/// expansion of the logarithmic trace of its matrix.
inline std::optional<std::string> wheels_once(const LocMatrix& M0, unsigned D,
                                              const std::string& label) {
  std::size_t n = M0.rows;
  // Struts identify a bead with its involute, so only the Hermitian part of
  // the matrix is representable on the diagram side; use it on both sides.
  LocMatrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M(i, j) = LocElement::scalar(Rat(1, 2)) * (M0(i, j) + M0(j, i).star());
  std::vector<std::string> bases;
  for (std::size_t i = 0; i < n; ++i) bases.push_back("x" + std::to_string(i + 1));
  DiagramSum G(D);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!M(i, j).is_zero())
        G += strut_sum(Color{bases[i], false}, Color{bases[j], false}, M(i, j), D, Rat(1, 2));
  DiagramSum GH = hair(G, D);
  std::vector<std::string> hb;
  for (int k = 1; k <= matrix_rank_g(M); ++k) hb.push_back("h" + std::to_string(k));
  DiagramSum Gp = GH - truncate_by_legs(GH, hb, 0);
  LocMatrix cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = LocElement::scalar(M(i, j).augment());
  Integrand I{cov, bases, exp_union(Gp)};
  DiagramSum lhs = integrate(I);
  DiagramSum rhs = exp_union(Rat(-1, 2) * wheels_from_cyclic(chi_prime(M, D), D));
  auto w = sum_diff(lhs, rhs);
  if (w) return "[" + label + "] " + *w;
  return std::nullopt;
}

inline std::optional<std::string> check_wheels(const Options& o) {
  unsigned D = eff_degree(o, 4);
  if (!o.matrix.empty()) return wheels_once(parse_matrix(o.matrix), D, o.matrix);
  if (auto w = wheels_once(LocMatrix::from_gr(gr_matrix_t1()), D, "[t1]")) return w;
  if (auto w = wheels_once(LocMatrix::from_gr(gr_matrix_two_minus_t1()), D, "[2-t1]")) return w;
  return wheels_once(LocMatrix::from_gr(gr_matrix_wrap2()), D, "wrap2");
}

/// The worked conjugation-derivative of the rank-two example matrix.
inline std::optional<std::string> check_eta_example(const Options& o) {
  unsigned cap = eff_degree(o, 2);
  LocMatrix M = LocMatrix::from_gr(gr_matrix_wrap2());
  HMatrix got = eta(M, 1);
  HElement h = HElement::h_power(1);
  HElement t1(LocElement::gen(1)), t1i(LocElement::gen(1, -1));
  HElement t2(LocElement::gen(2)), t2i(LocElement::gen(2, -1));
  HElement t2t1i(LocElement::gen(2) * LocElement::gen(1, -1));
  HElement t1t2i(LocElement::gen(1) * LocElement::gen(2, -1));
  // -t2 (t1^-1 h - h t1^-1)  and  -(t1 h - h t1) t2^-1.
  HElement want01 = Rat(-1) * (t2t1i * h) + t2 * h * t1i;
  HElement want10 = Rat(-1) * (t1 * h * t2i) + h * t1t2i;
  if (auto w = h_diff(got(0, 0), HElement::zero(), cap)) return "entry (0,0): " + *w;
  if (auto w = h_diff(got(1, 1), HElement::zero(), cap)) return "entry (1,1): " + *w;
  if (auto w = h_diff(got(0, 1), want01, cap)) return "entry (0,1): " + *w;
  if (auto w = h_diff(got(1, 0), want10, cap)) return "entry (1,0): " + *w;
  return std::nullopt;
}

/// The worked wrap-trace of the rank-two example matrix: the derivative of
/// the inverse as four rank-one terms, and the trace correction as four
/// selector presentations.
inline std::optional<std::string> check_wrap_trace(const Options& o) {
  unsigned cap = eff_degree(o, 3);
  GRMatrix core = gr_matrix_wrap2();
  LocMatrix M = LocMatrix::from_gr(core);
  LocMatrix Minv = herm_invert(M);
  HElement h = HElement::h_power(1);

  auto pres = [&](const GroupRingElement& s0, const GroupRingElement& s1,
                  const GroupRingElement& c0, const GroupRingElement& c1) {
    MatrixPresentation p;
    p.selector = {s0, s1};
    p.core = core;
    p.column = {c0, c1};
    return LocElement(std::move(p));
  };
  GroupRingElement z, one = GroupRingElement::one();
  GroupRingElement t1 = GroupRingElement::gen(1), t1i = GroupRingElement::gen(1, -1);
  GroupRingElement t2 = GroupRingElement::gen(2), t2i = GroupRingElement::gen(2, -1);
  GroupRingElement t2t1i = t2 * t1i, t1t2i = t1 * t2i;

  // eta(M^-1) = M^-1 (t2 t1^-1, 0)' h (0, 1) M^-1 + M^-1 (-t2, 0)' h (0, t1^-1) M^-1
  //           + M^-1 (0, t1)' h (t2^-1, 0) M^-1 + M^-1 (0, -1)' h (t1 t2^-1, 0) M^-1.
  struct RankOne {
    GroupRingElement c0, c1;  // column placed left of the wrap letter
    GroupRingElement r0, r1;  // row placed right of the wrap letter
  };
  std::vector<RankOne> parts = {{t2t1i, z, z, one},
                                {GroupRingElement() - t2, z, z, t1i},
                                {z, t1, t2i, z},
                                {z, GroupRingElement() - one, t1t2i, z}};
  HMatrix lhs = eta(Minv, 1);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      HElement want;
      std::vector<GroupRingElement> ei(2), ej(2);
      ei[i] = one;
      ej[j] = one;
      for (auto& p : parts) {
        LocElement left = pres(ei[0], ei[1], p.c0, p.c1);
        LocElement right = pres(p.r0, p.r1, ej[0], ej[1]);
        want += HElement(left) * h * HElement(right);
      }
      if (auto w = h_diff(lhs(i, j), want, cap))
        return "inverse-derivative entry (" + std::to_string(i) + "," + std::to_string(j) +
               "): " + *w;
    }

  // -1/2 tr(M^-1 eta(M)) = (1/2,0) M^-1 (0,t1)' h t2^-1 + (1/2,0) M^-1 (0,-1)' h t1 t2^-1
  //                      + (0,1/2) M^-1 (t2 t1^-1,0)' h + (0,1/2) M^-1 (-t2,0)' h t1^-1.
  GroupRingElement half(Rat(1, 2));
  HElement trace_lhs = Rat(-1, 2) * (HMatrix::from_loc(Minv) * eta(M, 1)).trace();
  HElement trace_rhs =
      HElement(pres(half, z, z, t1)) * h * HElement(LocElement::from_group_ring(t2i)) +
      HElement(pres(half, z, z, GroupRingElement() - one)) * h *
          HElement(LocElement::from_group_ring(t1t2i)) +
      HElement(pres(z, half, t2t1i, z)) * h +
      HElement(pres(z, half, GroupRingElement() - t2, z)) * h *
          HElement(LocElement::from_group_ring(t1i));
  if (auto w = h_diff(trace_lhs, trace_rhs, cap)) return "trace correction: " + *w;
  return std::nullopt;
}

/// With no matrix present, contracting the conjugation-derivative of a
/// bead-word diagram lands in the span of the local relations.
inline std::optional<std::string> check_wrap1(const Options& o) {
  int n = eff_cases(o, 6);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  return run_cases(o, "wrap1", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 6;
    Color z{"z", false}, w{"w", false};
    FreeWord tsite = FreeWord::gen(site, rand_int(rng, 0, 1) ? 1 : -1);
    Diagram d;
    switch (i % 3) {
      case 0: {
        d = caterpillar(rng, {wrap_color(true), z, w}, g, 1);
        d.edges[0].bead = Bead::word(tsite * rand_word(rng, g, 1));
        break;
      }
      case 1: {
        d = caterpillar(rng, {wrap_color(true), z, z, w}, g, 1);
        for (auto& e : d.edges)
          if (!d.is_leg(e.a.node) && !d.is_leg(e.b.node)) e.bead = Bead::word(tsite);
        break;
      }
      default: {
        d.legs = {wrap_color(true)};
        d.n_int = 1;
        d.edges.push_back({{1, 0}, {1, 1}, Bead::word(tsite * rand_word(rng, g, 1))});
        d.edges.push_back({{1, 2}, {0, 0}, Bead::word(rand_word(rng, g, 1))});
        break;
      }
    }
    DiagramSum rel = contract_h(eta_diagrams(DiagramSum::single(d, cap), site));
    if (rel.is_zero()) return std::nullopt;
    if (!zero_mod_relations(rel, g, 2))
      return "not annihilated by the local relations: " + rel.terms().begin()->first.str();
    return std::nullopt;
  });
}

/// Integrating over a set of colors all at once equals integrating out part
/// of them first and then the rest of the conditioned integrand.
inline std::optional<std::string> check_iterated_integration(const Options& o) {
  int n = eff_cases(o, 50);
  int g = std::max(1, o.g);
  return run_cases(o, "iterated-integration", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 10;
    int nb = 1 + (i % 3);
    std::vector<std::string> bases;
    std::vector<Color> xpool;
    for (int k = 0; k < nb; ++k) {
      bases.push_back("x" + std::to_string(k + 1));
      xpool.push_back(Color{bases.back(), false});
    }
    Color y{"y", false};
    LocMatrix M = LocMatrix::from_gr(rand_herm_gr(rng, static_cast<std::size_t>(nb), g, 2));

    DiagramSum R = DiagramSum::unit(cap);
    int terms = rand_int(rng, 1, 2);
    for (int t = 0; t < terms; ++t) {
      int legs = rand_int(rng, 2, 4);
      std::vector<Color> pool = xpool;
      pool.push_back(y);
      std::vector<Color> cs = draw_colors(rng, pool, legs);
      if (legs == 2 && cs[0].base != "y" && cs[1].base != "y") cs[0] = y;  // no base struts
      R.add(caterpillar(rng, cs, g, 2), rand_rat(rng));
    }

    std::vector<std::string> out;
    int outn = nb == 1 ? 1 : rand_int(rng, 1, nb - 1);
    for (int k = 0; k < outn; ++k) out.push_back(bases[static_cast<std::size_t>(k)]);

    Integrand I{M, bases, R};
    DiagramSum lhs = integrate(I);
    DiagramSum rhs = integrate(integrate_partial(I, out));
    return hair_diff(lhs, rhs, 4);
  });
}

/// Gluing a dual-legged sum onto a Gaussian exponential and integrating
/// equals integrating the self-glued (divergence) form.
inline std::optional<std::string> check_integration_by_parts(const Options& o) {
  int n = eff_cases(o, 50);
  int g = std::max(1, o.g);
  return run_cases(o, "integration-by-parts", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 14;
    bool small = (i % 10) < 7;
    int nx = (i % 2) + 1;
    std::vector<std::string> xall, xprime, xrest;
    std::vector<Color> xplain;
    for (int k = 0; k < nx; ++k) {
      xall.push_back("x" + std::to_string(k + 1));
      xplain.push_back(Color{xall.back(), false});
    }
    xprime.push_back(xall[0]);
    if (nx == 2 && i % 4 == 3) xprime.push_back(xall[1]);
    for (auto& b : xall)
      if (std::find(xprime.begin(), xprime.end(), b) == xprime.end()) xrest.push_back(b);
    Color y{"y", false};

    std::size_t np = xprime.size();
    LocMatrix M = LocMatrix::from_gr(rand_herm_gr(rng, np, g, small ? 1 : 2));

    // u: no duals, struts keep a spectator end.
    DiagramSum u = DiagramSum::unit(cap);
    if (rand_int(rng, 0, 1)) {
      int legs = rand_int(rng, 2, 3);
      std::vector<Color> pool = xplain;
      pool.push_back(y);
      std::vector<Color> cs = draw_colors(rng, pool, legs);
      if (legs == 2 && cs[0].base != "y" && cs[1].base != "y") cs[0] = y;
      u.add(caterpillar(rng, cs, g, 1), rand_rat(rng));
    }

    // s: duals over the bases, at most one base plain, struts keep a
    // spectator end; no strut joins two base legs of any duality.
    DiagramSum s = DiagramSum::unit(cap);
    int sterms = rand_int(rng, 1, small ? 1 : 2);
    for (int t = 0; t < sterms; ++t) {
      int duals = small ? 1 : rand_int(rng, 1, 2);
      std::vector<Color> cs;
      for (int k = 0; k < duals; ++k)
        cs.push_back(Color{xall[static_cast<std::size_t>(rand_int(rng, 0, nx - 1))], true});
      if (!small && rand_int(rng, 0, 1))
        cs.push_back(Color{xprime[static_cast<std::size_t>(rand_int(
                               rng, 0, static_cast<int>(np) - 1))],
                           false});
      cs.push_back(y);
      if (cs.size() == 2 && rand_int(rng, 0, 1)) cs.push_back(y);
      std::shuffle(cs.begin(), cs.end(), rng);
      s.add(caterpillar(rng, cs, g, 1), rand_rat(rng));
    }

    int C = max_base_legs(s, xall, true);
    int order = max_base_legs(s, xprime, false) + max_base_legs(u, xprime, false) + C;
    int K = (order + C) / 2 + 2;

    DiagramSum G(cap);
    for (std::size_t a = 0; a < np; ++a)
      for (std::size_t b = 0; b < np; ++b)
        if (!M(a, b).is_zero())
          G += strut_sum(Color{xprime[a], false}, Color{xprime[b], false}, M(a, b), cap,
                         Rat(1, 2));
    DiagramSum glued = flat_glue(s, disjoint_union(exp_union(G, K), u), xall);
    DiagramSum lhs = integrate(decompose(glued, xprime, order));

    DiagramSum rhs_sub = flat_glue(divergence(s, xprime), u, xrest);
    DiagramSum rhs = integrate(Integrand{M, xprime, rhs_sub});
    return hair_diff(lhs, rhs, 4);
  });
}

/// Site conjugation commutes with integration up to the wheel factor of the
/// conjugated matrix.
inline std::optional<std::string> check_varphi(const Options& o) {
  int n = eff_cases(o, 20);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  unsigned hcap = eff_degree(o, 3);
  return run_cases(o, "varphi", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 12;
    bool big = (i % 5) == 4;
    std::size_t nb = big ? 2 : 1;
    unsigned hc = big ? std::min(hcap, 2u) : hcap;
    std::vector<std::string> bases;
    std::vector<Color> xplain;
    for (std::size_t k = 0; k < nb; ++k) {
      bases.push_back("x" + std::to_string(k + 1));
      xplain.push_back(Color{bases.back(), false});
    }
    Color y{"y", false};
    LocMatrix M = LocMatrix::from_gr(rand_herm_gr(rng, nb, g, 1));

    DiagramSum R = DiagramSum::unit(cap);
    int rlegs = 0;
    if (rand_int(rng, 0, 1)) {
      int legs = rand_int(rng, 2, 3);
      std::vector<Color> pool = {y};
      if (!big && rand_int(rng, 0, 1)) pool.push_back(xplain[0]);
      std::vector<Color> cs = draw_colors(rng, pool, legs);
      if (legs == 2 && cs[0].base != "y" && cs[1].base != "y") cs[0] = y;
      Diagram d = caterpillar(rng, cs, g, 1);
      R.add(d, rand_rat(rng));
      for (auto& l : d.legs)
        if (l.base != "y") ++rlegs;
    }

    int order = 2 * static_cast<int>(hc) + rlegs;
    int K = static_cast<int>(hc) + (rlegs + 1) / 2 + 1;

    DiagramSum G(cap);
    for (std::size_t a = 0; a < nb; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        if (!M(a, b).is_zero())
          G += strut_sum(Color{bases[a], false}, Color{bases[b], false}, M(a, b), cap, Rat(1, 2));
    DiagramSum s = disjoint_union(exp_union(G, K), R);
    DiagramSum lhs = integrate(decompose(phi_diagrams(s, site, hc), bases, order));

    HMatrix PM(nb);
    for (std::size_t a = 0; a < nb; ++a)
      for (std::size_t b = 0; b < nb; ++b) PM(a, b) = phi_conj(M(a, b), site, hc);
    HMatrix T = HMatrix::from_loc(herm_invert(M)) * PM;
    // Circles carry at least one wrap leg each and the sides are compared at
    // no more than hc wrap legs, so hc union factors suffice.
    DiagramSum wheel_factor =
        exp_union(Rat(-1, 2) * circles_of_h(tr_log_unipotent(T, hc), cap), hc);
    DiagramSum rhs =
        disjoint_union(wheel_factor, phi_diagrams(integrate(Integrand{M, bases, R}), site, hc));

    std::vector<std::string> hbase = {"h"};
    lhs = truncate_by_legs(lhs, hbase, static_cast<int>(hc));
    rhs = truncate_by_legs(rhs, hbase, static_cast<int>(hc));
    return hair_diff(lhs, rhs, 4);
  });
}

/// The iterated slot-splice derivative divided by factorials matches the
/// degree parts of full conjugation on ring elements.
inline std::optional<std::string> check_etadeg3(const Options& o) {
  int n = eff_cases(o, 20);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  return run_cases(o, "etadeg3", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    int core = (i % 5 == 4) ? 3 : (i % 5 == 3 ? 0 : 2);
    LocElement x = rand_loc(rng, g, core);
    Rat fact(1);
    HElement power(x);
    for (unsigned k = 1; k <= 3; ++k) {
      fact *= Rat(1, static_cast<long long>(k));
      power = eta_hat(power, site);
      unsigned cap = k + (core >= 3 ? 1 : 2);
      HElement lhs = fact * power;
      HElement rhs = phi_conj(x, site, k).deg_h(k);
      if (auto w = h_diff(lhs, rhs, cap)) return "order " + std::to_string(k) + ": " + *w;
    }
    return std::nullopt;
  });
}

/// The diagram-level splice derivative: one application inserts a wrap leg on
/// every bead slot and adds the trace circle of the matrix; iterating it with
/// factorials matches the conjugation pushforward with its wheel factor.
inline DiagramSum diagram_eta_hat(const DiagramSum& v, const LocMatrix& M, int site) {
  DiagramSum r = eta_diagrams(v, site);
  if (M.rows > 0) {
    HMatrix t = HMatrix::from_loc(herm_invert(M)) * eta(M, site);
    r += Rat(-1, 2) * disjoint_union(v, circles_of_h(t.trace(), v.cap()));
  }
  return r;
}

inline std::optional<std::string> check_etadeg4(const Options& o) {
  int n = eff_cases(o, 6);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  return run_cases(o, "etadeg4", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 12;
    unsigned order = 1 + static_cast<unsigned>(i % 2);
    LocMatrix M;
    if (i % 3 != 0)
      M = LocMatrix::from_gr(rand_herm_gr(rng, static_cast<std::size_t>(1 + (i % 3 == 2)), g, 1));
    Color z{"z", false}, w{"w", false};
    std::vector<Color> cs = (i % 2 == 0) ? std::vector<Color>{z, w} : std::vector<Color>{z, z, w};
    Diagram seed = caterpillar(rng, cs, g, 1);
    DiagramSum V = DiagramSum::single(seed, cap);

    DiagramSum cur = V;
    Rat fact(1);
    for (unsigned k = 1; k <= order; ++k) {
      cur = diagram_eta_hat(cur, M, site);
      fact *= Rat(1, static_cast<long long>(k));
    }
    DiagramSum lhs = fact * cur;

    DiagramSum pd = phi_diagrams(V, site, order);
    if (M.rows > 0) {
      HMatrix PM(M.rows);
      for (std::size_t a = 0; a < M.rows; ++a)
        for (std::size_t b = 0; b < M.cols; ++b) PM(a, b) = phi_conj(M(a, b), site, order);
      HMatrix T = HMatrix::from_loc(herm_invert(M)) * PM;
      // Each circle carries at least one wrap leg, so unions of more than
      // `order` factors cannot reach the compared slice.
      pd = disjoint_union(
          pd, exp_union(Rat(-1, 2) * circles_of_h(tr_log_unipotent(T, order), cap), order));
    }
    DiagramSum rhs = legs_exactly(pd, {"h"}, static_cast<int>(order));
    return hair_diff(lhs, rhs, 4);
  });
}

/// The logarithmic trace is additive under products and block sums.
inline std::optional<std::string> check_chi_additivity(const Options& o) {
  int n = eff_cases(o, 20);
  int g = std::max(1, o.g);
  unsigned cap = eff_degree(o, 4);
  return run_cases(o, "chi-additivity", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    std::size_t nb = static_cast<std::size_t>(1 + (i % 2));
    auto rand_eps_invertible = [&](std::size_t m) {
      GRMatrix a(m, m);
      std::vector<int> rowsum(m, 0);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
          if (r != c && rand_int(rng, 0, 1)) {
            a(r, c) = rand_gr_augzero(rng, g, 2);
            if (rand_int(rng, 0, 1)) {
              a(r, c).add_term(rand_word_nonempty(rng, g, 2), rand_int(rng, 0, 1) ? 1 : -1);
              ++rowsum[r];
            }
          }
      for (std::size_t r = 0; r < m; ++r) {
        a(r, r) = GroupRingElement(Rat(rowsum[r] + rand_int(rng, 1, 2)));
        if (rand_int(rng, 0, 1)) a(r, r) = a(r, r) + rand_gr_augzero(rng, g, 2);
      }
      return LocMatrix::from_gr(a);
    };

    LocMatrix A = rand_eps_invertible(nb), B = rand_eps_invertible(nb);
    if (auto w = cyc_diff(chi_prime(A * B, cap), chi_prime(A, cap) + chi_prime(B, cap)))
      return "product: " + *w;

    LocMatrix C(2 * nb, 2 * nb);
    for (std::size_t r = 0; r < 2 * nb; ++r)
      for (std::size_t c = 0; c < 2 * nb; ++c) C(r, c) = LocElement::zero();
    for (std::size_t r = 0; r < nb; ++r)
      for (std::size_t c = 0; c < nb; ++c) {
        C(r, c) = A(r, c);
        C(nb + r, nb + c) = B(r, c);
      }
    if (auto w = cyc_diff(chi_prime(C, cap), chi_prime(A, cap) + chi_prime(B, cap)))
      return "block sum: " + *w;

    auto rand_unipotent = [&](std::size_t m) {
      HMatrix U = HMatrix::identity(m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
          if (rand_int(rng, 0, 1))
            U(r, c) += HElement(rand_loc(rng, g, 1)) *
                       HElement::h_power(static_cast<unsigned>(rand_int(rng, 1, 2))) *
                       HElement(rand_loc(rng, g, 0));
      return U;
    };
    HMatrix U = rand_unipotent(nb), V = rand_unipotent(nb);
    if (auto w = cyc_diff(chi_h(U * V, cap), chi_h(U, cap) + chi_h(V, cap)))
      return "wrap-letter additivity: " + *w;

    LocMatrix f1(1, 1), f2(1, 1);
    f1(0, 0) = rand_loc_unit(rng, g, 2);
    f2(0, 0) = rand_loc_unit(rng, g, 2);
    LocMatrix prod(1, 1);
    prod(0, 0) = f1(0, 0) * f2(0, 0);
    if (auto w = cyc_diff(chi_prime(prod, cap), chi_prime(f1, cap) + chi_prime(f2, cap)))
      return "localized product: " + *w;

    if (i == 0) {
      CyclicSeries idtrace = chi_prime(LocMatrix::identity(2), cap);
      if (!idtrace.is_zero()) return "identity matrix: expected zero, got " + idtrace.str();
    }
    return std::nullopt;
  });
}

/// The degree-one conjugation derivative is a derivation; on an inverse it
/// conjugates by the inverse; on generators it is supported at the site.
inline std::optional<std::string> check_eta_leibniz(const Options& o) {
  int n = eff_cases(o, 20);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  return run_cases(o, "eta-leibniz", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 3;
    LocElement x = rand_loc(rng, g, 2), y = rand_loc(rng, g, 2);
    HElement lhs = eta(x * y, site);
    HElement rhs = eta(x, site) * HElement(y) + HElement(x) * eta(y, site);
    if (auto w = h_diff(lhs, rhs, cap)) return "derivation rule: " + *w;

    if (i % 2 == 0) {
      std::size_t nb = static_cast<std::size_t>(1 + (i % 4 == 2));
      LocMatrix A = LocMatrix::from_gr(rand_herm_gr(rng, nb, g, 1));
      LocMatrix Ainv = herm_invert(A);
      HMatrix Ai = HMatrix::from_loc(Ainv);
      HMatrix got = eta(Ainv, site);
      HMatrix want = Ai * eta(A, site) * Ai;
      for (std::size_t r = 0; r < nb; ++r)
        for (std::size_t c = 0; c < nb; ++c)
          if (auto w = h_diff(got(r, c), Rat(-1) * want(r, c), cap))
            return "inverse rule entry (" + std::to_string(r) + "," + std::to_string(c) +
                   "): " + *w;
    }

    for (int j = 1; j <= g; ++j) {
      HElement got = eta(LocElement::gen(j), site);
      HElement want;
      if (j == site) {
        HElement t(LocElement::gen(j)), h = HElement::h_power(1);
        want = t * h + Rat(-1) * (h * t);
      }
      if (auto w = h_diff(got, want, 2)) return "generator t" + std::to_string(j) + ": " + *w;
    }
    return std::nullopt;
  });
}

/// The slot-splice derivative kills the wrap letter, is a derivation, and its
/// iterate on a generator matches the frozen hand expansion.
inline std::optional<std::string> check_eta_hat_rules(const Options& o) {
  int n = eff_cases(o, 20);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  return run_cases(o, "eta-hat-rules", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    if (auto w = h_diff(eta_hat(HElement::h_power(1), site), HElement::zero(), 3))
      return "wrap letter not annihilated: " + *w;

    HElement X = rand_h(rng, g, 2), Y = rand_h(rng, g, 2);
    HElement lhs = eta_hat(X * Y, site);
    HElement rhs = eta_hat(X, site) * Y + X * eta_hat(Y, site);
    if (auto w = h_diff(lhs, rhs, 3)) return "derivation rule: " + *w;

    if (i == 0) {
      HElement t(LocElement::gen(1)), h = HElement::h_power(1), h2 = HElement::h_power(2);
      HElement got = Rat(1, 2) * eta_hat_power(t, 1, 2);
      HElement want = Rat(1, 2) * (t * h2) + Rat(1, 2) * (h2 * t) + Rat(-1) * (h * t * h);
      if (auto w = h_diff(got, want, 4)) return "second-order expansion of t1: " + *w;
    }
    return std::nullopt;
  });
}

/// The exponential-letter expansion is a ring map matching augmentation and
/// the wrap-free part of conjugation.
inline std::optional<std::string> check_magnus_ring(const Options& o) {
  int n = eff_cases(o, 30);
  int g = std::max(1, o.g);
  int site = eff_site(o);
  unsigned cap = eff_degree(o, 5);
  return run_cases(o, "magnus-ring", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    GroupRingElement x = rand_gr(rng, g, 2, 3), y = rand_gr(rng, g, 2, 3);
    if (auto w = series_diff(magnus_expand(x * y, cap),
                             magnus_expand(x, cap) * magnus_expand(y, cap)))
      return "multiplicativity: " + *w;
    if (auto w = series_diff(magnus_expand(x + y, cap),
                             magnus_expand(x, cap) + magnus_expand(y, cap)))
      return "additivity: " + *w;
    if (magnus_expand(x, cap).constant_term() != x.augment())
      return "constant term differs from augmentation on " + x.str();
    LocElement lx = rand_loc(rng, g, 2);
    if (auto w = h_diff(phi_conj(lx, site, 2).deg_h(0), HElement(lx), 3))
      return "wrap-free part of conjugation is not the identity: " + *w;
    (void)i;
    return std::nullopt;
  });
}

/// Structural identities of the pairing, the partial gluing, the divergence
/// and the contraction.
inline std::optional<std::string> check_glue_identities(const Options& o) {
  int n = eff_cases(o, 12);
  int g = std::max(1, o.g);
  return run_cases(o, "glue-identities", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 12;
    Color x{"x1", false}, dx{"x1", true}, y{"y1", false}, z{"z", false};
    std::vector<std::string> X = {"x1"};

    {  // (a) renaming the paired base does not change the pairing
      DiagramSum A(cap), B(cap);
      A.add(caterpillar(rng, {dx, dx, z}, g, 1), rand_rat(rng));
      B.add(caterpillar(rng, {x, x, z}, g, 1), rand_rat(rng));
      B.add(caterpillar(rng, draw_colors(rng, {x, z}, 3), g, 1), rand_rat(rng));
      DiagramSum lhs = pair_all(A, B, X);
      DiagramSum rhs = pair_all(recolor_legs(A, dx, Color{"w", true}),
                                recolor_legs(B, x, Color{"w", false}), {"w"});
      if (auto w = sum_diff(lhs, rhs)) return "(a) base renaming: " + *w;
    }

    {  // (b) pairing a union = partial-gluing one factor, then pairing
      int d1 = rand_int(rng, 1, 2), d2 = rand_int(rng, 1, 2);
      DiagramSum A1(cap), A2(cap), B(cap);
      std::vector<Color> c1(static_cast<std::size_t>(d1), dx), c2(static_cast<std::size_t>(d2), dx);
      c1.push_back(z);
      c2.push_back(z);
      if (d1 == 1) c1.push_back(z);
      if (d2 == 1) c2.push_back(z);
      A1.add(caterpillar(rng, c1, g, 1), rand_rat(rng));
      A2.add(caterpillar(rng, c2, g, 1), rand_rat(rng));
      std::vector<Color> cb(static_cast<std::size_t>(d1 + d2), x);
      cb.push_back(z);
      B.add(caterpillar(rng, cb, g, 1), rand_rat(rng));
      DiagramSum lhs = pair_all(disjoint_union(A1, A2), B, X);
      DiagramSum rhs = pair_all(A2, flat_glue(A1, B, X), X);
      if (auto w = sum_diff(lhs, rhs)) return "(b) union against partial gluing: " + *w;
    }

    {  // (c) partial gluing = pairing against a keep-or-rename substitution
      int d = rand_int(rng, 1, 2);
      DiagramSum A(cap), B(cap);
      std::vector<Color> ca(static_cast<std::size_t>(d), dx);
      ca.push_back(z);
      if (d == 1) ca.push_back(z);
      A.add(caterpillar(rng, ca, g, 1), rand_rat(rng));
      std::vector<Color> cb = draw_colors(rng, {x, x, z}, rand_int(rng, 2, 3));
      cb.push_back(x);
      B.add(caterpillar(rng, cb, g, 1), rand_rat(rng));
      Color v{"v", false}, dv{"v", true};
      DiagramSum lhs = flat_glue(A, B, X);
      DiagramSum rhs = pair_all(recolor_legs(A, dx, dv),
                                relabel_legs_linear(B, x, {{x}, {v}}), {"v"});
      if (auto w = sum_diff(lhs, rhs)) return "(c) partial gluing via substitution: " + *w;
    }

    {  // (d) a partial gluing of exponentials is the exponential of its
       // connected part, through gluing weight min(Ka, Kb)
      int K = 4;
      DiagramSum a(cap), b(cap);
      a.add(caterpillar(rng, {dx, z}, g, 1), rand_rat(rng));
      a.add(caterpillar(rng, {dx, dx, z}, g, 1), rand_rat(rng));
      b.add(caterpillar(rng, {x, z}, g, 1), rand_rat(rng));
      if (rand_int(rng, 0, 1)) b.add(caterpillar(rng, {x, x, z}, g, 1), rand_rat(rng));
      DiagramSum L = flat_glue(exp_union(a, K), exp_union(b, K), X);
      DiagramSum c = connected_part(L);
      if (auto w = sum_diff(filter_weight(L, K), filter_weight(exp_union(c, K), K)))
        return "(d) exponential of the connected part: " + *w;
    }

    {  // (e) pairing or partial-gluing against a Gaussian strut exponential
       // substitutes legs linearly
      std::size_t nb = static_cast<std::size_t>(rand_int(rng, 1, 2));
      std::vector<std::string> XB;
      std::vector<Color> xs, ys;
      for (std::size_t k = 0; k < nb; ++k) {
        XB.push_back("x" + std::to_string(k + 1));
        xs.push_back(Color{XB.back(), false});
        ys.push_back(Color{"y" + std::to_string(k + 1), false});
      }
      GRMatrix M(nb, nb);
      for (std::size_t r = 0; r < nb; ++r)
        for (std::size_t c = 0; c < nb; ++c)
          if (rand_int(rng, 0, 1)) M(r, c) = rand_gr(rng, g, 2, 2);
      DiagramSum E(cap);
      for (std::size_t r = 0; r < nb; ++r)
        for (std::size_t c = 0; c < nb; ++c)
          if (!M(r, c).is_zero())
            E += strut_sum(Color{XB[c], true}, ys[r], M(r, c), cap);
      DiagramSum A(cap);
      std::vector<Color> pool = xs;
      pool.push_back(z);
      std::vector<Color> ca = draw_colors(rng, pool, rand_int(rng, 2, 3));
      ca.push_back(xs[0]);
      A.add(caterpillar(rng, ca, g, 1), rand_rat(rng));
      int kmax = max_base_legs(A, XB, false);
      DiagramSum EX = exp_union(E, kmax);

      DiagramSum full = A, partial = A;
      for (std::size_t c = 0; c < nb; ++c) {
        std::vector<LegImage> images, keep;
        for (std::size_t r = 0; r < nb; ++r)
          for (auto& [w, q] : M(r, c).terms()) images.push_back({ys[r], Bead::word(w), q});
        keep = images;
        keep.push_back({xs[c]});
        full = relabel_legs_linear(full, xs[c], images);
        partial = relabel_legs_linear(partial, xs[c], keep);
      }
      if (auto w = sum_diff(pair_all(EX, A, XB), full))
        return "(e) full substitution: " + *w;
      if (auto w = sum_diff(flat_glue(EX, A, XB), partial))
        return "(e) partial substitution: " + *w;
    }

    {  // (g) partial-gluing a bead-free strut exponential onto an exponential
       // doubles legs inside the exponent
      DiagramSum bb(cap);
      std::vector<Color> cb = draw_colors(rng, {x, z}, 2);
      cb.push_back(x);
      bb.add(caterpillar(rng, cb, g, 1), rand_rat(rng));
      int Kb = 2;
      DiagramSum E = strut_sum(dx, y, GroupRingElement::one(), cap);
      DiagramSum lhs = flat_glue(exp_union(E, 2 * Kb * 2), exp_union(bb, Kb), X);
      DiagramSum rhs = exp_union(relabel_legs_linear(bb, x, {{x}, {y}}), Kb);
      if (auto w = sum_diff(lhs, rhs)) return "(g) strut exponential on an exponential: " + *w;
    }

    {  // (h) contracting split wrap colors equals merging them first
      Color hp = wrap_prime_color(), hpp{"h''", false}, dz{"z0", true}, w0{"w", false};
      DiagramSum s(cap);
      std::vector<Color> cs;
      int a = rand_int(rng, 0, 2), b = rand_int(rng, 0, std::min(2, 3 - a));
      for (int k = 0; k < a; ++k) cs.push_back(hp);
      for (int k = 0; k < b; ++k) cs.push_back(hpp);
      cs.push_back(dz);
      while (cs.size() < 3) cs.push_back(w0);
      std::shuffle(cs.begin(), cs.end(), rng);
      s.add(caterpillar(rng, cs, g, 1), rand_rat(rng));
      DiagramSum split = relabel_legs_linear(s, dz, {{Color{"h'", true}}, {Color{"h''", true}}});
      DiagramSum lhs = contract_color(contract_color(split, "h'"), "h''");
      DiagramSum merged = recolor_legs(recolor_legs(s, hp, wrap_color()), hpp, wrap_color());
      merged = recolor_legs(merged, dz, wrap_color(true));
      DiagramSum rhs = contract_h(merged);
      if (auto w = sum_diff(lhs, rhs)) return "(h) split wrap contraction: " + *w;
    }
    return std::nullopt;
  });
}

/// The doubled-border matrix [[0, I], [I, L]] inverts exactly to
/// [[-L, I], [I, 0]] for Hermitian L.
inline std::optional<std::string> check_lkG(const Options& o) {
  int n = eff_cases(o, 10);
  int g = std::max(1, o.g);
  return run_cases(o, "lkG", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    std::size_t m = 3;
    GRMatrix L = rand_herm_gr_free(rng, m, g, 2);
    GRMatrix X(2 * m, 2 * m), Y(2 * m, 2 * m);
    for (std::size_t r = 0; r < m; ++r) {
      X(r, m + r) = GroupRingElement::one();
      X(m + r, r) = GroupRingElement::one();
      Y(r, m + r) = GroupRingElement::one();
      Y(m + r, r) = GroupRingElement::one();
      for (std::size_t c = 0; c < m; ++c) {
        X(m + r, m + c) = L(r, c);
        Y(r, c) = GroupRingElement() - L(r, c);
      }
    }
    if (!(X * Y == GRMatrix::identity(2 * m)) || !(Y * X == GRMatrix::identity(2 * m)))
      return std::optional<std::string>("polynomial product with the closed inverse is not the identity");
    LocMatrix inv = herm_invert(LocMatrix::from_gr(X));
    if (!loc_equal(inv, LocMatrix::from_gr(Y), 4))
      return std::optional<std::string>("presented inverse does not expand to the closed form");
    (void)i;
    return std::nullopt;
  });
}

/// Ring axioms, involution, augmentation and inverses in the localization.
inline std::optional<std::string> check_loc_arith(const Options& o) {
  int n = eff_cases(o, 100);
  int g = std::max(1, o.g);
  unsigned cap = eff_degree(o, 6);
  return run_cases(o, "loc-arith", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    LocElement s = rand_loc(rng, g, 2), t = rand_loc(rng, g, 2), u = rand_loc(rng, g, 2);
    if (!loc_equal((s * t) * u, s * (t * u), cap))
      return std::optional<std::string>("associativity fails on " + s.str() + " ; " + t.str() + " ; " + u.str());
    if (!loc_equal(s * (t + u), s * t + s * u, cap))
      return std::optional<std::string>("distributivity fails");
    if (!loc_equal((s + t) - t, s, cap)) return std::optional<std::string>("additive cancellation fails");
    if (!loc_equal((s * t).star(), t.star() * s.star(), cap))
      return std::optional<std::string>("involution is not an anti-homomorphism");
    if ((s * t).augment() != s.augment() * t.augment())
      return std::optional<std::string>("augmentation is not multiplicative");
    if (i % 2 == 0) {
      LocElement v = rand_loc_unit(rng, g, 2);
      if (!loc_equal(v * v.invert(), LocElement::one(), cap))
        return std::optional<std::string>("right inverse fails on " + v.str());
      if (!loc_equal(v.invert() * v, LocElement::one(), cap))
        return std::optional<std::string>("left inverse fails on " + v.str());
      if (!loc_equal(v.invert().invert(), v, cap))
        return std::optional<std::string>("double inverse fails on " + v.str());
      if (!loc_equal(v.invert().star(), v.star().invert(), cap))
        return std::optional<std::string>("involution does not commute with inversion");
    }
    return std::nullopt;
  });
}

/// The complete contraction of a one-lobe linking specification against an
/// independently enumerated matching table.
inline std::optional<std::string> check_contraction(const Options& o) {
  int n = eff_cases(o, 10);
  int g = std::max(1, o.g);
  return run_cases(o, "contraction", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 2;
    ClasperSpec spec;
    spec.n = 1;
    spec.lk.assign(6, std::vector<GroupRingElement>(6));
    for (int p = 0; p < 6; ++p)
      for (int q = p + 1; q < 6; ++q) {
        GroupRingElement e;
        if (i == 0 ? false : rand_int(rng, 0, 2) > 0) e = rand_gr(rng, g, 2, 2);
        spec.lk[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] = e;
        spec.lk[static_cast<std::size_t>(q)][static_cast<std::size_t>(p)] = e.involute();
      }
    DiagramSum got = complete_contraction(spec, cap);
    if (i == 0) {
      if (!got.is_zero()) return std::optional<std::string>("zero linking must contract to zero");
      return std::nullopt;
    }
    static const int table[15][6] = {
        {0, 1, 2, 3, 4, 5}, {0, 1, 2, 4, 3, 5}, {0, 1, 2, 5, 3, 4}, {0, 2, 1, 3, 4, 5},
        {0, 2, 1, 4, 3, 5}, {0, 2, 1, 5, 3, 4}, {0, 3, 1, 2, 4, 5}, {0, 3, 1, 4, 2, 5},
        {0, 3, 1, 5, 2, 4}, {0, 4, 1, 2, 3, 5}, {0, 4, 1, 3, 2, 5}, {0, 4, 1, 5, 2, 3},
        {0, 5, 1, 2, 3, 4}, {0, 5, 1, 3, 2, 4}, {0, 5, 1, 4, 2, 3}};
    DiagramSum want(cap);
    for (auto& row : table) {
      auto& l01 = spec.lk[static_cast<std::size_t>(row[0])][static_cast<std::size_t>(row[1])];
      auto& l23 = spec.lk[static_cast<std::size_t>(row[2])][static_cast<std::size_t>(row[3])];
      auto& l45 = spec.lk[static_cast<std::size_t>(row[4])][static_cast<std::size_t>(row[5])];
      for (auto& [w1, c1] : l01.terms())
        for (auto& [w2, c2] : l23.terms())
          for (auto& [w3, c3] : l45.terms()) {
            Diagram d;
            d.n_int = 2;
            auto edge = [&](int p, int q, const FreeWord& w) {
              d.edges.push_back({{p / 3, static_cast<int8_t>(p % 3)},
                                 {q / 3, static_cast<int8_t>(q % 3)},
                                 Bead::word(w)});
            };
            edge(row[0], row[1], w1);
            edge(row[2], row[3], w2);
            edge(row[4], row[5], w3);
            want.add(d, c1 * c2 * c3);
          }
    }
    return sum_diff(got, want);
  });
}

/// Right-multiplying one base color by a group word and conjugating the
/// covariance accordingly does not change the integral.
inline std::optional<std::string> check_push_invariance(const Options& o) {
  int n = eff_cases(o, 10);
  int g = std::max(1, o.g);
  return run_cases(o, "push-invariance", n, [&](int i, Rng& rng) -> std::optional<std::string> {
    unsigned cap = 10;
    std::size_t nb = static_cast<std::size_t>(1 + (i % 2));
    std::vector<std::string> bases;
    std::vector<Color> xplain;
    for (std::size_t k = 0; k < nb; ++k) {
      bases.push_back("x" + std::to_string(k + 1));
      xplain.push_back(Color{bases.back(), false});
    }
    Color y{"y", false};
    LocMatrix M = LocMatrix::from_gr(rand_herm_gr(rng, nb, g, 1));
    DiagramSum R = DiagramSum::unit(cap);
    for (int t = 0, tn = rand_int(rng, 1, 2); t < tn; ++t) {
      std::vector<Color> pool = xplain;
      pool.push_back(y);
      std::vector<Color> cs = draw_colors(rng, pool, rand_int(rng, 2, 3));
      if (cs.size() == 2 && cs[0].base != "y" && cs[1].base != "y") cs[0] = y;
      R.add(caterpillar(rng, cs, g, 1), rand_rat(rng));
    }
    std::size_t k = static_cast<std::size_t>(rand_int(rng, 0, static_cast<int>(nb) - 1));
    FreeWord f = rand_word_nonempty(rng, g, 2);

    LocMatrix D = LocMatrix::identity(nb);
    GroupRingElement fg;
    fg.add_term(f, 1);
    D(k, k) = LocElement(fg);
    LocMatrix M2 = D.star() * M * D;

    DiagramSum lhs = integrate(Integrand{M, bases, R});
    DiagramSum rhs =
        integrate(Integrand{M2, bases, push_group(R, Color{bases[k], false}, f)});
    return hair_diff(lhs, rhs, 4);
  });
}

// ---------------------------------------------------------------------------
// Registry.

struct IdentityInfo {
  std::string name;
  std::string summary;
  std::function<std::optional<std::string>(const Options&)> fn;
};

inline const std::vector<IdentityInfo>& registry() {
  static const std::vector<IdentityInfo> r = {
      {"wheels", "integral of a hairy Gaussian exponential equals the wheel expansion",
       check_wheels},
      {"eta-example", "worked conjugation-derivative of the rank-two example matrix",
       check_eta_example},
      {"wrap-trace", "worked inverse-derivative and trace correction of the example matrix",
       check_wrap_trace},
      {"wrap1", "contracted derivative of a bead-word diagram dies modulo local relations",
       check_wrap1},
      {"iterated-integration", "integrating all colors equals integrating them in stages",
       check_iterated_integration},
      {"integration-by-parts", "dual legs against a Gaussian equal the divergence form",
       check_integration_by_parts},
      {"varphi", "site conjugation commutes with integration up to a wheel factor",
       check_varphi},
      {"etadeg3", "iterated splice derivative matches conjugation degree parts on ring elements",
       check_etadeg3},
      {"etadeg4", "iterated splice derivative matches the conjugation pushforward on diagrams",
       check_etadeg4},
      {"chi-additivity", "the logarithmic trace is additive under products and block sums",
       check_chi_additivity},
      {"eta-leibniz", "the degree-one derivative is a derivation with the inverse rule",
       check_eta_leibniz},
      {"eta-hat-rules", "the splice derivative kills the wrap letter and is a derivation",
       check_eta_hat_rules},
      {"magnus-ring", "the exponential-letter expansion is a truncation-compatible ring map",
       check_magnus_ring},
      {"glue-identities", "structural identities of pairing, partial gluing and contraction",
       check_glue_identities},
      {"lkG", "the doubled-border matrix inverts to its closed form", check_lkG},
      {"loc-arith", "ring, involution and inversion axioms of the localization",
       check_loc_arith},
      {"contraction", "complete contraction against an independent matching table",
       check_contraction},
      {"push-invariance", "pushing a group word onto a base color preserves the integral",
       check_push_invariance},
  };
  return r;
}

inline std::string describe(const Options& o) {
  std::string s = "g=" + std::to_string(o.g) +
                  " degree=" + (o.degree >= 0 ? std::to_string(o.degree) : std::string("default")) +
                  " seed=" + std::to_string(o.seed) +
                  " cases=" + (o.cases > 0 ? std::to_string(o.cases) : std::string("default")) +
                  " site=" + std::to_string(o.site);
  if (!o.matrix.empty()) s += " matrix=" + o.matrix;
  return s;
}

inline Report run_identity(const IdentityInfo& info, const Options& o) {
  Report r;
  r.identity = info.name;
  r.params = describe(o);
  auto t0 = std::chrono::steady_clock::now();
  try {
    auto w = info.fn(o);
    r.pass = !w.has_value();
    if (w) r.witness = *w;
  } catch (const std::exception& e) {
    r.pass = false;
    r.witness = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline const IdentityInfo* find_identity(const std::string& name) {
  for (auto& info : registry())
    if (info.name == name) return &info;
  return nullptr;
}

inline Report run_identity(const std::string& name, const Options& o) {
  const IdentityInfo* info = find_identity(name);
  if (!info) throw error("unknown identity: " + name);
  return run_identity(*info, o);
}

}  // namespace ratkon::checks
