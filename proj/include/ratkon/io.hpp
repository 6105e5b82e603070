#pragma once

#include <cctype>
#include <string>

#include <nlohmann/json.hpp>

#include "ratkon/contraction.hpp"
#include "ratkon/gaussian.hpp"

namespace ratkon {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Expression parsing: rationals, generators t1, t2, ..., products, sums,
// integer powers (negative powers of non-monomials become presentations).

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  LocElement parse() {
    LocElement e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw parse_error("trailing input", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  LocElement expr() {
    LocElement acc = eat('-') ? Rat(-1) * term() : term();
    while (true) {
      if (eat('+'))
        acc = acc + term();
      else if (eat('-'))
        acc = acc - term();
      else
        return acc;
    }
  }

  LocElement term() {
    LocElement acc = factor();
    while (true) {
      if (eat('*')) {
        acc = acc * factor();
      } else {
        char c = peek();
        // implicit product before '(' or 't'
        if (c == '(' || c == 't')
          acc = acc * factor();
        else
          return acc;
      }
    }
  }

  LocElement factor() {
    LocElement base = atom();
    if (eat('^')) {
      bool neg = eat('-');
      long n = integer();
      LocElement p = LocElement::one();
      LocElement b = neg ? base.invert() : base;
      for (long k = 0; k < n; ++k) p = p * b;
      return p;
    }
    return base;
  }

  LocElement atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw parse_error("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      LocElement e = expr();
      if (!eat(')')) throw parse_error("expected ')'", pos_);
      return e;
    }
    if (c == 't') {
      ++pos_;
      long i = integer();
      if (i < 1) throw parse_error("generator index must be >= 1", pos_);
      return LocElement::gen(static_cast<int>(i));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int num = natural();
      if (eat('/')) {
        Int den = natural();
        if (den == 0) throw parse_error("zero denominator", pos_);
        return LocElement::scalar(Rat(num, den));
      }
      return LocElement::scalar(Rat(num));
    }
    throw parse_error(std::string("unexpected character '") + c + "'", pos_);
  }

  Int natural() {
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      throw parse_error("expected a number", pos_);
    Int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  long integer() {
    bool neg = eat('-');
    Int v = natural();
    long r = static_cast<long>(v);
    return neg ? -r : r;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline LocElement parse_loc(const std::string& s) { return ExprParser(s).parse(); }

inline GroupRingElement parse_gr(const std::string& s) {
  LocElement e = parse_loc(s);
  if (!e.is_polynomial()) throw parse_error("expression is not polynomial", 0);
  return e.gr();
}

/// Parses a series word like "h h1 h'" (space separated letters).
inline NCWord parse_ncword(const std::string& s) {
  NCWord w;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    if (s[i] != 'h') throw parse_error("expected letter 'h...'", i);
    ++i;
    if (i < s.size() && s[i] == '\'') {
      w.push_back(kLetterHPrime);
      ++i;
    } else if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      int v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        v = v * 10 + (s[i++] - '0');
      w.push_back(static_cast<NCLetter>(v));
    } else {
      w.push_back(kLetterH);
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// JSON codecs.  Ring elements travel as expression strings; structures as
// objects.

inline json rat_json(const Rat& r) { return to_string(r); }
inline Rat json_rat(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<long>());
  LocElement e = parse_loc(j.get<std::string>());
  if (!e.is_polynomial() || !e.gr().is_scalar()) throw parse_error("expected a rational", 0);
  return e.augment();
}

inline json gr_json(const GroupRingElement& x) { return x.str(); }
inline GroupRingElement json_gr(const json& j) { return parse_gr(j.get<std::string>()); }

inline json presentation_json(const MatrixPresentation& p) {
  json sel = json::array(), col = json::array(), core = json::array();
  for (auto& e : p.selector) sel.push_back(gr_json(e));
  for (auto& e : p.column) col.push_back(gr_json(e));
  for (std::size_t i = 0; i < p.core.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < p.core.cols; ++j) row.push_back(gr_json(p.core(i, j)));
    core.push_back(row);
  }
  return json{{"selector", sel}, {"core", core}, {"column", col}};
}

inline MatrixPresentation json_presentation(const json& j) {
  MatrixPresentation p;
  for (auto& e : j.at("selector")) p.selector.push_back(json_gr(e));
  for (auto& e : j.at("column")) p.column.push_back(json_gr(e));
  const json& core = j.at("core");
  std::size_t n = core.size();
  p.core = GRMatrix(n, n == 0 ? 0 : core[0].size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < p.core.cols; ++k) p.core(i, k) = json_gr(core[i][k]);
  return p;
}

inline json loc_json(const LocElement& x) {
  if (x.is_polynomial()) return json{{"gr", gr_json(x.gr())}};
  return json{{"presentation", presentation_json(x.presentation())}};
}

inline LocElement json_loc(const json& j) {
  if (j.is_string()) return parse_loc(j.get<std::string>());
  if (j.contains("gr")) return LocElement(json_gr(j.at("gr")));
  return LocElement(json_presentation(j.at("presentation")));
}

inline json locmatrix_json(const LocMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(loc_json(m(i, j)));
    rows.push_back(row);
  }
  return json{{"entries", rows}};
}

inline LocMatrix json_locmatrix(const json& j) {
  const json& rows = j.is_object() ? j.at("entries") : j;
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows[0].size();
  LocMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < c; ++k) m(i, k) = json_loc(rows[i][k]);
  return m;
}

inline json ncseries_json(const NCSeries& s) {
  json terms = json::array();
  for (auto& [w, c] : s.terms()) terms.push_back(json{{"word", word_str(w)}, {"coef", rat_json(c)}});
  return json{{"cap", s.cap()}, {"terms", terms}};
}

inline json cyclic_json(const CyclicSeries& s) {
  json terms = json::array();
  for (auto& [w, c] : s.terms()) terms.push_back(json{{"word", word_str(w)}, {"coef", rat_json(c)}});
  return json{{"cap", s.cap()}, {"terms", terms}};
}

inline json color_json(const Color& c) { return c.str(); }
inline Color json_color(const json& j) {
  std::string s = j.get<std::string>();
  if (!s.empty() && s[0] == '@') return Color{s.substr(1), true};
  return Color{s, false};
}

inline json bead_json(const Bead& b) {
  json fs = json::array();
  for (auto& f : b.factors()) {
    if (std::holds_alternative<FreeWord>(f))
      fs.push_back(json{{"word", std::get<FreeWord>(f).str()}});
    else
      fs.push_back(json{{"loc", loc_json(*std::get<LocAtom>(f))}});
  }
  return fs;
}

inline Bead json_bead(const json& j) {
  Bead b;
  if (j.is_string()) return Bead::word(parse_gr(j.get<std::string>()).terms().begin()->first);
  for (auto& f : j) {
    if (f.contains("word")) {
      GroupRingElement g = parse_gr(f.at("word").get<std::string>());
      if (g.terms().size() != 1 || g.terms().begin()->second != 1)
        throw parse_error("bead word factor must be a single monomial", 0);
      b = b * Bead::word(g.terms().begin()->first);
    } else {
      b = b * Bead::atom(json_loc(f.at("loc")));
    }
  }
  return b;
}

inline json diagram_json(const Diagram& d) {
  json legs = json::array();
  for (auto& l : d.legs) legs.push_back(color_json(l));
  json edges = json::array();
  for (auto& e : d.edges)
    edges.push_back(json{{"from", json::array({e.a.node, e.a.slot})},
                         {"to", json::array({e.b.node, e.b.slot})},
                         {"bead", bead_json(e.bead)}});
  json circles = json::array();
  for (auto& c : d.circles) circles.push_back(bead_json(c));
  return json{{"legs", legs}, {"vertices", d.n_int}, {"edges", edges}, {"circles", circles}};
}

inline Diagram json_diagram(const json& j) {
  Diagram d;
  for (auto& l : j.at("legs")) d.legs.push_back(json_color(l));
  d.n_int = j.at("vertices").get<int32_t>();
  if (j.contains("edges"))
    for (auto& e : j.at("edges")) {
      Diagram::Edge ed;
      ed.a = {e.at("from")[0].get<int32_t>(), e.at("from")[1].get<int8_t>()};
      ed.b = {e.at("to")[0].get<int32_t>(), e.at("to")[1].get<int8_t>()};
      if (e.contains("bead")) ed.bead = json_bead(e.at("bead"));
      d.edges.push_back(std::move(ed));
    }
  if (j.contains("circles"))
    for (auto& c : j.at("circles")) d.circles.push_back(json_bead(c));
  d.validate();
  return d;
}

inline json diagramsum_json(const DiagramSum& s) {
  json terms = json::array();
  for (auto& [d, c] : s.terms())
    terms.push_back(json{{"coef", rat_json(c)}, {"diagram", diagram_json(d)}});
  return json{{"cap", s.cap()}, {"terms", terms}};
}

inline DiagramSum json_diagramsum(const json& j) {
  DiagramSum s(j.at("cap").get<unsigned>());
  for (auto& t : j.at("terms")) s.add(json_diagram(t.at("diagram")), json_rat(t.at("coef")));
  return s;
}

inline json integrand_json(const Integrand& I) {
  json bases = json::array();
  for (auto& b : I.bases) bases.push_back(b);
  return json{{"covariance", locmatrix_json(I.cov)},
              {"bases", bases},
              {"substantial", diagramsum_json(I.substantial)}};
}

inline Integrand json_integrand(const json& j) {
  Integrand I{json_locmatrix(j.at("covariance")), {}, json_diagramsum(j.at("substantial"))};
  for (auto& b : j.at("bases")) I.bases.push_back(b.get<std::string>());
  return I;
}

inline json clasper_json(const ClasperSpec& s) {
  json lk = json::array();
  for (auto& row : s.lk) {
    json r = json::array();
    for (auto& e : row) r.push_back(gr_json(e));
    lk.push_back(r);
  }
  return json{{"n", s.n}, {"lk", lk}};
}

inline ClasperSpec json_clasper(const json& j) {
  ClasperSpec s;
  s.n = j.at("n").get<int>();
  for (auto& row : j.at("lk")) {
    std::vector<GroupRingElement> r;
    for (auto& e : row) r.push_back(json_gr(e));
    s.lk.push_back(std::move(r));
  }
  s.validate();
  return s;
}

}  // namespace ratkon
