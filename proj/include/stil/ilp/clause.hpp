#pragma once

// Ground values, clause terms and their Prolog-style text form.
//
//   clause   := literal [":-" literal ("," literal)*] "."
//   literal  := NAME "(" term ("," term)* ")" | NAME
//   term     := VAR | CONST | NAME "(" term ("," term)* ")"
//   VAR      := uppercase initial, e.g. A, B, A1
//   CONST    := lowercase initial or quoted 'text'
//
// Lines starting with % are comments.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "stil/error.hpp"

namespace stil::ilp {

/// A value in an example's domain: a symbol (object, scene, relation name),
/// a frame index, or a frame interval [a, b].
struct Value {
  enum class Kind : std::uint8_t { symbol, time, interval };
  Kind kind = Kind::symbol;
  std::string sym;
  std::int64_t a = 0;
  std::int64_t b = 0;

  static Value symbol(std::string s) { return {Kind::symbol, std::move(s), 0, 0}; }
  static Value time(std::int64_t t) { return {Kind::time, {}, t, t}; }
  static Value interval(std::int64_t first, std::int64_t last) { return {Kind::interval, {}, first, last}; }

  friend bool operator==(const Value& x, const Value& y) {
    return std::tie(x.kind, x.sym, x.a, x.b) == std::tie(y.kind, y.sym, y.a, y.b);
  }
  friend bool operator<(const Value& x, const Value& y) {
    return std::tie(x.kind, x.sym, x.a, x.b) < std::tie(y.kind, y.sym, y.a, y.b);
  }
};

inline std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::symbol: return v.sym;
    case Value::Kind::time: return "t" + std::to_string(v.a);
    case Value::Kind::interval: return "[" + std::to_string(v.a) + "," + std::to_string(v.b) + "]";
  }
  return "?";
}

struct Term {
  enum class Kind : std::uint8_t { var, constant, compound };
  Kind kind = Kind::var;
  int var = -1;
  std::string name;  // constant symbol or functor
  std::vector<Term> args;

  static Term variable(int id) { return {Kind::var, id, {}, {}}; }
  static Term constant(std::string s) { return {Kind::constant, -1, std::move(s), {}}; }
  static Term compound(std::string f, std::vector<Term> a) { return {Kind::compound, -1, std::move(f), std::move(a)}; }

  friend bool operator==(const Term&, const Term&) = default;
  friend bool operator<(const Term& x, const Term& y) {
    return std::tie(x.kind, x.var, x.name, x.args) < std::tie(y.kind, y.var, y.name, y.args);
  }
};

struct Literal {
  std::string pred;
  std::vector<Term> args;
  friend bool operator==(const Literal&, const Literal&) = default;
  friend bool operator<(const Literal& x, const Literal& y) { return std::tie(x.pred, x.args) < std::tie(y.pred, y.args); }
};

/// Leaf terms in left-to-right order (the flattened argument list).
inline void leaves(const Term& t, std::vector<const Term*>& out) {
  if (t.kind == Term::Kind::compound)
    for (const auto& a : t.args) leaves(a, out);
  else
    out.push_back(&t);
}
inline std::vector<const Term*> leaves(const Literal& l) {
  std::vector<const Term*> out;
  for (const auto& a : l.args) leaves(a, out);
  return out;
}

inline void collect_vars(const Term& t, std::set<int>& out) {
  if (t.kind == Term::Kind::var) out.insert(t.var);
  for (const auto& a : t.args) collect_vars(a, out);
}

struct Clause {
  Literal head;
  std::vector<Literal> body;
  /// Type of every variable (as assigned during saturation).
  std::map<int, std::string> types;

  friend bool operator==(const Clause&, const Clause&) = default;
};

// ---------------------------------------------------------------------------
// Text form

inline std::string var_name(int id) {
  std::string s(1, static_cast<char>('A' + id % 26));
  if (id >= 26) s += std::to_string(id / 26);
  return s;
}

inline std::string quote_if_needed(const std::string& s) {
  bool plain = !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
  for (char c : s) plain = plain && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  if (plain) return s;
  std::string q = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') q += '\\';
    q += c;
  }
  return q + "'";
}

/// Renders with variables renamed by first occurrence when `names` is given.
inline std::string to_string(const Term& t, const std::map<int, int>* names = nullptr) {
  switch (t.kind) {
    case Term::Kind::var: return var_name(names ? names->at(t.var) : t.var);
    case Term::Kind::constant: return quote_if_needed(t.name);
    case Term::Kind::compound: {
      std::string s = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) s += (i ? "," : "") + to_string(t.args[i], names);
      return s + ")";
    }
  }
  return "?";
}

inline std::string to_string(const Literal& l, const std::map<int, int>* names = nullptr) {
  if (l.args.empty()) return l.pred;
  std::string s = l.pred + "(";
  for (std::size_t i = 0; i < l.args.size(); ++i) s += (i ? "," : "") + to_string(l.args[i], names);
  return s + ")";
}

/// Canonical variable numbering: order of first occurrence, head first.
inline std::map<int, int> canonical_names(const Clause& c) {
  std::map<int, int> names;
  auto visit = [&](auto&& self, const Term& t) -> void {
    if (t.kind == Term::Kind::var && !names.count(t.var)) names.emplace(t.var, static_cast<int>(names.size()));
    for (const auto& a : t.args) self(self, a);
  };
  for (const auto& a : c.head.args) visit(visit, a);
  for (const auto& l : c.body)
    for (const auto& a : l.args) visit(visit, a);
  return names;
}

inline std::string to_string(const Clause& c) {
  const auto names = canonical_names(c);
  std::string s = to_string(c.head, &names);
  if (!c.body.empty()) {
    s += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) s += (i ? ", " : "") + to_string(c.body[i], &names);
  }
  return s + ".";
}

/// Variable types in canonical naming, e.g. "A:scene,B:axis".
inline std::string types_string(const Clause& c) {
  const auto names = canonical_names(c);
  std::map<int, std::string> by_name;
  for (const auto& [v, n] : names) {
    auto it = c.types.find(v);
    by_name[n] = it == c.types.end() ? "any" : it->second;
  }
  std::string s;
  for (const auto& [n, ty] : by_name) s += (s.empty() ? "" : ",") + var_name(n) + ":" + ty;
  return s;
}

/// Renumbers variables canonically.
inline Clause canonical(const Clause& c) {
  const auto names = canonical_names(c);
  auto rename = [&](auto&& self, Term t) -> Term {
    if (t.kind == Term::Kind::var) t.var = names.at(t.var);
    for (auto& a : t.args) a = self(self, a);
    return t;
  };
  Clause out;
  out.head.pred = c.head.pred;
  for (const auto& a : c.head.args) out.head.args.push_back(rename(rename, a));
  for (const auto& l : c.body) {
    Literal n{l.pred, {}};
    for (const auto& a : l.args) n.args.push_back(rename(rename, a));
    out.body.push_back(std::move(n));
  }
  for (const auto& [v, ty] : c.types)
    if (names.count(v)) out.types[names.at(v)] = ty;
  return out;
}

namespace detail {

class TermParser {
 public:
  explicit TermParser(std::string_view s) : s_(s) {}

  Literal literal(std::map<std::string, int>& vars) {
    Literal l;
    l.pred = ident();
    if (l.pred.empty() || !std::islower(static_cast<unsigned char>(l.pred[0]))) fail("predicate name expected");
    skip();
    if (peek() == '(') l.args = arguments(vars);
    return l;
  }

  Term term(std::map<std::string, int>& vars) {
    skip();
    if (peek() == '\'') return Term::constant(quoted());
    std::string id = ident();
    if (id.empty()) fail("term expected");
    if (std::isupper(static_cast<unsigned char>(id[0])) || id[0] == '_') {
      auto [it, fresh] = vars.try_emplace(id, static_cast<int>(vars.size()));
      return Term::variable(it->second);
    }
    skip();
    if (peek() == '(') return Term::compound(id, arguments(vars));
    return Term::constant(id);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("parse-error", what + " at column " + std::to_string(pos_ + 1) + " in: " + std::string(s_));
  }

 private:
  std::vector<Term> arguments(std::map<std::string, int>& vars) {
    std::vector<Term> args;
    if (!eat("(")) fail("'(' expected");
    do args.push_back(term(vars));
    while (eat(","));
    if (!eat(")")) fail("')' expected");
    return args;
  }
  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }
  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '\'') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) fail("unterminated quote");
    ++pos_;
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one clause; the trailing period is optional. `names` receives
/// the variable name to id map.
inline Clause parse_clause(std::string_view text, std::map<std::string, int>* names = nullptr) {
  detail::TermParser p(text);
  std::map<std::string, int> vars;
  Clause c;
  c.head = p.literal(vars);
  if (p.eat(":-")) {
    do c.body.push_back(p.literal(vars));
    while (p.eat(","));
  }
  p.eat(".");
  if (!p.done()) p.fail("unexpected trailing text");
  if (names) *names = vars;
  return c;
}

inline Literal parse_literal(std::string_view text) {
  detail::TermParser p(text);
  std::map<std::string, int> vars;
  Literal l = p.literal(vars);
  if (!p.done()) p.fail("unexpected trailing text");
  return l;
}

}  // namespace stil::ilp
