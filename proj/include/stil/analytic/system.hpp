#pragma once

// Constraint systems: conjunctions of polynomial (in)equalities plus
// disjunctive blocks, with a textual S-expression form.
//
// Grammar (whitespace separated, `;` starts a comment):
//
//   system     := "(" "system" item* ")"
//   item       := var | constraint | disjunction
//   var        := "(" "var" NAME NUMBER NUMBER ")"
//   constraint := "(" OP expr expr ")"            OP in < <= = > >=
//   disjunction:= "(" "or" branch+ ")"
//   branch     := constraint | "(" "and" constraint+ ")"
//   expr       := NUMBER | NAME | "(" "+" expr* ")" | "(" "-" expr expr* ")"
//               | "(" "*" expr* ")" | "(" "^" expr INTEGER ")"
//   NUMBER     := decimal, scientific, or p/q rational
//
// Printing is canonical: every constraint is emitted as (OP poly 0) with OP
// in {<, <=, =} and the polynomial in sorted-monomial form.

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stil/analytic/polynomial.hpp"

namespace stil::analytic {

struct RealVar {
  std::string name;
  double lo = -1e4;
  double hi = 1e4;
  friend bool operator==(const RealVar&, const RealVar&) = default;
};

enum class Op { lt, le, eq };

inline const char* to_string(Op op) {
  switch (op) {
    case Op::lt: return "<";
    case Op::le: return "<=";
    case Op::eq: return "=";
  }
  return "?";
}

/// poly OP 0
struct PolyConstraint {
  Polynomial poly;
  Op op = Op::le;
  friend bool operator==(const PolyConstraint&, const PolyConstraint&) = default;
};

inline PolyConstraint lt(const Polynomial& a, const Polynomial& b) { return {a - b, Op::lt}; }
inline PolyConstraint le(const Polynomial& a, const Polynomial& b) { return {a - b, Op::le}; }
inline PolyConstraint gt(const Polynomial& a, const Polynomial& b) { return {b - a, Op::lt}; }
inline PolyConstraint ge(const Polynomial& a, const Polynomial& b) { return {b - a, Op::le}; }
inline PolyConstraint eq(const Polynomial& a, const Polynomial& b) { return {a - b, Op::eq}; }

using Conjunction = std::vector<PolyConstraint>;
/// At least one branch must hold.
using Disjunction = std::vector<Conjunction>;

class ConstraintSystem {
 public:
  /// Declares a variable; re-declaration intersects the domains.
  void declare(const RealVar& v) {
    if (!(v.lo <= v.hi)) throw Error("invalid-domain", v.name);
    for (auto& existing : vars_) {
      if (existing.name == v.name) {
        existing.lo = std::max(existing.lo, v.lo);
        existing.hi = std::min(existing.hi, v.hi);
        return;
      }
    }
    vars_.push_back(v);
  }
  void add(PolyConstraint c) {
    check_declared(c);
    constraints_.push_back(std::move(c));
  }
  void add_any(Disjunction d) {
    for (const auto& branch : d)
      for (const auto& c : branch) check_declared(c);
    if (d.size() == 1) {
      for (auto& c : d.front()) constraints_.push_back(std::move(c));
      return;
    }
    disjunctions_.push_back(std::move(d));
  }
  void merge(const ConstraintSystem& o) {
    for (const auto& v : o.vars_) declare(v);
    for (const auto& c : o.constraints_) constraints_.push_back(c);
    for (const auto& d : o.disjunctions_) disjunctions_.push_back(d);
  }

  const std::vector<RealVar>& vars() const { return vars_; }
  std::vector<RealVar>& vars() { return vars_; }
  const std::vector<PolyConstraint>& constraints() const { return constraints_; }
  const std::vector<Disjunction>& disjunctions() const { return disjunctions_; }

  const RealVar* find(const std::string& name) const {
    for (const auto& v : vars_)
      if (v.name == name) return &v;
    return nullptr;
  }
  RealVar* find(const std::string& name) {
    for (auto& v : vars_)
      if (v.name == name) return &v;
    return nullptr;
  }

  /// Fixes a variable to a value (domain becomes a point).
  void fix(const std::string& name, double value) {
    RealVar* v = find(name);
    if (!v) throw Error("unknown-variable", name);
    v->lo = v->hi = value;
  }

  friend bool operator==(const ConstraintSystem&, const ConstraintSystem&) = default;

 private:
  void check_declared(const PolyConstraint& c) const {
    for (const auto& name : c.poly.variables())
      if (!find(name)) throw Error("undeclared-variable", name);
  }

  std::vector<RealVar> vars_;
  std::vector<PolyConstraint> constraints_;
  std::vector<Disjunction> disjunctions_;
};

// ---------------------------------------------------------------------------
// Verification of concrete assignments

struct Residual {
  bool ok = true;
  double worst = 0.0;
};

/// Exact check of one constraint at a double assignment. Non-strict and
/// equality constraints allow `residual_tol`; strict ones need `margin`.
template <typename Lookup>
bool satisfied(const PolyConstraint& c, Lookup&& value_of, double residual_tol, double margin, double* residual = nullptr) {
  const Rational v = c.poly.eval_exact([&](const std::string& n) { return Rational(value_of(n)); });
  const double d = v.convert_to<double>();
  switch (c.op) {
    case Op::lt:
      if (residual) *residual = std::max(0.0, d + margin);
      return d <= -margin && v < 0;
    case Op::le:
      if (residual) *residual = std::max(0.0, d);
      return d <= residual_tol;
    case Op::eq:
      if (residual) *residual = std::abs(d);
      return std::abs(d) <= residual_tol;
  }
  return false;
}

/// Whether an assignment satisfies every domain, constraint and at least
/// one branch of every disjunction.
inline Residual check_assignment(const ConstraintSystem& sys, const std::map<std::string, double>& x,
                                 double residual_tol = 1e-9, double margin = 0.0) {
  Residual r;
  auto value_of = [&](const std::string& n) {
    auto it = x.find(n);
    if (it == x.end()) throw Error("unassigned-variable", n);
    return it->second;
  };
  for (const auto& v : sys.vars()) {
    const double val = value_of(v.name);
    if (val < v.lo || val > v.hi) r.ok = false;
  }
  for (const auto& c : sys.constraints()) {
    double res = 0.0;
    if (!satisfied(c, value_of, residual_tol, margin, &res)) r.ok = false;
    r.worst = std::max(r.worst, res);
  }
  for (const auto& d : sys.disjunctions()) {
    bool any = false;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& branch : d) {
      bool all = true;
      double worst = 0.0;
      for (const auto& c : branch) {
        double res = 0.0;
        if (!satisfied(c, value_of, residual_tol, margin, &res)) all = false;
        worst = std::max(worst, res);
      }
      any = any || all;
      best = std::min(best, worst);
    }
    if (!any) r.ok = false;
    r.worst = std::max(r.worst, best);
  }
  return r;
}

// ---------------------------------------------------------------------------
// S-expression text form

namespace sexpr {

struct Node {
  std::string atom;  // non-empty for atoms
  std::vector<Node> items;
  bool is_atom() const { return !atom.empty(); }
};

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> toks;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == ';') {
      flush();
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (ch == '(' || ch == ')') {
      flush();
      toks.emplace_back(1, ch);
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return toks;
}

inline Node parse_node(const std::vector<std::string>& toks, std::size_t& pos) {
  if (pos >= toks.size()) throw Error("parse-error", "unexpected end of input");
  const std::string& t = toks[pos++];
  if (t == ")") throw Error("parse-error", "unexpected ')'");
  if (t != "(") return Node{t, {}};
  Node n;
  while (true) {
    if (pos >= toks.size()) throw Error("parse-error", "missing ')'");
    if (toks[pos] == ")") {
      ++pos;
      return n;
    }
    n.items.push_back(parse_node(toks, pos));
  }
}

inline bool is_number(const std::string& s) {
  const char c = s[0];
  return std::isdigit(static_cast<unsigned char>(c)) ||
         ((c == '-' || c == '+' || c == '.') && s.size() > 1 &&
          (std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '.'));
}

inline Polynomial to_poly(const Node& n) {
  if (n.is_atom()) return is_number(n.atom) ? Polynomial(parse_rational(n.atom)) : Polynomial::var(n.atom);
  if (n.items.empty() || !n.items[0].is_atom()) throw Error("parse-error", "expression needs an operator");
  const std::string& op = n.items[0].atom;
  if (op == "+") {
    Polynomial s;
    for (std::size_t i = 1; i < n.items.size(); ++i) s += to_poly(n.items[i]);
    return s;
  }
  if (op == "*") {
    Polynomial s(1);
    for (std::size_t i = 1; i < n.items.size(); ++i) s = s * to_poly(n.items[i]);
    return s;
  }
  if (op == "-") {
    if (n.items.size() < 2) throw Error("parse-error", "'-' needs an argument");
    if (n.items.size() == 2) return -to_poly(n.items[1]);
    Polynomial s = to_poly(n.items[1]);
    for (std::size_t i = 2; i < n.items.size(); ++i) s -= to_poly(n.items[i]);
    return s;
  }
  if (op == "^") {
    if (n.items.size() != 3 || !n.items[2].is_atom()) throw Error("parse-error", "'^' needs base and exponent");
    return to_poly(n.items[1]).pow(std::stoi(n.items[2].atom));
  }
  throw Error("parse-error", "unknown operator " + op);
}

inline PolyConstraint to_constraint(const Node& n) {
  if (n.is_atom() || n.items.size() != 3 || !n.items[0].is_atom()) throw Error("parse-error", "malformed constraint");
  const std::string& op = n.items[0].atom;
  const Polynomial a = to_poly(n.items[1]);
  const Polynomial b = to_poly(n.items[2]);
  if (op == "<") return lt(a, b);
  if (op == "<=") return le(a, b);
  if (op == "=") return eq(a, b);
  if (op == ">") return gt(a, b);
  if (op == ">=") return ge(a, b);
  throw Error("parse-error", "unknown comparison " + op);
}

inline double to_double(const std::string& s) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  return parse_rational(s).convert_to<double>();
}

inline std::string poly_text(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& [m, c] : p.terms()) {
    if (m.empty()) {
      terms.push_back(to_string(c));
      continue;
    }
    std::string t = "(* " + to_string(c);
    for (const auto& [v, e] : m) t += e == 1 ? " " + v : " (^ " + v + " " + std::to_string(e) + ")";
    terms.push_back(t + ")");
  }
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (const auto& t : terms) s += " " + t;
  return s + ")";
}

inline std::string number_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace sexpr

inline std::string to_sexpr(const PolyConstraint& c) {
  return std::string("(") + to_string(c.op) + " " + sexpr::poly_text(c.poly) + " 0)";
}

inline std::string to_sexpr(const ConstraintSystem& sys) {
  std::string s = "(system\n";
  for (const auto& v : sys.vars())
    s += "  (var " + v.name + " " + sexpr::number_text(v.lo) + " " + sexpr::number_text(v.hi) + ")\n";
  for (const auto& c : sys.constraints()) s += "  " + to_sexpr(c) + "\n";
  for (const auto& d : sys.disjunctions()) {
    s += "  (or";
    for (const auto& branch : d) {
      if (branch.size() == 1) {
        s += " " + to_sexpr(branch[0]);
        continue;
      }
      s += " (and";
      for (const auto& c : branch) s += " " + to_sexpr(c);
      s += ")";
    }
    s += ")\n";
  }
  return s + ")\n";
}

inline ConstraintSystem parse_system(const std::string& text) {
  const auto toks = sexpr::tokenize(text);
  std::size_t pos = 0;
  const auto root = sexpr::parse_node(toks, pos);
  if (pos != toks.size()) throw Error("parse-error", "trailing input after system");
  if (root.is_atom() || root.items.empty() || root.items[0].atom != "system")
    throw Error("parse-error", "expected (system ...)");
  ConstraintSystem sys;
  // Variables may appear anywhere; declare them first.
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const auto& it = root.items[i];
    if (!it.is_atom() && !it.items.empty() && it.items[0].atom == "var") {
      if (it.items.size() != 4) throw Error("parse-error", "(var NAME LO HI) expected");
      sys.declare({it.items[1].atom, sexpr::to_double(it.items[2].atom), sexpr::to_double(it.items[3].atom)});
    }
  }
  for (std::size_t i = 1; i < root.items.size(); ++i) {
    const auto& it = root.items[i];
    if (it.is_atom() || it.items.empty()) throw Error("parse-error", "unexpected atom in system");
    const std::string& head = it.items[0].atom;
    if (head == "var") continue;
    if (head == "or") {
      Disjunction d;
      for (std::size_t k = 1; k < it.items.size(); ++k) {
        const auto& b = it.items[k];
        if (!b.is_atom() && !b.items.empty() && b.items[0].atom == "and") {
          Conjunction conj;
          for (std::size_t j = 1; j < b.items.size(); ++j) conj.push_back(sexpr::to_constraint(b.items[j]));
          d.push_back(std::move(conj));
        } else {
          d.push_back({sexpr::to_constraint(b)});
        }
      }
      if (d.empty()) throw Error("parse-error", "empty disjunction");
      sys.add_any(std::move(d));
      continue;
    }
    sys.add(sexpr::to_constraint(it));
  }
  return sys;
}

}  // namespace stil::analytic
