#pragma once

// Saturation, coverage, bottom-clause search and the cover-set loop.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stil/ilp/background.hpp"
#include "stil/ilp/clause.hpp"
#include "stil/ilp/modes.hpp"

namespace stil::ilp {

struct Params {
  int max_clause_length = 6;  // body literals
  int i = 2;
  int noise = 0;
  int min_pos = 1;
  long node_budget = 50000;
  int recall = 10;  // default for modes without an explicit recall
  int max_bottom = 500;
};

/// A bottom clause: head plus body literals in generation order, with the
/// mode bookkeeping the search needs.
struct Bottom {
  Literal head;
  std::vector<Literal> body;
  std::vector<std::set<int>> inputs;   // per body literal
  std::vector<std::set<int>> outputs;  // per body literal
  std::vector<std::vector<std::string>> slot_types;
  std::map<int, std::string> types;
  std::map<int, Value> values;  // the saturated example's value of each variable
  std::map<int, int> depth;
  std::set<int> head_vars;
  bool truncated = false;
};

namespace detail {

struct Template {
  Literal lit;                   // leaves are variables numbered by slot
  std::vector<ModeArg> slots;    // placeholders by slot; constants get mode constant with empty type
  std::vector<bool> fixed;       // fixed constant leaf from the mode text
  std::vector<std::string> fixed_value;
};

inline Template make_template(const ModeDecl& m) {
  Template t;
  t.lit.pred = m.pred;
  auto build = [&](auto&& self, const ModeTerm& mt) -> Term {
    switch (mt.kind) {
      case ModeTerm::Kind::placeholder: {
        const int slot = static_cast<int>(t.slots.size());
        t.slots.push_back(mt.arg);
        t.fixed.push_back(false);
        t.fixed_value.emplace_back();
        return Term::variable(slot);
      }
      case ModeTerm::Kind::constant: {
        const int slot = static_cast<int>(t.slots.size());
        t.slots.push_back({ArgMode::constant, ""});
        t.fixed.push_back(true);
        t.fixed_value.push_back(mt.name);
        return Term::variable(slot);
      }
      case ModeTerm::Kind::compound: {
        std::vector<Term> args;
        for (const auto& a : mt.args) args.push_back(self(self, a));
        return Term::compound(mt.name, std::move(args));
      }
    }
    return {};
  };
  for (const auto& a : m.args) t.lit.args.push_back(build(build, a));
  return t;
}

/// Replaces slot variables by the given terms.
inline Term instantiate(const Term& t, const std::vector<Term>& by_slot) {
  if (t.kind == Term::Kind::var) return by_slot[static_cast<std::size_t>(t.var)];
  Term out = t;
  for (auto& a : out.args) a = instantiate(a, by_slot);
  return out;
}

inline Literal instantiate(const Literal& l, const std::vector<Term>& by_slot) {
  Literal out{l.pred, {}};
  for (const auto& a : l.args) out.args.push_back(instantiate(a, by_slot));
  return out;
}

inline const Predicate& require_predicate(const Background& bg, const std::string& name, std::size_t arity) {
  const Predicate* p = bg.find(name, arity);
  if (!p) throw Error("unknown-predicate", name + "/" + std::to_string(arity));
  return *p;
}

}  // namespace detail

inline const ModeDecl& head_mode(const ModeSet& modes, const std::string& target) {
  for (const auto& h : modes.heads)
    if (h.pred == target) return h;
  throw Error("no-head-mode", "no modeh for " + target);
}

/// Bottom clause of a positive example within depth params.i and the mode
/// recall bounds. Every candidate literal is evaluated on the example.
namespace detail {

inline Bottom saturate_any(World& w, const ModeSet& modes, const Params& params) {
  const Example& ex = w.example();
  const ModeDecl& hm = head_mode(modes, ex.target);
  Bottom b;
  std::map<Value, int> var_of;
  auto var_for = [&](const Value& v, const std::string& type, int depth) {
    auto [it, fresh] = var_of.try_emplace(v, static_cast<int>(var_of.size()));
    if (fresh) {
      b.types[it->second] = type;
      b.values[it->second] = v;
      b.depth[it->second] = depth;
    }
    return it->second;
  };

  // Head: target(Example).
  {
    const auto t = detail::make_template(hm);
    if (t.slots.size() != 1 || t.slots[0].mode != ArgMode::in)
      throw Error("invalid-mode", "head mode must take the example as its single input: " + hm.text);
    const Value id = Value::symbol(ex.id);
    if (!w.is_a(id, t.slots[0].type))
      throw Error("type-mismatch", ex.id + " is not a " + t.slots[0].type);
    const int v = var_for(id, t.slots[0].type, 0);
    b.head = detail::instantiate(t.lit, {Term::variable(v)});
    b.head_vars.insert(v);
  }

  std::vector<detail::Template> templates;
  std::vector<const Predicate*> preds;
  for (const auto& m : modes.bodies) {
    templates.push_back(detail::make_template(m));
    preds.push_back(&detail::require_predicate(w.background(), m.pred, templates.back().slots.size()));
  }

  std::set<Literal> seen;
  for (int layer = 1; layer <= params.i && !b.truncated; ++layer) {
    // Snapshot of the variables available at this layer.
    std::vector<int> avail;
    for (const auto& [v, d] : b.depth)
      if (d < layer) avail.push_back(v);

    for (std::size_t mi = 0; mi < modes.bodies.size() && !b.truncated; ++mi) {
      const auto& m = modes.bodies[mi];
      const auto& t = templates[mi];
      const int recall = m.recall ? *m.recall : params.recall;

      std::vector<std::size_t> in_slots;
      for (std::size_t s = 0; s < t.slots.size(); ++s)
        if (t.slots[s].mode == ArgMode::in) in_slots.push_back(s);
      if (in_slots.empty() && layer > 1) continue;

      std::vector<std::vector<int>> cands(in_slots.size());
      bool feasible = true;
      for (std::size_t k = 0; k < in_slots.size(); ++k) {
        for (int v : avail)
          if (w.is_a(b.values.at(v), t.slots[in_slots[k]].type)) cands[k].push_back(v);
        feasible = feasible && !cands[k].empty();
      }
      if (!feasible) continue;

      std::vector<std::size_t> pos(in_slots.size(), 0);
      while (true) {
        std::vector<int> chosen(in_slots.size());
        bool has_new = in_slots.empty();
        for (std::size_t k = 0; k < in_slots.size(); ++k) {
          chosen[k] = cands[k][pos[k]];
          has_new = has_new || b.depth.at(chosen[k]) == layer - 1;
        }
        if (has_new) {
          Slots slots(t.slots.size());
          std::vector<std::string> types(t.slots.size());
          for (std::size_t s = 0; s < t.slots.size(); ++s) {
            types[s] = t.slots[s].type;
            if (t.fixed[s]) slots[s] = Value::symbol(t.fixed_value[s]);
          }
          for (std::size_t k = 0; k < in_slots.size(); ++k) slots[in_slots[k]] = b.values.at(chosen[k]);
          int answers = 0;
          std::vector<std::vector<Value>> found;
          solve(w, *preds[mi], t.lit, slots, types, [&](const std::vector<Value>& vals) {
            found.push_back(vals);
            ++answers;
            return recall == 0 || answers < recall;
          });
          for (const auto& vals : found) {
            std::vector<Term> by_slot(t.slots.size());
            std::set<int> ins, outs;
            std::vector<std::string> stypes(t.slots.size());
            for (std::size_t s = 0; s < t.slots.size(); ++s) {
              if (t.fixed[s]) {
                by_slot[s] = Term::constant(t.fixed_value[s]);
                continue;
              }
              stypes[s] = t.slots[s].type;
              switch (t.slots[s].mode) {
                case ArgMode::in: {
                  const int v = var_of.at(vals[s]);
                  by_slot[s] = Term::variable(v);
                  ins.insert(v);
                  break;
                }
                case ArgMode::out: {
                  const int v = var_for(vals[s], t.slots[s].type, layer);
                  by_slot[s] = Term::variable(v);
                  outs.insert(v);
                  break;
                }
                case ArgMode::constant: by_slot[s] = Term::constant(to_string(vals[s])); break;
              }
            }
            Literal lit = detail::instantiate(t.lit, by_slot);
            if (!seen.insert(lit).second) continue;
            for (int v : ins) outs.erase(v);
            b.body.push_back(std::move(lit));
            b.inputs.push_back(std::move(ins));
            b.outputs.push_back(std::move(outs));
            b.slot_types.push_back(std::move(stypes));
            if (static_cast<int>(b.body.size()) >= params.max_bottom) {
              b.truncated = true;
              break;
            }
          }
        }
        if (b.truncated) break;
        std::size_t k = in_slots.size();
        bool done = true;
        while (k > 0) {
          --k;
          if (++pos[k] < cands[k].size()) {
            done = false;
            break;
          }
          pos[k] = 0;
        }
        if (done) break;
      }
    }
  }
  return b;
}

}  // namespace detail

inline Bottom saturate(World& w, const ModeSet& modes, const Params& params) {
  auto b = detail::saturate_any(w, modes, params);
  if (b.body.empty()) throw Error("empty-bottom", "nothing qualifies for " + w.example().id);
  return b;
}

inline Clause bottom_clause(const Bottom& b) {
  Clause c{b.head, b.body, b.types};
  return c;
}

/// The clause made of the bottom's head and the chosen body literals.
inline Clause subset_clause(const Bottom& b, const std::vector<int>& idx) {
  Clause c;
  c.head = b.head;
  for (int v : b.head_vars) c.types[v] = b.types.at(v);
  for (int i : idx) {
    const auto& lit = b.body[static_cast<std::size_t>(i)];
    c.body.push_back(lit);
    const auto lv = leaves(lit);
    for (std::size_t s = 0; s < lv.size(); ++s)
      if (lv[s]->kind == Term::Kind::var && !c.types.count(lv[s]->var))
        c.types[lv[s]->var] = b.slot_types[static_cast<std::size_t>(i)][s];
  }
  return c;
}

/// Whether some binding makes every body literal true on the example.
inline bool covers(const Clause& c, World& w) {
  const Example& ex = w.example();
  if (c.head.pred != ex.target) return false;
  std::map<int, Value> env;
  {
    const auto hl = leaves(c.head);
    if (hl.size() != 1) return false;
    const Value id = Value::symbol(ex.id);
    const Term& t = *hl[0];
    if (t.kind == Term::Kind::constant) {
      if (t.name != ex.id) return false;
    } else if (t.kind == Term::Kind::var) {
      auto ty = c.types.find(t.var);
      if (ty != c.types.end() && ty->second != "any" && !w.is_a(id, ty->second)) return false;
      env[t.var] = id;
    }
  }
  const Background& bg = w.background();
  auto type_of = [&](int v) {
    auto it = c.types.find(v);
    return it == c.types.end() ? std::string("any") : it->second;
  };

  auto step = [&](auto&& self, std::size_t k) -> bool {
    if (k == c.body.size()) return true;
    const Literal& l = c.body[k];
    const auto lv = leaves(l);
    const Predicate* p = bg.find(l.pred, lv.size());
    if (!p) return false;
    Slots slots(lv.size());
    std::vector<std::string> types(lv.size());
    for (std::size_t s = 0; s < lv.size(); ++s) {
      if (lv[s]->kind == Term::Kind::constant) {
        slots[s] = Value::symbol(lv[s]->name);
      } else {
        types[s] = type_of(lv[s]->var);
        if (auto it = env.find(lv[s]->var); it != env.end()) slots[s] = it->second;
      }
    }
    bool ok = false;
    solve(w, *p, l, slots, types, [&](const std::vector<Value>& vals) {
      std::vector<int> bound;
      bool consistent = true;
      for (std::size_t s = 0; s < lv.size() && consistent; ++s) {
        if (lv[s]->kind != Term::Kind::var) continue;
        auto [it, fresh] = env.try_emplace(lv[s]->var, vals[s]);
        if (fresh)
          bound.push_back(lv[s]->var);
        else
          consistent = it->second == vals[s];
      }
      if (consistent) ok = self(self, k + 1);
      for (int v : bound) env.erase(v);
      return !ok;
    });
    return ok;
  };
  return step(step, 0);
}

// ---------------------------------------------------------------------------
// Search

struct Scored {
  Clause clause;
  int pos = 0;
  int neg = 0;
  int score() const { return pos - neg; }
};

struct SearchResult {
  std::optional<Scored> best;
  long nodes = 0;
  bool budget_exhausted = false;
};

namespace detail {

using Bits = std::vector<std::uint64_t>;

inline Bits full_bits(std::size_t n) {
  Bits b((n + 63) / 64, 0);
  for (std::size_t i = 0; i < n; ++i) b[i / 64] |= std::uint64_t{1} << (i % 64);
  return b;
}
inline int popcount(const Bits& b) {
  int n = 0;
  for (auto x : b) n += __builtin_popcountll(x);
  return n;
}
inline bool test_bit(const Bits& b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1u; }

/// Literal text used for the lexicographic tie-break.
inline std::string clause_key(const Clause& c) { return to_string(c); }

}  // namespace detail

/// Tie-break order between acceptable clauses: higher score, then shorter,
/// then lexicographically smaller text.
inline bool better(const Scored& a, const Scored& b) {
  if (a.score() != b.score()) return a.score() > b.score();
  if (a.clause.body.size() != b.clause.body.size()) return a.clause.body.size() < b.clause.body.size();
  return detail::clause_key(a.clause) < detail::clause_key(b.clause);
}

/// Best-first search over mode-connected subsets of the bottom clause.
/// `pos`/`neg` are the worlds scored against.
inline SearchResult search(const Bottom& b, std::vector<World*> pos, std::vector<World*> neg, const Params& params) {
  SearchResult r;
  struct Node {
    std::vector<int> idx;
    detail::Bits pos, neg;
    int p = 0, n = 0;
    std::set<int> bound;
    std::string key;
  };
  auto evaluate = [&](Node& node, const Node* parent) {
    const Clause c = subset_clause(b, node.idx);
    node.pos = detail::Bits((pos.size() + 63) / 64, 0);
    node.neg = detail::Bits((neg.size() + 63) / 64, 0);
    for (std::size_t k = 0; k < pos.size(); ++k)
      if ((!parent || detail::test_bit(parent->pos, k)) && covers(c, *pos[k])) node.pos[k / 64] |= std::uint64_t{1} << (k % 64);
    for (std::size_t k = 0; k < neg.size(); ++k)
      if ((!parent || detail::test_bit(parent->neg, k)) && covers(c, *neg[k])) node.neg[k / 64] |= std::uint64_t{1} << (k % 64);
    node.p = detail::popcount(node.pos);
    node.n = detail::popcount(node.neg);
    node.key = detail::clause_key(c);
    ++r.nodes;
    return c;
  };
  // A refinement of n has score at most n.p and at least one more literal.
  auto hopeless = [&](const Node& n) {
    if (!r.best) return false;
    const int bound = n.p, best = r.best->score();
    return bound < best || (bound == best && n.idx.size() + 1 > r.best->clause.body.size());
  };
  auto acceptable = [&](const Node& n) { return n.n <= params.noise && n.p >= params.min_pos; };
  auto consider = [&](const Node& n, Clause c) {
    if (!acceptable(n)) return;
    Scored s{std::move(c), n.p, n.n};
    if (!r.best || better(s, *r.best)) r.best = std::move(s);
  };

  // Open list ordered by score, then length, then text.
  auto worse = [](const Node& a, const Node& b) {
    if (a.p - a.n != b.p - b.n) return a.p - a.n < b.p - b.n;
    if (a.idx.size() != b.idx.size()) return a.idx.size() > b.idx.size();
    return a.key > b.key;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  Node root;
  root.bound = b.head_vars;
  consider(root, evaluate(root, nullptr));
  open.push(std::move(root));

  while (!open.empty()) {
    Node cur = open.top();
    open.pop();
    if (hopeless(cur)) continue;
    if (static_cast<int>(cur.idx.size()) >= params.max_clause_length) continue;
    if (cur.n == 0) continue;  // adding literals cannot improve a clause with no negatives
    const int start = cur.idx.empty() ? 0 : cur.idx.back() + 1;
    for (int i = start; i < static_cast<int>(b.body.size()); ++i) {
      const auto& ins = b.inputs[static_cast<std::size_t>(i)];
      if (!std::includes(cur.bound.begin(), cur.bound.end(), ins.begin(), ins.end())) continue;
      if (r.nodes >= params.node_budget) {
        r.budget_exhausted = true;
        return r;
      }
      Node child;
      child.idx = cur.idx;
      child.idx.push_back(i);
      child.bound = cur.bound;
      child.bound.insert(b.outputs[static_cast<std::size_t>(i)].begin(), b.outputs[static_cast<std::size_t>(i)].end());
      Clause c = evaluate(child, &cur);
      if (child.p < params.min_pos) continue;
      consider(child, std::move(c));
      if (hopeless(child) || child.n == 0) continue;
      open.push(std::move(child));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cover-set loop

struct HypothesisClause {
  Clause clause;
  int pos = 0;  // training positives covered
  int neg = 0;  // training negatives covered
};

struct Hypothesis {
  std::string target;
  std::vector<HypothesisClause> clauses;
};

struct InduceReport {
  Hypothesis hypothesis;
  std::vector<std::string> uncoverable;  // residual positives
  long nodes = 0;
  bool budget_exhausted = false;
  std::size_t kernel_calls = 0;
};

inline InduceReport induce(const std::vector<Example>& examples, const ModeSet& modes, const Background& bg,
                           const qsr::ContextFactors& factors, const Params& params) {
  InduceReport rep;
  std::vector<std::unique_ptr<World>> worlds;
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t k = 0; k < examples.size(); ++k) {
    const auto& e = examples[k];
    worlds.push_back(std::make_unique<World>(e, factors.resolve(example_width(e), example_height(e)), bg));
    (e.positive ? pos_idx : neg_idx).push_back(k);
  }
  if (pos_idx.empty()) throw Error("no-positives", "induce needs at least one positive example");
  rep.hypothesis.target = examples[pos_idx.front()].target;
  for (auto k : pos_idx)
    if (examples[k].target != rep.hypothesis.target)
      throw Error("mixed-targets", examples[k].id + " has target " + examples[k].target);
  head_mode(modes, rep.hypothesis.target);

  // Lowest id first.
  std::sort(pos_idx.begin(), pos_idx.end(), [&](auto a, auto b) { return examples[a].id < examples[b].id; });
  std::sort(neg_idx.begin(), neg_idx.end(), [&](auto a, auto b) { return examples[a].id < examples[b].id; });

  std::vector<World*> neg;
  for (auto k : neg_idx) neg.push_back(worlds[k].get());
  std::vector<std::size_t> remaining = pos_idx;
  std::set<std::size_t> failed;

  while (true) {
    std::optional<std::size_t> seed;
    for (auto k : remaining)
      if (!failed.count(k)) {
        seed = k;
        break;
      }
    if (!seed) break;
    // an empty bottom still leaves the empty-body clause to try
    const Bottom bottom = detail::saturate_any(*worlds[*seed], modes, params);
    std::vector<World*> pos;
    for (auto k : remaining) pos.push_back(worlds[k].get());
    auto sr = search(bottom, pos, neg, params);
    rep.nodes += sr.nodes;
    rep.budget_exhausted = rep.budget_exhausted || sr.budget_exhausted;
    const auto& best = sr.best;
    // The clause must cover its own seed to make progress.
    if (!best || !covers(best->clause, *worlds[*seed])) {
      failed.insert(*seed);
      continue;
    }
    Clause c = canonical(best->clause);
    HypothesisClause hc{c, 0, 0};
    for (auto k : pos_idx) hc.pos += covers(c, *worlds[k]) ? 1 : 0;
    for (auto k : neg_idx) hc.neg += covers(c, *worlds[k]) ? 1 : 0;
    std::vector<std::size_t> left;
    for (auto k : remaining)
      if (!covers(c, *worlds[k])) left.push_back(k);
    remaining = std::move(left);
    rep.hypothesis.clauses.push_back(std::move(hc));
  }
  for (auto k : remaining) rep.uncoverable.push_back(examples[k].id);
  for (const auto& w : worlds) rep.kernel_calls += w->kernel_calls();
  return rep;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Confusion {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  int total() const { return tp + fp + tn + fn; }
  double accuracy() const { return total() ? static_cast<double>(tp + tn) / total() : 0.0; }
};

inline bool covers(const Hypothesis& h, World& w) {
  for (const auto& c : h.clauses)
    if (covers(c.clause, w)) return true;
  return false;
}

inline Confusion evaluate(const Hypothesis& h, const std::vector<Example>& examples, const Background& bg,
                          const qsr::ContextFactors& factors, std::vector<bool>* predictions = nullptr) {
  Confusion cm;
  for (const auto& e : examples) {
    World w(e, factors.resolve(example_width(e), example_height(e)), bg);
    const bool pred = covers(h, w);
    if (predictions) predictions->push_back(pred);
    if (e.positive)
      (pred ? cm.tp : cm.fn)++;
    else
      (pred ? cm.fp : cm.tn)++;
  }
  return cm;
}

// ---------------------------------------------------------------------------
// Hypothesis text
//
//   % clause 1: pos=20 neg=0 types=A:scene,B:axis,C:person,D:person
//   symmetric(A) :- axis(A,B), left(B,C), ...
//
// The comment line carries the training stats and the variable types the
// evaluator needs; clauses without one are evaluated with untyped variables.

inline std::string to_text(const Hypothesis& h) {
  std::ostringstream os;
  os << "% hypothesis target=" << h.target << " clauses=" << h.clauses.size() << "\n";
  for (std::size_t k = 0; k < h.clauses.size(); ++k) {
    const auto& c = h.clauses[k];
    os << "% clause " << k + 1 << ": pos=" << c.pos << " neg=" << c.neg << " types=" << types_string(c.clause) << "\n";
    os << to_string(c.clause) << "\n";
  }
  return os.str();
}

inline Hypothesis parse_hypothesis(const std::string& text) {
  Hypothesis h;
  std::istringstream is(text);
  std::string line;
  std::optional<HypothesisClause> pending;
  std::string types;
  auto field = [](const std::string& l, const std::string& key) -> std::optional<std::string> {
    auto p = l.find(key + "=");
    if (p == std::string::npos) return std::nullopt;
    p += key.size() + 1;
    auto e = l.find(' ', p);
    return l.substr(p, e == std::string::npos ? std::string::npos : e - p);
  };
  while (std::getline(is, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    line = line.substr(b);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line[0] == '%') {
      if (auto t = field(line, "target")) h.target = *t;
      if (line.rfind("% clause", 0) == 0) {
        pending = HypothesisClause{};
        pending->pos = std::stoi(field(line, "pos").value_or("0"));
        pending->neg = std::stoi(field(line, "neg").value_or("0"));
        types = field(line, "types").value_or("");
      }
      continue;
    }
    std::map<std::string, int> names;
    HypothesisClause hc = pending.value_or(HypothesisClause{});
    hc.clause = parse_clause(line, &names);
    std::stringstream ts(types);
    std::string item;
    while (std::getline(ts, item, ',')) {
      auto c = item.find(':');
      if (c == std::string::npos) throw Error("parse-error", "bad type entry " + item);
      auto it = names.find(item.substr(0, c));
      if (it != names.end()) hc.clause.types[it->second] = item.substr(c + 1);
    }
    if (h.target.empty()) h.target = hc.clause.head.pred;
    h.clauses.push_back(std::move(hc));
    pending.reset();
    types.clear();
  }
  return h;
}

}  // namespace stil::ilp
