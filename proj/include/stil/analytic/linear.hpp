#pragma once

// Exact Fourier-Motzkin elimination over the linear constraints of a
// conjunction. Used as a sound prune (infeasible linear relaxation means the
// whole conjunction is infeasible) and as an exact witness generator when
// every constraint is linear.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stil/analytic/system.hpp"

namespace stil::analytic {

/// sum coeffs[v]*v + c  (< or <=)  0
struct LinearRow {
  std::map<std::string, Rational> coeffs;
  Rational c = 0;
  bool strict = false;

  friend bool operator<(const LinearRow& a, const LinearRow& b) {
    return std::tie(a.coeffs, a.c, a.strict) < std::tie(b.coeffs, b.c, b.strict);
  }
};

enum class LinearStatus { feasible, infeasible, too_large };

struct LinearResult {
  LinearStatus status = LinearStatus::too_large;
  std::map<std::string, Rational> witness;  // set when feasible
};

namespace detail {

inline std::optional<LinearRow> to_row(const Polynomial& p, bool strict) {
  if (!p.is_linear()) return std::nullopt;
  LinearRow r;
  r.strict = strict;
  for (const auto& [m, c] : p.terms()) {
    if (m.empty())
      r.c = c;
    else
      r.coeffs[m[0].first] = c;
  }
  return r;
}

// Scales so the first coefficient has magnitude 1; keeps duplicates apart.
inline LinearRow normalize(LinearRow r) {
  if (r.coeffs.empty()) return r;
  Rational s = abs(r.coeffs.begin()->second);
  for (auto& [v, c] : r.coeffs) c /= s;
  r.c /= s;
  return r;
}

}  // namespace detail

/// Linear rows of a conjunction (equalities become two rows) plus the
/// finite variable bounds.
inline std::vector<LinearRow> linear_rows(const std::vector<RealVar>& vars, const Conjunction& conj) {
  std::vector<LinearRow> rows;
  for (const auto& c : conj) {
    auto r = detail::to_row(c.poly, c.op == Op::lt);
    if (!r) continue;
    if (c.op == Op::eq) {
      rows.push_back(*r);
      LinearRow n = *r;
      for (auto& [v, k] : n.coeffs) k = -k;
      n.c = -n.c;
      rows.push_back(n);
    } else {
      rows.push_back(*r);
    }
  }
  for (const auto& v : vars) {
    if (std::isfinite(v.hi)) rows.push_back(LinearRow{{{v.name, Rational(1)}}, -Rational(v.hi), false});
    if (std::isfinite(v.lo)) rows.push_back(LinearRow{{{v.name, Rational(-1)}}, Rational(v.lo), false});
  }
  return rows;
}

/// Decides the linear system exactly. `max_rows` bounds intermediate growth.
inline LinearResult fourier_motzkin(std::vector<LinearRow> rows, std::size_t max_rows = 4000) {
  std::set<std::string> names;
  for (const auto& r : rows)
    for (const auto& [v, c] : r.coeffs) names.insert(v);

  std::vector<std::string> order;
  std::vector<std::vector<LinearRow>> stages;  // stages[k]: rows before eliminating order[k]
  std::set<std::string> remaining = names;

  auto dedupe = [](std::vector<LinearRow>& rs) {
    std::set<LinearRow> seen;
    std::vector<LinearRow> out;
    for (auto& r : rs) {
      LinearRow n = detail::normalize(r);
      if (n.coeffs.empty()) {
        out.push_back(n);
        continue;
      }
      if (seen.insert(n).second) out.push_back(n);
    }
    rs = std::move(out);
  };
  dedupe(rows);

  while (!remaining.empty()) {
    // Eliminate the variable producing the fewest new rows.
    std::string pick;
    std::size_t best = SIZE_MAX;
    for (const auto& v : remaining) {
      std::size_t pos = 0, neg = 0;
      for (const auto& r : rows) {
        auto it = r.coeffs.find(v);
        if (it == r.coeffs.end()) continue;
        (it->second > 0 ? pos : neg)++;
      }
      const std::size_t cost = pos * neg;
      if (cost < best) best = cost, pick = v;
    }
    stages.push_back(rows);
    order.push_back(pick);
    remaining.erase(pick);

    std::vector<LinearRow> next, pos, neg;
    for (auto& r : rows) {
      auto it = r.coeffs.find(pick);
      if (it == r.coeffs.end())
        next.push_back(r);
      else
        (it->second > 0 ? pos : neg).push_back(r);
    }
    for (const auto& a : pos) {
      for (const auto& b : neg) {
        const Rational ka = a.coeffs.at(pick), kb = -b.coeffs.at(pick);
        LinearRow r;
        r.strict = a.strict || b.strict;
        r.c = a.c * kb + b.c * ka;
        for (const auto& [v, k] : a.coeffs)
          if (v != pick) r.coeffs[v] += k * kb;
        for (const auto& [v, k] : b.coeffs)
          if (v != pick) r.coeffs[v] += k * ka;
        for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
          it = it->second == 0 ? r.coeffs.erase(it) : std::next(it);
        next.push_back(std::move(r));
      }
    }
    dedupe(next);
    for (const auto& r : next)
      if (r.coeffs.empty() && (r.strict ? r.c >= 0 : r.c > 0)) return {LinearStatus::infeasible, {}};
    if (next.size() > max_rows) return {LinearStatus::too_large, {}};
    rows = std::move(next);
  }
  for (const auto& r : rows)
    if (r.strict ? r.c >= 0 : r.c > 0) return {LinearStatus::infeasible, {}};

  // Back-substitution, last eliminated first.
  LinearResult res;
  res.status = LinearStatus::feasible;
  for (std::size_t k = order.size(); k-- > 0;) {
    const std::string& v = order[k];
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& r : stages[k]) {
      auto it = r.coeffs.find(v);
      if (it == r.coeffs.end()) continue;
      Rational rest = r.c;
      bool complete = true;
      for (const auto& [u, c] : r.coeffs) {
        if (u == v) continue;
        auto w = res.witness.find(u);
        if (w == res.witness.end()) {
          complete = false;
          break;
        }
        rest += c * w->second;
      }
      if (!complete) continue;  // involves a variable eliminated earlier; not a bound yet
      const Rational bound = -rest / it->second;
      if (it->second > 0) {
        if (!hi || bound < *hi) {
          hi = bound;
          hi_strict = r.strict;
        } else if (bound == *hi) {
          hi_strict = hi_strict || r.strict;
        }
      } else {
        if (!lo || bound > *lo) {
          lo = bound;
          lo_strict = r.strict;
        } else if (bound == *lo) {
          lo_strict = lo_strict || r.strict;
        }
      }
    }
    Rational val = 0;
    if (lo && hi) {
      val = (*lo == *hi) ? *lo : Rational((*lo + *hi) / 2);
    } else if (lo) {
      val = lo_strict ? Rational(*lo + 1) : *lo;
    } else if (hi) {
      val = hi_strict ? Rational(*hi - 1) : *hi;
    }
    res.witness[v] = val;
  }
  return res;
}

}  // namespace stil::analytic
