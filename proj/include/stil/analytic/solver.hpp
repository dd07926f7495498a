#pragma once

// Interval branch-and-prune over constraint systems.
//
// Disjunctions are handled by depth-first choice of one branch per block.
// Each resulting conjunction is first checked by exact Fourier-Motzkin on its
// linear part; then boxes are contracted (linear projection of single-
// occurrence variables, natural and mean-value interval forms), probed for a
// witness (midpoint, linear witness, Gauss-Newton polish) and bisected along
// the widest variable.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stil/analytic/linear.hpp"
#include "stil/analytic/system.hpp"

namespace stil::analytic {

enum class SatStatus { sat, unsat, unknown };

inline const char* to_string(SatStatus s) {
  switch (s) {
    case SatStatus::sat: return "sat";
    case SatStatus::unsat: return "unsat";
    case SatStatus::unknown: return "unknown";
  }
  return "?";
}

struct SolveOptions {
  double precision = 1e-6;
  std::size_t budget = 1'000'000;
  double universe = 1e4;
  double residual_tol = 1e-9;
};

struct SatResult {
  SatStatus status = SatStatus::unknown;
  std::optional<std::map<std::string, double>> witness;
  double precision = 0.0;  // smallest box width reached when unknown
  bool budget_exhausted = false;
  std::size_t nodes = 0;
};

namespace detail {

struct CompiledPoly {
  struct Term {
    Interval c;
    double cd = 0.0;
    std::vector<std::pair<int, int>> factors;
  };
  std::vector<Term> terms;

  static CompiledPoly compile(const Polynomial& p, const std::map<std::string, int>& index) {
    CompiledPoly cp;
    for (const auto& [m, c] : p.terms()) {
      Term t{enclose(c), c.convert_to<double>(), {}};
      for (const auto& [v, e] : m) t.factors.emplace_back(index.at(v), e);
      cp.terms.push_back(std::move(t));
    }
    return cp;
  }
  Interval eval(const std::vector<Interval>& box) const {
    Interval s = Interval::point(0.0);
    for (const auto& t : terms) {
      Interval x = t.c;
      for (const auto& [i, e] : t.factors) x = x * pow(box[i], e);
      s = s + x;
    }
    return s;
  }
  double eval(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& t : terms) {
      double v = t.cd;
      for (const auto& [i, e] : t.factors) v *= std::pow(x[i], e);
      s += v;
    }
    return s;
  }
};

struct Compiled {
  PolyConstraint source;
  CompiledPoly f;
  std::vector<std::pair<int, CompiledPoly>> grad;
  // Variables occurring only in a degree-one monomial: (var, coeff, rest).
  struct Lin {
    int var;
    double a;
    CompiledPoly rest;
  };
  std::vector<Lin> lin;
};

inline Compiled compile(const PolyConstraint& c, const std::map<std::string, int>& index) {
  Compiled out{c, CompiledPoly::compile(c.poly, index), {}, {}};
  for (const auto& v : c.poly.variables()) {
    out.grad.emplace_back(index.at(v), CompiledPoly::compile(c.poly.derivative(v), index));
    const Rational a = c.poly.linear_coeff(v);
    if (a == 0) continue;
    bool only_linear = true;
    for (const auto& [m, k] : c.poly.terms())
      for (const auto& [u, e] : m)
        if (u == v && !(m.size() == 1 && e == 1)) only_linear = false;
    if (!only_linear) continue;
    const double ad = a.convert_to<double>();
    if (Rational(ad) != a) continue;  // keep projection exact in the coefficient
    out.lin.push_back({index.at(v), ad, CompiledPoly::compile(c.poly - Polynomial(a) * Polynomial::var(v), index)});
  }
  return out;
}

// Whether an interval value of the constraint function is infeasible.
inline bool refuted(Op op, const Interval& f) {
  switch (op) {
    case Op::lt: return f.lo >= 0.0;
    case Op::le: return f.lo > 0.0;
    case Op::eq: return f.lo > 0.0 || f.hi < 0.0;
  }
  return false;
}

class BranchAndPrune {
 public:
  BranchAndPrune(const std::vector<RealVar>& vars, const Conjunction& conj, const SolveOptions& opt, std::size_t& nodes)
      : vars_(vars), conj_(conj), opt_(opt), nodes_(nodes) {
    for (std::size_t i = 0; i < vars_.size(); ++i) index_[vars_[i].name] = static_cast<int>(i);
    for (const auto& c : conj_) cons_.push_back(compile(c, index_));
  }

  SatResult run() {
    SatResult res;
    res.precision = std::numeric_limits<double>::infinity();
    for (const auto& c : conj_) {
      if (!c.poly.is_constant()) continue;
      if (refuted(c.op, enclose(c.poly.constant_term()))) {
        res.status = SatStatus::unsat;
        res.precision = 0.0;
        return res;
      }
    }

    const auto lin = fourier_motzkin(linear_rows(vars_, conj_));
    if (lin.status == LinearStatus::infeasible) {
      res.status = SatStatus::unsat;
      res.precision = 0.0;
      return res;
    }
    std::vector<double> hint;
    if (lin.status == LinearStatus::feasible) {
      hint.resize(vars_.size());
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = lin.witness.find(vars_[i].name);
        hint[i] = it == lin.witness.end() ? clamp_mid(i) : it->second.convert_to<double>();
      }
      if (try_point(hint, res)) return res;
      if (polish(hint, root_box(), res)) return res;
    }

    bool undecided = false;
    struct Node {
      std::vector<Interval> box;
      int depth;
    };
    std::vector<Node> stack{{root_box(), 0}};
    while (!stack.empty()) {
      if (nodes_ >= opt_.budget) {
        res.budget_exhausted = true;
        undecided = true;
        break;
      }
      ++nodes_;
      auto [box, depth] = std::move(stack.back());
      stack.pop_back();
      if (!contract(box)) continue;

      std::vector<double> m(box.size());
      for (std::size_t i = 0; i < box.size(); ++i) m[i] = box[i].mid();
      if (try_point(m, res)) return res;
      // Newton polishing is costly; shallow boxes and a sample of deep ones.
      if ((depth < 12 || nodes_ % 64 == 0) && polish(m, box, res)) return res;

      std::size_t widest = 0;
      double w = -1.0;
      for (std::size_t i = 0; i < box.size(); ++i) {
        const double bw = box[i].width();
        if (bw > w) w = bw, widest = i;
      }
      if (w <= opt_.precision) {
        undecided = true;
        res.precision = std::min(res.precision, std::max(w, 0.0));
        continue;
      }
      const double cut = box[widest].mid();
      std::vector<Interval> left = box, right = box;
      left[widest].hi = cut;
      right[widest].lo = cut;
      stack.push_back({std::move(right), depth + 1});
      stack.push_back({std::move(left), depth + 1});
    }
    res.status = undecided ? SatStatus::unknown : SatStatus::unsat;
    if (!undecided) res.precision = 0.0;
    if (res.budget_exhausted && !std::isfinite(res.precision)) res.precision = largest_width(stack);
    return res;
  }

 private:
  double clamp_mid(std::size_t i) const { return vars_[i].lo + (vars_[i].hi - vars_[i].lo) / 2.0; }

  std::vector<Interval> root_box() const {
    std::vector<Interval> box;
    for (const auto& v : vars_) box.push_back({v.lo, v.hi});
    return box;
  }

  template <typename Stack>
  static double largest_width(const Stack& stack) {
    double w = 0.0;
    for (const auto& n : stack)
      for (const auto& iv : n.box) w = std::max(w, iv.width());
    return w;
  }

  bool contract(std::vector<Interval>& box) const {
    for (int round = 0; round < 4; ++round) {
      bool changed = false;
      for (const auto& c : cons_) {
        Interval f = c.f.eval(box);
        // Mean-value form around the midpoint.
        if (!c.grad.empty()) {
          std::vector<double> m(box.size());
          std::vector<Interval> mb(box.size());
          for (std::size_t i = 0; i < box.size(); ++i) m[i] = box[i].mid(), mb[i] = Interval::point(m[i]);
          Interval mv = c.f.eval(mb);
          for (const auto& [i, g] : c.grad) mv = mv + g.eval(box) * (box[i] - mb[i]);
          f = intersect(f, mv);
        }
        if (f.empty() || refuted(c.source.op, f)) return false;
        for (const auto& l : c.lin) {
          const Interval r = l.rest.eval(box);
          Interval target = c.source.op == Op::eq ? -r : Interval{-std::numeric_limits<double>::infinity(), -r.lo};
          const Interval proj = target / Interval::point(l.a);
          const Interval nx = intersect(box[l.var], proj);
          if (nx.empty()) return false;
          if (nx.lo > box[l.var].lo || nx.hi < box[l.var].hi) {
            const double shrink = box[l.var].width() - nx.width();
            box[l.var] = nx;
            if (shrink > 1e-3 * std::max(1.0, box[l.var].width())) changed = true;
          }
        }
      }
      if (!changed) break;
    }
    return true;
  }

  bool fast_ok(const std::vector<double>& x) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= vars_[i].lo && x[i] <= vars_[i].hi)) return false;
    for (const auto& c : cons_) {
      const double v = c.f.eval(x);
      const double scale = 1e-6;
      switch (c.source.op) {
        case Op::lt:
          if (v > -opt_.precision * 0.5) return false;
          break;
        case Op::le:
          if (v > scale) return false;
          break;
        case Op::eq:
          if (std::abs(v) > scale) return false;
          break;
      }
    }
    return true;
  }

  bool verify(const std::vector<double>& x) const {
    auto value_of = [&](const std::string& n) { return x[static_cast<std::size_t>(index_.at(n))]; };
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= vars_[i].lo && x[i] <= vars_[i].hi)) return false;
    for (const auto& c : conj_)
      if (!satisfied(c, value_of, opt_.residual_tol, opt_.precision)) return false;
    return true;
  }

  bool try_point(const std::vector<double>& x, SatResult& res) const {
    if (!fast_ok(x) || !verify(x)) return false;
    res.status = SatStatus::sat;
    res.precision = 0.0;
    std::map<std::string, double> w;
    for (std::size_t i = 0; i < x.size(); ++i) w[vars_[i].name] = x[i];
    res.witness = std::move(w);
    return true;
  }

  // Gauss-Newton on equalities and violated inequalities (pushed to a small
  // negative target), clamped to the box.
  bool polish(std::vector<double> x, const std::vector<Interval>& box, SatResult& res) const {
    const std::size_t n = x.size();
    if (n == 0) return false;
    for (int iter = 0; iter < 40; ++iter) {
      std::vector<std::pair<const Compiled*, double>> rows;
      for (const auto& c : cons_) {
        const double v = c.f.eval(x);
        if (c.source.op == Op::eq) {
          rows.emplace_back(&c, v);
        } else {
          const double target = c.source.op == Op::lt ? -2.0 * opt_.precision : -1e-12;
          if (v > target) rows.emplace_back(&c, v - target * 2.0);
        }
      }
      if (rows.empty()) break;
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
      Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        r(static_cast<Eigen::Index>(k)) = rows[k].second;
        for (const auto& [i, g] : rows[k].first->grad)
          J(static_cast<Eigen::Index>(k), i) = g.eval(x);
      }
      Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-r);
      if (!step.allFinite() || step.norm() == 0.0) break;
      for (std::size_t i = 0; i < n; ++i)
        x[i] = std::clamp(x[i] + step(static_cast<Eigen::Index>(i)), box[i].lo, box[i].hi);
    }
    return try_point(x, res);
  }

  const std::vector<RealVar>& vars_;
  const Conjunction& conj_;
  const SolveOptions& opt_;
  std::size_t& nodes_;
  std::map<std::string, int> index_;
  std::vector<Compiled> cons_;
};

}  // namespace detail

/// Decides a constraint system. Unsat is reported only when every branch and
/// box has been refuted; sat only with a verified witness.
inline SatResult solve(const ConstraintSystem& sys, const SolveOptions& opt = {}) {
  if (!(opt.precision > 0.0) || opt.budget == 0 || !(opt.universe > 0.0))
    throw Error("invalid-options", "precision, budget and universe must be positive");
  std::vector<RealVar> vars = sys.vars();
  for (auto& v : vars) {
    v.lo = std::max(v.lo, -opt.universe);
    v.hi = std::min(v.hi, opt.universe);
    if (v.lo > v.hi) {
      SatResult r;
      r.status = SatStatus::unsat;
      return r;
    }
  }

  std::size_t nodes = 0;
  SatResult overall;
  overall.status = SatStatus::unsat;
  double worst_precision = 0.0;
  bool exhausted = false;

  const auto& blocks = sys.disjunctions();
  Conjunction conj = sys.constraints();
  std::optional<SatResult> found;

  // Depth-first over branch choices; the linear relaxation prunes early.
  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (found) return;
    if (k == blocks.size()) {
      if (nodes >= opt.budget) {
        exhausted = true;
        overall.status = SatStatus::unknown;
        return;
      }
      detail::BranchAndPrune bp(vars, conj, opt, nodes);
      SatResult r = bp.run();
      if (r.status == SatStatus::sat) {
        found = std::move(r);
      } else if (r.status == SatStatus::unknown) {
        overall.status = SatStatus::unknown;
        exhausted = exhausted || r.budget_exhausted;
        worst_precision = std::max(worst_precision, r.precision);
      }
      return;
    }
    for (const auto& branch : blocks[k]) {
      const std::size_t mark = conj.size();
      conj.insert(conj.end(), branch.begin(), branch.end());
      bool prune = false;
      if (k + 1 < blocks.size()) {
        const auto lin = fourier_motzkin(linear_rows(vars, conj), 600);
        prune = lin.status == LinearStatus::infeasible;
      }
      if (!prune) self(self, k + 1);
      conj.resize(mark);
      if (found) return;
    }
  };
  recurse(recurse, 0);

  if (found) {
    found->nodes = nodes;
    return *found;
  }
  overall.nodes = nodes;
  overall.budget_exhausted = exhausted;
  overall.precision = overall.status == SatStatus::unknown ? worst_precision : 0.0;
  return overall;
}

}  // namespace stil::analytic
