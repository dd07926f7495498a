#pragma once

// Relations as polynomial constraint systems over entity parameters.
//
// Variables are named <param>_<entity>:
//   point           x_a y_a
//   oriented point  x_a y_a u_a v_a        (u^2 + v^2 = 1)
//   segment         x1_a y1_a x2_a y2_a    (non-degenerate)
//   aarect          x_a y_a w_a h_a        (w, h >= size floor)
//   circle          x_a y_a r_a            (r >= size floor)

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "stil/analytic/solver.hpp"
#include "stil/qsr.hpp"
#include "stil/relations.hpp"

namespace stil::analytic {

enum class EntityKind { point, oriented_point, segment, aarect, circle };

inline const char* to_string(EntityKind k) {
  switch (k) {
    case EntityKind::point: return "point";
    case EntityKind::oriented_point: return "oriented_point";
    case EntityKind::segment: return "segment";
    case EntityKind::aarect: return "aarect";
    case EntityKind::circle: return "circle";
  }
  return "?";
}

inline EntityKind parse_entity_kind(const std::string& s) {
  for (auto k : {EntityKind::point, EntityKind::oriented_point, EntityKind::segment, EntityKind::aarect,
                 EntityKind::circle})
    if (s == to_string(k)) return k;
  throw Error("parse-error", "unknown entity kind " + s);
}

using EntitySchema = std::map<std::string, EntityKind>;

struct EncodeOptions {
  qsr::QualificationContext ctx{};
  double universe = 1e4;
  /// Lower bound for widths, heights and radii.
  double size_floor = 1e-3;
};

namespace detail {

inline Polynomial P(const std::string& param, const std::string& id) { return Polynomial::var(param + "_" + id); }
inline Polynomial Q(double v) { return Polynomial(Rational(v)); }

inline EntityKind kind_of(const EntitySchema& schema, const std::string& id) {
  auto it = schema.find(id);
  if (it == schema.end()) throw Error("no-encoding", "entity " + id + " missing from schema");
  return it->second;
}

/// Declares an entity's parameters and their type constraints.
inline void declare_entity(ConstraintSystem& sys, const std::string& id, EntityKind k, const EncodeOptions& o) {
  const double U = o.universe;
  auto coord = [&](const std::string& p) { sys.declare({p + "_" + id, -U, U}); };
  switch (k) {
    case EntityKind::point:
      coord("x"), coord("y");
      break;
    case EntityKind::oriented_point:
      coord("x"), coord("y");
      sys.declare({"u_" + id, -1.0, 1.0});
      sys.declare({"v_" + id, -1.0, 1.0});
      sys.add(eq(P("u", id).pow(2) + P("v", id).pow(2), 1));
      break;
    case EntityKind::segment:
      coord("x1"), coord("y1"), coord("x2"), coord("y2");
      sys.add(gt((P("x2", id) - P("x1", id)).pow(2) + (P("y2", id) - P("y1", id)).pow(2), 0));
      break;
    case EntityKind::aarect:
      coord("x"), coord("y");
      sys.declare({"w_" + id, o.size_floor, 2 * U});
      sys.declare({"h_" + id, o.size_floor, 2 * U});
      break;
    case EntityKind::circle:
      coord("x"), coord("y");
      sys.declare({"r_" + id, o.size_floor, 2 * U});
      break;
  }
}

struct Box {
  Polynomial x0, x1, y0, y1;
};
inline Box box(const std::string& id) {
  return {P("x", id), P("x", id) + P("w", id), P("y", id), P("y", id) + P("h", id)};
}

// Flattens a system into disjunctive normal form (list of conjunctions).
inline std::vector<Conjunction> dnf(const ConstraintSystem& s) {
  std::vector<Conjunction> out{s.constraints()};
  for (const auto& block : s.disjunctions()) {
    std::vector<Conjunction> next;
    for (const auto& c : out)
      for (const auto& branch : block) {
        Conjunction n = c;
        n.insert(n.end(), branch.begin(), branch.end());
        next.push_back(std::move(n));
      }
    out = std::move(next);
  }
  return out;
}

inline void rcc8_boxes(ConstraintSystem& s, Rel r, const std::string& a, const std::string& b) {
  const Box A = box(a), B = box(b);
  switch (r) {
    case Rel::ntpp:
      s.add(lt(B.x0, A.x0)), s.add(lt(A.x1, B.x1)), s.add(lt(B.y0, A.y0)), s.add(lt(A.y1, B.y1));
      break;
    case Rel::ntppi: rcc8_boxes(s, Rel::ntpp, b, a); break;
    case Rel::eq:
      s.add(eq(A.x0, B.x0)), s.add(eq(A.y0, B.y0)), s.add(eq(P("w", a), P("w", b))), s.add(eq(P("h", a), P("h", b)));
      break;
    case Rel::tpp:
      s.add(le(B.x0, A.x0)), s.add(le(A.x1, B.x1)), s.add(le(B.y0, A.y0)), s.add(le(A.y1, B.y1));
      s.add_any({{eq(A.x0, B.x0)}, {eq(A.x1, B.x1)}, {eq(A.y0, B.y0)}, {eq(A.y1, B.y1)}});
      s.add_any({{lt(B.x0, A.x0)}, {lt(A.x1, B.x1)}, {lt(B.y0, A.y0)}, {lt(A.y1, B.y1)}});
      break;
    case Rel::tppi: rcc8_boxes(s, Rel::tpp, b, a); break;
    case Rel::dc:
      s.add_any({{lt(A.x1, B.x0)}, {lt(B.x1, A.x0)}, {lt(A.y1, B.y0)}, {lt(B.y1, A.y0)}});
      break;
    case Rel::ec:
      s.add(le(A.x0, B.x1)), s.add(le(B.x0, A.x1)), s.add(le(A.y0, B.y1)), s.add(le(B.y0, A.y1));
      s.add_any({{eq(A.x1, B.x0)}, {eq(B.x1, A.x0)}, {eq(A.y1, B.y0)}, {eq(B.y1, A.y0)}});
      break;
    case Rel::po:
      s.add(lt(A.x0, B.x1)), s.add(lt(B.x0, A.x1)), s.add(lt(A.y0, B.y1)), s.add(lt(B.y0, A.y1));
      s.add_any({{lt(A.x0, B.x0)}, {gt(A.x1, B.x1)}, {lt(A.y0, B.y0)}, {gt(A.y1, B.y1)}});
      s.add_any({{lt(B.x0, A.x0)}, {gt(B.x1, A.x1)}, {lt(B.y0, A.y0)}, {gt(B.y1, A.y1)}});
      break;
    default: throw Error("no-encoding", std::string(to_string(r)) + " over aarect");
  }
}

inline void rcc8_circles(ConstraintSystem& s, Rel r, const std::string& a, const std::string& b) {
  const Polynomial d2 = (P("x", a) - P("x", b)).pow(2) + (P("y", a) - P("y", b)).pow(2);
  const Polynomial ra = P("r", a), rb = P("r", b);
  switch (r) {
    case Rel::dc: s.add(gt(d2, (ra + rb).pow(2))); break;
    case Rel::ec: s.add(eq(d2, (ra + rb).pow(2))); break;
    case Rel::po:
      s.add(lt(d2, (ra + rb).pow(2)));
      s.add(gt(d2, (ra - rb).pow(2)));
      break;
    case Rel::tpp:
      s.add(lt(ra, rb));
      s.add(eq(d2, (rb - ra).pow(2)));
      break;
    case Rel::ntpp:
      s.add(lt(ra, rb));
      s.add(lt(d2, (rb - ra).pow(2)));
      break;
    case Rel::tppi: rcc8_circles(s, Rel::tpp, b, a); break;
    case Rel::ntppi: rcc8_circles(s, Rel::ntpp, b, a); break;
    case Rel::eq:
      s.add(eq(P("x", a), P("x", b))), s.add(eq(P("y", a), P("y", b))), s.add(eq(ra, rb));
      break;
    default: throw Error("no-encoding", std::string(to_string(r)) + " over circle");
  }
}

inline void allen(ConstraintSystem& s, Rel r, const Polynomial& s1, const Polynomial& e1, const Polynomial& s2,
                  const Polynomial& e2) {
  switch (r) {
    case Rel::precedes: s.add(lt(e1, s2)); break;
    case Rel::meets: s.add(eq(e1, s2)); break;
    case Rel::overlaps: s.add(lt(s1, s2)), s.add(lt(s2, e1)), s.add(lt(e1, e2)); break;
    case Rel::starts: s.add(eq(s1, s2)), s.add(lt(e1, e2)); break;
    case Rel::during: s.add(lt(s2, s1)), s.add(lt(e1, e2)); break;
    case Rel::finishes: s.add(lt(s2, s1)), s.add(eq(e1, e2)); break;
    case Rel::equals: s.add(eq(s1, s2)), s.add(eq(e1, e2)); break;
    default: allen(s, converse(r), s2, e2, s1, e1);
  }
}

// Position used for LR references and distance between non-region kinds.
inline std::pair<Polynomial, Polynomial> anchor(const std::string& id, EntityKind k) {
  if (k == EntityKind::aarect) return {P("x", id) + Q(0.5) * P("w", id), P("y", id) + Q(0.5) * P("h", id)};
  if (k == EntityKind::segment) throw Error("no-encoding", "segment has no anchor point");
  return {P("x", id), P("y", id)};
}

inline void lr(ConstraintSystem& s, Rel r, const Polynomial& ox, const Polynomial& oy, const Polynomial& dx,
               const Polynomial& dy, const Polynomial& px, const Polynomial& py) {
  const Polynomial cross = (dx - ox) * (py - oy) - (dy - oy) * (px - ox);
  const Polynomial dot = (px - ox) * (dx - ox) + (py - oy) * (dy - oy);
  const Polynomial len2 = (dx - ox).pow(2) + (dy - oy).pow(2);
  switch (r) {
    case Rel::left: s.add(gt(cross, 0)); break;
    case Rel::right: s.add(lt(cross, 0)); break;
    case Rel::collinear: s.add(eq(cross, 0)); break;
    case Rel::start: s.add(eq(px, ox)), s.add(eq(py, oy)); break;
    case Rel::end: s.add(eq(px, dx)), s.add(eq(py, dy)); break;
    case Rel::back: s.add(eq(cross, 0)), s.add(lt(dot, 0)); break;
    case Rel::front: s.add(eq(cross, 0)), s.add(gt(dot, len2)); break;
    case Rel::on: s.add(eq(cross, 0)), s.add(gt(dot, 0)), s.add(lt(dot, len2)); break;
    default: throw Error("no-encoding", std::string(to_string(r)));
  }
}

inline Polynomial area(const std::string& id, EntityKind k) {
  if (k == EntityKind::aarect) return P("w", id) * P("h", id);
  if (k == EntityKind::circle) return Polynomial(Rational(std::numbers::pi)) * P("r", id).pow(2);
  throw Error("no-encoding", std::string("size over ") + to_string(k));
}

// Disjunction for "gap between a and b is <= t" (le) or "> t" (!le).
inline Disjunction gap_cases(const std::string& a, EntityKind ka, const std::string& b, EntityKind kb, double t,
                             bool le_mode) {
  if (ka == EntityKind::circle && kb == EntityKind::circle) {
    const Polynomial d2 = (P("x", a) - P("x", b)).pow(2) + (P("y", a) - P("y", b)).pow(2);
    const Polynomial reach = (P("r", a) + P("r", b) + Q(t)).pow(2);
    return {{le_mode ? le(d2, reach) : gt(d2, reach)}};
  }
  if (ka != EntityKind::aarect || kb != EntityKind::aarect)
    throw Error("no-encoding", std::string("distance over ") + to_string(ka) + "/" + to_string(kb));
  const Box A = box(a), B = box(b);
  // Per-axis cases: a before b, b before a, overlapping projections.
  struct Axis {
    Conjunction cond;
    std::optional<Polynomial> gap;
  };
  auto axis = [](const Polynomial& a0, const Polynomial& a1, const Polynomial& b0, const Polynomial& b1) {
    return std::vector<Axis>{{{le(a1, b0)}, b0 - a1}, {{le(b1, a0)}, a0 - b1}, {{le(a0, b1), le(b0, a1)}, std::nullopt}};
  };
  Disjunction out;
  for (const auto& ax : axis(A.x0, A.x1, B.x0, B.x1)) {
    for (const auto& ay : axis(A.y0, A.y1, B.y0, B.y1)) {
      Conjunction c = ax.cond;
      c.insert(c.end(), ay.cond.begin(), ay.cond.end());
      Polynomial g2;
      if (ax.gap) g2 += ax.gap->pow(2);
      if (ay.gap) g2 += ay.gap->pow(2);
      if (!ax.gap && !ay.gap) {
        if (!le_mode) continue;  // overlapping boxes have gap 0
      } else {
        c.push_back(le_mode ? le(g2, Q(t * t)) : gt(g2, Q(t * t)));
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline void encode_base(ConstraintSystem& s, const RelationTuple& t, const EntitySchema& schema,
                        const EncodeOptions& o) {
  const Rel r = t.rel;
  const auto& args = t.args;
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw Error("no-encoding", to_string(t) + " has the wrong arity");
  };
  switch (family_of(r)) {
    case Family::mereotopology: {
      need(2);
      const EntityKind ka = kind_of(schema, args[0]), kb = kind_of(schema, args[1]);
      if (ka == EntityKind::aarect && kb == EntityKind::aarect)
        rcc8_boxes(s, r, args[0], args[1]);
      else if (ka == EntityKind::circle && kb == EntityKind::circle)
        rcc8_circles(s, r, args[0], args[1]);
      else
        throw Error("no-encoding", to_string(t) + " over " + to_string(ka) + "/" + to_string(kb));
      return;
    }
    case Family::interval: {
      need(2);
      if (kind_of(schema, args[0]) != EntityKind::aarect || kind_of(schema, args[1]) != EntityKind::aarect)
        throw Error("no-encoding", to_string(t) + " needs aarects");
      const Box A = box(args[0]), B = box(args[1]);
      if (t.qualifier == "y")
        allen(s, r, A.y0, A.y1, B.y0, B.y1);
      else if (t.qualifier == "x" || t.qualifier.empty())
        allen(s, r, A.x0, A.x1, B.x0, B.x1);
      else
        throw Error("no-encoding", "unknown axis qualifier " + t.qualifier);
      return;
    }
    case Family::orientation: {
      if (r == Rel::facing_towards || r == Rel::facing_away || r == Rel::same_direction ||
          r == Rel::opposite_direction) {
        need(2);
        if (kind_of(schema, args[0]) != EntityKind::oriented_point ||
            kind_of(schema, args[1]) != EntityKind::oriented_point)
          throw Error("no-encoding", to_string(t) + " needs oriented points");
        const std::string &a = args[0], &b = args[1];
        const double c = std::cos(o.ctx.angle_tol);
        const Polynomial cq = Q(c);
        if (r == Rel::same_direction || r == Rel::opposite_direction) {
          const Polynomial dot = P("u", a) * P("u", b) + P("v", a) * P("v", b);
          s.add(r == Rel::same_direction ? ge(dot, cq) : le(dot, -cq));
          return;
        }
        // angle(v_a, p_b - p_a) <= tol, squared so no square roots appear
        const Polynomial dx = P("x", b) - P("x", a), dy = P("y", b) - P("y", a);
        const Polynomial dot = P("u", a) * dx + P("v", a) * dy;
        const Polynomial d2 = dx.pow(2) + dy.pow(2);
        s.add(gt(d2, 0));
        s.add(r == Rel::facing_towards ? ge(dot, 0) : le(dot, 0));
        s.add(ge(dot.pow(2), Q(c * c) * d2));
        return;
      }
      if (args.size() == 3) {
        for (const auto& id : args)
          if (kind_of(schema, id) != EntityKind::point) throw Error("no-encoding", to_string(t) + " needs points");
        lr(s, r, P("x", args[0]), P("y", args[0]), P("x", args[1]), P("y", args[1]), P("x", args[2]),
           P("y", args[2]));
        return;
      }
      need(2);
      if (kind_of(schema, args[0]) != EntityKind::segment)
        throw Error("no-encoding", to_string(t) + " needs a segment reference");
      const auto [px, py] = anchor(args[1], kind_of(schema, args[1]));
      lr(s, r, P("x1", args[0]), P("y1", args[0]), P("x2", args[0]), P("y2", args[0]), px, py);
      return;
    }
    case Family::distance: {
      need(2);
      const EntityKind ka = kind_of(schema, args[0]), kb = kind_of(schema, args[1]);
      const double adj = o.ctx.adjacent_threshold, nr = o.ctx.near_threshold;
      if (r == Rel::adjacent) {
        s.add_any(gap_cases(args[0], ka, args[1], kb, adj, true));
      } else if (r == Rel::near) {
        s.add_any(gap_cases(args[0], ka, args[1], kb, adj, false));
        s.add_any(gap_cases(args[0], ka, args[1], kb, nr, true));
      } else {
        s.add_any(gap_cases(args[0], ka, args[1], kb, nr, false));
      }
      return;
    }
    case Family::size: {
      need(2);
      const Polynomial A = area(args[0], kind_of(schema, args[0]));
      const Polynomial B = area(args[1], kind_of(schema, args[1]));
      const Polynomial tol = Q(o.ctx.size_ratio_tol);
      if (r == Rel::equi_sized) {
        s.add(le(A - B, tol * A));
        s.add(le(B - A, tol * B));
      } else if (r == Rel::smaller) {
        s.add(gt(B - A, tol * B));
      } else {
        s.add(gt(A - B, tol * A));
      }
      return;
    }
    case Family::motion: break;
  }
  throw Error("no-encoding", to_string(t));
}

}  // namespace detail

/// Constraint system whose solutions are exactly the parameter values
/// realizing the relation. Unions and coarse relations (dr, pp, o, ...)
/// become disjunctions over their base relations.
inline ConstraintSystem encode_relation(const RelationTuple& t, const EntitySchema& schema,
                                        const EncodeOptions& o = {}) {
  if (t.time) throw Error("no-encoding", "time-indexed relations have no static encoding");
  ConstraintSystem s;
  for (const auto& id : t.args) detail::declare_entity(s, id, detail::kind_of(schema, id), o);

  std::vector<Rel> bases;
  if (family_of(t.rel) == Family::mereotopology && !is_rcc8(t.rel))
    bases = qsr::rcc8_members(t.rel);
  else if (t.rel == Rel::collinear && t.args.size() == 2)
    bases = {Rel::collinear};
  else
    bases = {t.rel};

  if (bases.size() == 1) {
    RelationTuple b = t;
    b.rel = bases[0];
    detail::encode_base(s, b, schema, o);
    return s;
  }
  Disjunction any;
  for (Rel r : bases) {
    ConstraintSystem part;
    for (const auto& id : t.args) detail::declare_entity(part, id, detail::kind_of(schema, id), o);
    RelationTuple b = t;
    b.rel = r;
    detail::encode_base(part, b, schema, o);
    for (auto& c : detail::dnf(part)) any.push_back(std::move(c));
  }
  s.add_any(std::move(any));
  return s;
}

/// Conjunction of all encodings with shared entity variables.
inline ConstraintSystem encode_all(const std::vector<RelationTuple>& rels, const EntitySchema& schema,
                                   const EncodeOptions& o = {}) {
  ConstraintSystem s;
  for (const auto& [id, k] : schema) detail::declare_entity(s, id, k, o);
  for (const auto& r : rels) {
    ConstraintSystem part = encode_relation(r, schema, o);
    // Type constraints were already added by the schema pass.
    ConstraintSystem body;
    for (const auto& v : part.vars()) body.declare(v);
    ConstraintSystem types;
    for (const auto& id : r.args) detail::declare_entity(types, id, detail::kind_of(schema, id), o);
    const auto& tc = types.constraints();
    for (const auto& c : part.constraints())
      if (std::find(tc.begin(), tc.end(), c) == tc.end()) body.add(c);
    for (const auto& d : part.disjunctions()) body.add_any(d);
    s.merge(body);
  }
  return s;
}

inline SatResult check_consistency(const std::vector<RelationTuple>& rels, const EntitySchema& schema,
                                   const SolveOptions& so = {}, const EncodeOptions& eo = {}) {
  return solve(encode_all(rels, schema, eo), so);
}

/// Solves a relation with some parameters fixed and optional domain
/// overrides; the witness completes the geometry.
inline SatResult quantify(const RelationTuple& rel, const EntitySchema& schema,
                          const std::map<std::string, double>& fixed,
                          const std::map<std::string, std::pair<double, double>>& domains = {},
                          const SolveOptions& so = {}, const EncodeOptions& eo = {}) {
  ConstraintSystem s = encode_relation(rel, schema, eo);
  for (const auto& [name, dom] : domains) {
    RealVar* v = s.find(name);
    if (!v) throw Error("unknown-variable", name);
    v->lo = dom.first;
    v->hi = dom.second;
  }
  for (const auto& [name, value] : fixed) s.fix(name, value);
  return solve(s, so);
}

}  // namespace stil::analytic
