#pragma once

// The spatial kernel: evaluates a named binary relation on two placed
// entities. Every relation literal the learner or the fluent layer tests
// goes through relation_holds().

#include <optional>
#include <string>
#include <string_view>

#include "stil/qsr.hpp"

namespace stil::kernel {

/// Geometry together with its optional facing direction.
struct Placed {
  const geom::Entity* geometry = nullptr;
  std::optional<geom::Vector> facing;
};

/// Derived relations that are not part of the calculi vocabulary.
inline bool is_derived_relation(std::string_view name) { return name == "gaze_on"; }

inline bool is_known_relation(std::string_view name) {
  if (is_derived_relation(name)) return true;
  auto r = parse_rel(name);
  return r && family_of(*r) != Family::motion;
}

/// gaze_on(g, p): the gaze point lies in (or on) p's region.
inline bool gaze_on(const Placed& g, const Placed& p, const qsr::QualificationContext& ctx) {
  if (!geom::is_region(*p.geometry)) return false;
  const geom::Point gp = geom::centroid(*g.geometry);
  return geom::locate(gp, *p.geometry, ctx.eps_contact) != geom::Location::exterior;
}

/// Throws on unknown names; inapplicable entity pairs evaluate false.
inline bool relation_holds(std::string_view name, const Placed& a, const Placed& b,
                           const qsr::QualificationContext& ctx, std::string_view qualifier = {}) {
  if (name == "gaze_on") return gaze_on(a, b, ctx);
  const auto rel = parse_rel(name);
  if (!rel) throw Error("unknown-relation", std::string(name));
  const auto& ga = *a.geometry;
  const auto& gb = *b.geometry;
  try {
    switch (family_of(*rel)) {
      case Family::mereotopology:
        if (!geom::is_region(ga) || !geom::is_region(gb)) return false;
        return qsr::satisfies(qsr::rcc8(ga, gb, ctx), *rel);
      case Family::interval: {
        const auto* ra = std::get_if<geom::AxisAlignedRectangle>(&ga);
        const auto* rb = std::get_if<geom::AxisAlignedRectangle>(&gb);
        if (!ra || !rb) return false;
        const auto rr = qsr::rectangle_algebra(*ra, *rb, ctx.eps_contact);
        if (qualifier == "x") return rr.x == *rel;
        if (qualifier == "y") return rr.y == *rel;
        return rr.x == *rel && rr.y == *rel;
      }
      case Family::orientation: {
        switch (*rel) {
          case Rel::left:
          case Rel::right:
          case Rel::front:
          case Rel::back:
          case Rel::on:
          case Rel::start:
          case Rel::end:
          case Rel::collinear: {
            const auto* s = std::get_if<geom::LineSegment>(&ga);
            if (!s) return false;
            const Rel got = qsr::lr(s->p1(), s->p2(), geom::centroid(gb), ctx);
            return *rel == Rel::collinear ? qsr::is_collinear(got) : got == *rel;
          }
          case Rel::same_direction:
          case Rel::opposite_direction: {
            auto oa = oriented_view(ga, a.facing);
            auto ob = oriented_view(gb, b.facing);
            if (!oa || !ob) return false;
            auto rs = qsr::direction_relation(oa->v(), ob->v(), ctx);
            return std::find(rs.begin(), rs.end(), *rel) != rs.end();
          }
          default: {
            auto oa = oriented_view(ga, a.facing);
            auto ob = oriented_view(gb, b.facing);
            if (!oa || !ob || oa->p() == ob->p()) return false;
            auto rs = qsr::orientation_relation(*oa, *ob, ctx);
            return std::find(rs.begin(), rs.end(), *rel) != rs.end();
          }
        }
      }
      case Family::distance:
        if (std::holds_alternative<geom::LineSegment>(ga) || std::holds_alternative<geom::LineSegment>(gb))
          return false;
        return qsr::qdc_distance(ga, gb, ctx) == *rel;
      case Family::size:
        return qsr::size_relation(ga, gb, ctx) == *rel;
      case Family::motion:
        return false;
    }
  } catch (const Error&) {
    return false;
  }
  return false;
}

}  // namespace stil::kernel
