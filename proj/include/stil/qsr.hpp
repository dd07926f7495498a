#pragma once

// Qualification: quantitative entities -> qualitative relations.

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "stil/geom.hpp"
#include "stil/model.hpp"
#include "stil/relations.hpp"

namespace stil::qsr {

/// Thresholds used by every qualifier. Distance thresholds are absolute
/// scene units; use for_scene() to derive them from the frame diagonal.
struct QualificationContext {
  double eps_contact = geom::kDefaultEps;
  double adjacent_threshold = 0.01;
  double near_threshold = 0.2;
  double size_ratio_tol = 0.15;
  double angle_tol = std::numbers::pi / 8.0;
  int circle_segments = 64;
  double eps_motion = 0.005;
  int motion_window = 5;
  /// Scene width, used by derived background predicates (equidistance).
  double scene_width = 1.0;

  void check() const {
    if (eps_contact < 0 || adjacent_threshold < 0 || near_threshold < 0 || angle_tol < 0 || eps_motion < 0)
      throw Error("invalid-context", "thresholds must be non-negative");
    if (!(size_ratio_tol > 0.0 && size_ratio_tol < 1.0)) throw Error("invalid-context", "size-ratio-tol must be in (0,1)");
    if (circle_segments < 8) throw Error("invalid-context", "circle approximation needs >= 8 segments");
  }
};

/// Scene-relative factors; resolved against a frame into a context.
struct ContextFactors {
  double eps_contact = geom::kDefaultEps;
  double adjacent = 0.01;
  double near = 0.2;
  double size_ratio_tol = 0.15;
  double angle_tol = std::numbers::pi / 8.0;
  int circle_segments = 64;
  double motion = 0.005;
  int motion_window = 5;

  QualificationContext resolve(double width, double height) const {
    const double d = std::hypot(width, height);
    QualificationContext c;
    c.eps_contact = eps_contact;
    c.adjacent_threshold = adjacent * d;
    c.near_threshold = near * d;
    c.size_ratio_tol = size_ratio_tol;
    c.angle_tol = angle_tol;
    c.circle_segments = circle_segments;
    c.eps_motion = motion * d;
    c.motion_window = motion_window;
    c.scene_width = width;
    c.check();
    return c;
  }
};

inline QualificationContext for_scene(double width, double height) { return ContextFactors{}.resolve(width, height); }

// ---------------------------------------------------------------------------
// Mereotopology

namespace detail {

inline Rel rcc8_circles(const geom::Circle& a, const geom::Circle& b, double eps) {
  const double d = geom::distance(a.c(), b.c());
  const double ra = a.r(), rb = b.r();
  if (d > ra + rb + eps) return Rel::dc;
  if (d >= ra + rb - eps) return Rel::ec;
  if (d <= eps && std::abs(ra - rb) <= eps) return Rel::eq;
  if (ra < rb) {
    if (d + ra < rb - eps) return Rel::ntpp;
    if (d + ra <= rb + eps) return Rel::tpp;
  } else {
    if (d + rb < ra - eps) return Rel::ntppi;
    if (d + rb <= ra + eps) return Rel::tppi;
  }
  return Rel::po;
}

inline Rel rcc8_boxes(const geom::AxisAlignedRectangle& a, const geom::AxisAlignedRectangle& b, double eps) {
  const double gx = std::max(b.x() - a.x_max(), a.x() - b.x_max());
  const double gy = std::max(b.y() - a.y_max(), a.y() - b.y_max());
  if (gx > eps || gy > eps) return Rel::dc;
  if (gx >= -eps || gy >= -eps) return Rel::ec;
  auto near = [eps](double u, double v) { return std::abs(u - v) <= eps; };
  const bool a_in_b = a.x() >= b.x() - eps && a.x_max() <= b.x_max() + eps && a.y() >= b.y() - eps &&
                      a.y_max() <= b.y_max() + eps;
  const bool b_in_a = b.x() >= a.x() - eps && b.x_max() <= a.x_max() + eps && b.y() >= a.y() - eps &&
                      b.y_max() <= a.y_max() + eps;
  const bool touching = near(a.x(), b.x()) || near(a.x_max(), b.x_max()) || near(a.y(), b.y()) ||
                        near(a.y_max(), b.y_max());
  if (a_in_b && b_in_a) return Rel::eq;
  if (a_in_b) return touching ? Rel::tpp : Rel::ntpp;
  if (b_in_a) return touching ? Rel::tppi : Rel::ntppi;
  return Rel::po;
}

struct BoundaryProfile {
  bool inside = false;
  bool outside = false;
};

/// Locates the boundary of `ring` against `other`. Each edge is split at its
/// crossings with the other boundary so every sub-segment lies wholly inside,
/// outside or on `other`; one sample per piece is enough.
inline BoundaryProfile profile(const std::vector<geom::Point>& ring, const std::vector<geom::Point>& other,
                               double eps) {
  BoundaryProfile pr;
  auto note = [&](const geom::Point& q) {
    switch (geom::point_in_polygon(q, other, eps)) {
      case geom::Location::interior: pr.inside = true; break;
      case geom::Location::exterior: pr.outside = true; break;
      case geom::Location::boundary: break;
    }
  };
  const std::size_t n = ring.size(), m = other.size();
  std::vector<double> ts;
  for (std::size_t i = 0; i < n; ++i) {
    const geom::Point& a = ring[i];
    const geom::Point& b = ring[(i + 1) % n];
    const geom::Vector ab = b - a;
    const double len2 = geom::dot(ab, ab);
    ts.assign({0.0, 1.0});
    for (std::size_t j = 0; j < m; ++j) {
      const geom::Point& c = other[j];
      const geom::Point& d = other[(j + 1) % m];
      const geom::Vector cd = d - c;
      const double den = geom::cross(ab, cd);
      if (den != 0.0) {
        const double t = geom::cross(c - a, cd) / den;
        const double u = geom::cross(c - a, ab) / den;
        if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) ts.push_back(t);
      } else {
        // Parallel: project the other edge's end points when (nearly) collinear.
        for (const auto& q : {c, d}) {
          const double t = geom::dot(q - a, ab) / len2;
          if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
      }
      // Contact points closer than eps also split the edge.
      for (const auto& q : {c, d}) {
        const double t = geom::dot(q - a, ab) / len2;
        if (t > 0.0 && t < 1.0 && geom::point_segment_distance(q, a, b) <= eps) ts.push_back(t);
      }
    }
    std::sort(ts.begin(), ts.end());
    note(a);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if (ts[k + 1] - ts[k] <= 0.0) continue;
      note(a + ((ts[k] + ts[k + 1]) / 2.0) * ab);
    }
    if (pr.inside && pr.outside) break;
  }
  return pr;
}

inline double ring_distance(const std::vector<geom::Point>& a, const std::vector<geom::Point>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      best = std::min(best, geom::segment_segment_distance(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]));
  return best;
}

}  // namespace detail

/// RCC-8 over polygonal boundaries with an eps contact band.
inline Rel rcc8_rings(const std::vector<geom::Point>& a, const std::vector<geom::Point>& b, double eps) {
  if (detail::ring_distance(a, b) > eps) {
    if (geom::point_in_polygon(a.front(), b, eps) == geom::Location::interior) return Rel::ntpp;
    if (geom::point_in_polygon(b.front(), a, eps) == geom::Location::interior) return Rel::ntppi;
    return Rel::dc;
  }
  const auto pa = detail::profile(a, b, eps);
  const auto pb = detail::profile(b, a, eps);
  if (!pa.outside && !pb.outside) return Rel::eq;
  if (!pa.outside) return Rel::tpp;
  if (!pb.outside) return Rel::tppi;
  if (pa.inside || pb.inside) return Rel::po;
  return Rel::ec;
}

/// Exactly one RCC-8 base relation between two regions. Same-kind circle and
/// axis-aligned pairs use closed-form tests; every other combination goes
/// through polygonal boundaries (circles as ctx.circle_segments-gons).
inline Rel rcc8(const geom::Entity& a, const geom::Entity& b, const QualificationContext& ctx = {}) {
  if (!geom::is_region(a) || !geom::is_region(b))
    throw Error("unsupported-entity-pair", std::string(geom::kind_name(a)) + "/" + geom::kind_name(b));
  const double eps = ctx.eps_contact;
  if (const auto* ca = std::get_if<geom::Circle>(&a))
    if (const auto* cb = std::get_if<geom::Circle>(&b)) return detail::rcc8_circles(*ca, *cb, eps);
  if (const auto* ra = std::get_if<geom::AxisAlignedRectangle>(&a))
    if (const auto* rb = std::get_if<geom::AxisAlignedRectangle>(&b)) return detail::rcc8_boxes(*ra, *rb, eps);
  return rcc8_rings(geom::to_ring(a, ctx.circle_segments), geom::to_ring(b, ctx.circle_segments), eps);
}

inline Rel rcc5_coarsen(Rel r8) {
  switch (r8) {
    case Rel::dc:
    case Rel::ec: return Rel::dr;
    case Rel::tpp:
    case Rel::ntpp: return Rel::pp;
    case Rel::tppi:
    case Rel::ntppi: return Rel::ppi;
    case Rel::po: return Rel::po;
    case Rel::eq: return Rel::eq;
    default: throw Error("not-rcc8", std::string(to_string(r8)));
  }
}

/// RCC-8 members of a coarse symbol (RCC-5 base or union).
inline std::vector<Rel> rcc8_members(Rel coarse) {
  switch (coarse) {
    case Rel::dr: return {Rel::dc, Rel::ec};
    case Rel::pp: return {Rel::tpp, Rel::ntpp};
    case Rel::ppi: return {Rel::tppi, Rel::ntppi};
    case Rel::p: return {Rel::tpp, Rel::ntpp, Rel::eq};
    case Rel::o: return {Rel::po, Rel::tpp, Rel::ntpp, Rel::tppi, Rel::ntppi, Rel::eq};
    case Rel::c: return {Rel::ec, Rel::po, Rel::tpp, Rel::ntpp, Rel::tppi, Rel::ntppi, Rel::eq};
    default:
      if (is_rcc8(coarse)) return {coarse};
      throw Error("not-mereotopology", std::string(to_string(coarse)));
  }
}

/// Whether the RCC-8 base relation r8 belongs to symbol s (base, RCC-5 or union).
inline bool satisfies(Rel r8, Rel s) {
  const auto m = rcc8_members(s);
  return std::find(m.begin(), m.end(), r8) != m.end();
}

// ---------------------------------------------------------------------------
// Intervals

struct Interval {
  double lo;
  double hi;
};

inline Rel interval_relation(Interval a, Interval b, double eps = geom::kDefaultEps) {
  if (!(a.lo < a.hi) || !(b.lo < b.hi)) throw Error("invalid-interval", "interval requires lo < hi");
  auto same = [eps](double u, double v) { return std::abs(u - v) <= eps; };
  if (same(a.lo, b.lo) && same(a.hi, b.hi)) return Rel::equals;
  if (same(a.hi, b.lo)) return Rel::meets;
  if (same(b.hi, a.lo)) return Rel::met_by;
  if (a.hi < b.lo) return Rel::precedes;
  if (b.hi < a.lo) return Rel::preceded_by;
  if (same(a.lo, b.lo)) return a.hi < b.hi ? Rel::starts : Rel::started_by;
  if (same(a.hi, b.hi)) return a.lo > b.lo ? Rel::finishes : Rel::finished_by;
  if (a.lo < b.lo) return a.hi < b.hi ? Rel::overlaps : Rel::contains;
  return a.hi < b.hi ? Rel::during : Rel::overlapped_by;
}

struct RectangleRelation {
  Rel x;
  Rel y;
  friend bool operator==(const RectangleRelation&, const RectangleRelation&) = default;
};

inline RectangleRelation rectangle_algebra(const geom::AxisAlignedRectangle& a, const geom::AxisAlignedRectangle& b,
                                           double eps = geom::kDefaultEps) {
  return {interval_relation({a.x(), a.x_max()}, {b.x(), b.x_max()}, eps),
          interval_relation({a.y(), a.y_max()}, {b.y(), b.y_max()}, eps)};
}

// ---------------------------------------------------------------------------
// Orientation

/// LR position of `ref` relative to the directed line origin -> dest.
inline Rel lr(const geom::Point& origin, const geom::Point& dest, const geom::Point& ref,
              const QualificationContext& ctx = {}) {
  if (origin == dest) throw Error("degenerate-axis", "origin equals dest");
  const geom::Vector axis = dest - origin;
  const double len = geom::norm(axis);
  const double side = geom::cross(axis, ref - origin) / len;
  if (side > ctx.eps_contact) return Rel::left;
  if (side < -ctx.eps_contact) return Rel::right;
  const double t = geom::dot(ref - origin, axis) / (len * len);
  const double t_eps = ctx.eps_contact / len;
  if (std::abs(t) <= t_eps) return Rel::start;
  if (std::abs(t - 1.0) <= t_eps) return Rel::end;
  if (t < 0.0) return Rel::back;
  if (t > 1.0) return Rel::front;
  return Rel::on;
}

inline bool is_collinear(Rel r) {
  return r == Rel::front || r == Rel::back || r == Rel::on || r == Rel::start || r == Rel::end;
}

inline double angle_between(const geom::Vector& u, const geom::Vector& v) {
  const double c = geom::dot(u, v) / (geom::norm(u) * geom::norm(v));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Direction-pair relations only (no positional component).
inline std::vector<Rel> direction_relation(const geom::Vector& a, const geom::Vector& b,
                                           const QualificationContext& ctx = {}) {
  const double ang = angle_between(a, b);
  std::vector<Rel> out;
  if (ang <= ctx.angle_tol) out.push_back(Rel::same_direction);
  if (ang >= std::numbers::pi - ctx.angle_tol) out.push_back(Rel::opposite_direction);
  return out;
}

/// Coarse OPRA relations; facing relations are directional (a faces b).
inline std::vector<Rel> orientation_relation(const geom::OrientedPoint& a, const geom::OrientedPoint& b,
                                             const QualificationContext& ctx = {}) {
  if (a.p() == b.p()) throw Error("coincident-points", "facing relations need distinct positions");
  std::vector<Rel> out;
  const double bearing = angle_between(a.v(), b.p() - a.p());
  if (bearing <= ctx.angle_tol) out.push_back(Rel::facing_towards);
  if (bearing >= std::numbers::pi - ctx.angle_tol) out.push_back(Rel::facing_away);
  for (Rel r : direction_relation(a.v(), b.v(), ctx)) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Distance and size

namespace detail {
inline std::vector<geom::Point> outline(const geom::Entity& e, int circle_segments) {
  if (const auto* p = std::get_if<geom::Point>(&e)) return {*p};
  if (const auto* o = std::get_if<geom::OrientedPoint>(&e)) return {o->p()};
  if (const auto* s = std::get_if<geom::LineSegment>(&e)) return {s->p1(), s->p2()};
  return geom::to_ring(e, circle_segments);
}

inline double outline_distance(const std::vector<geom::Point>& a, const std::vector<geom::Point>& b) {
  auto seg = [](const std::vector<geom::Point>& r, std::size_t i) {
    return std::pair{r[i], r[(i + 1) % r.size()]};
  };
  double best = std::numeric_limits<double>::infinity();
  const std::size_t na = a.size() == 2 ? 1 : a.size();
  const std::size_t nb = b.size() == 2 ? 1 : b.size();
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      auto [a1, a2] = seg(a, i);
      auto [b1, b2] = seg(b, j);
      best = std::min(best, geom::segment_segment_distance(a1, a2, b1, b2));
    }
  return best;
}
}  // namespace detail

/// Distance between closures; 0 when they intersect or one contains the other.
inline double boundary_gap(const geom::Entity& a, const geom::Entity& b, const QualificationContext& ctx = {}) {
  if (const auto* ca = std::get_if<geom::Circle>(&a))
    if (const auto* cb = std::get_if<geom::Circle>(&b))
      return std::max(0.0, geom::distance(ca->c(), cb->c()) - ca->r() - cb->r());
  if (const auto* ra = std::get_if<geom::AxisAlignedRectangle>(&a))
    if (const auto* rb = std::get_if<geom::AxisAlignedRectangle>(&b)) {
      const double gx = std::max({0.0, rb->x() - ra->x_max(), ra->x() - rb->x_max()});
      const double gy = std::max({0.0, rb->y() - ra->y_max(), ra->y() - rb->y_max()});
      return std::hypot(gx, gy);
    }
  const auto oa = detail::outline(a, ctx.circle_segments);
  const auto ob = detail::outline(b, ctx.circle_segments);
  if (geom::is_region(b) && geom::locate(oa.front(), b, 0.0) != geom::Location::exterior) return 0.0;
  if (geom::is_region(a) && geom::locate(ob.front(), a, 0.0) != geom::Location::exterior) return 0.0;
  return detail::outline_distance(oa, ob);
}

inline Rel qdc_distance(const geom::Entity& a, const geom::Entity& b, const QualificationContext& ctx = {}) {
  const double g = boundary_gap(a, b, ctx);
  if (g <= ctx.adjacent_threshold) return Rel::adjacent;
  if (g <= ctx.near_threshold) return Rel::near;
  return Rel::far;
}

inline Rel size_relation(double area_a, double area_b, const QualificationContext& ctx = {}) {
  if (area_a <= 0.0 && area_b <= 0.0) throw Error("zero-area", "both entities have zero area");
  const double rel = std::abs(area_a - area_b) / std::max(area_a, area_b);
  if (rel <= ctx.size_ratio_tol) return Rel::equi_sized;
  return area_a < area_b ? Rel::smaller : Rel::larger;
}

inline Rel size_relation(const geom::Entity& a, const geom::Entity& b, const QualificationContext& ctx = {}) {
  return size_relation(geom::area(a), geom::area(b), ctx);
}

// ---------------------------------------------------------------------------
// Scenes

struct Diagnostic {
  std::string a;
  std::string b;
  Family family;
  std::string code;
};

struct QualifyResult {
  std::vector<RelationTuple> tuples;
  std::vector<Diagnostic> diagnostics;
};

/// Relations of `family` between two placed entities; set-valued families
/// may yield several symbols, inapplicable pairs yield an error.
inline std::vector<RelationTuple> qualify_pair(const std::string& ida, const geom::Entity& a,
                                               const std::optional<geom::Vector>& fa, const std::string& idb,
                                               const geom::Entity& b, const std::optional<geom::Vector>& fb,
                                               Family family, const QualificationContext& ctx) {
  std::vector<RelationTuple> out;
  auto emit = [&](Rel r, std::string qualifier = {}) {
    out.push_back(RelationTuple{r, {ida, idb}, std::nullopt, std::move(qualifier)});
  };
  switch (family) {
    case Family::mereotopology:
      emit(rcc8(a, b, ctx));
      break;
    case Family::interval: {
      const auto* ra = std::get_if<geom::AxisAlignedRectangle>(&a);
      const auto* rb = std::get_if<geom::AxisAlignedRectangle>(&b);
      if (!ra || !rb) throw Error("unsupported-entity-pair", "rectangle algebra needs axis-aligned rectangles");
      const auto rr = rectangle_algebra(*ra, *rb, ctx.eps_contact);
      emit(rr.x, "x");
      emit(rr.y, "y");
      break;
    }
    case Family::orientation: {
      bool any = false;
      if (const auto* s = std::get_if<geom::LineSegment>(&a)) {
        emit(lr(s->p1(), s->p2(), geom::centroid(b), ctx));
        any = true;
      }
      auto oa = oriented_view(a, fa);
      auto ob = oriented_view(b, fb);
      if (oa && ob) {
        for (Rel r : orientation_relation(*oa, *ob, ctx)) emit(r);
        any = true;
      }
      if (!any) throw Error("unsupported-entity-pair", "no orientation relation for this pair");
      break;
    }
    case Family::distance:
      if (std::holds_alternative<geom::LineSegment>(a) || std::holds_alternative<geom::LineSegment>(b))
        throw Error("unsupported-entity-pair", "distance needs bounded entities");
      emit(qdc_distance(a, b, ctx));
      break;
    case Family::size:
      emit(size_relation(a, b, ctx));
      break;
    case Family::motion:
      throw Error("unsupported-entity-pair", "motion relations need tracks");
  }
  return out;
}

/// All requested relations over ordered pairs of distinct objects.
/// Inapplicable pairs are skipped and reported as diagnostics.
inline QualifyResult qualify_scene(const Scene& scene, const std::set<Family>& families,
                                   const QualificationContext& ctx) {
  QualifyResult res;
  for (const auto& a : scene.objects) {
    for (const auto& b : scene.objects) {
      if (&a == &b) continue;
      for (Family f : families) {
        try {
          auto ts = qualify_pair(a.id, a.geometry, a.facing, b.id, b.geometry, b.facing, f, ctx);
          for (auto& t : ts) {
            t.time = scene.timestamp;
            res.tuples.push_back(std::move(t));
          }
        } catch (const Error& e) {
          res.diagnostics.push_back({a.id, b.id, f, e.code()});
        }
      }
    }
  }
  return res;
}

}  // namespace stil::qsr
