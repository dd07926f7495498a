#pragma once

// Primitive spatial entities and the exact geometric predicates the
// qualifier and the constraint solver are built on.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "stil/error.hpp"

namespace stil::geom {

/// Default boundary band, in scene units.
inline constexpr double kDefaultEps = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Vector {
  double vx = 0.0;
  double vy = 0.0;
  friend bool operator==(const Vector&, const Vector&) = default;
};

inline Vector operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(const Point& p, const Vector& v) { return {p.x + v.vx, p.y + v.vy}; }
inline Point operator-(const Point& p, const Vector& v) { return {p.x - v.vx, p.y - v.vy}; }
inline Vector operator+(const Vector& a, const Vector& b) { return {a.vx + b.vx, a.vy + b.vy}; }
inline Vector operator*(double s, const Vector& v) { return {s * v.vx, s * v.vy}; }

/// Projection of a point (read as a position vector) onto v.
inline double dot(const Point& p, const Vector& v) { return p.x * v.vx + p.y * v.vy; }
inline double dot(const Vector& a, const Vector& b) { return a.vx * b.vx + a.vy * b.vy; }
inline double cross(const Vector& a, const Vector& b) { return a.vx * b.vy - a.vy * b.vx; }
inline double norm(const Vector& v) { return std::hypot(v.vx, v.vy); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }
/// Counter-clockwise perpendicular.
inline Vector perp(const Vector& v) { return {-v.vy, v.vx}; }

inline bool finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }
inline bool finite(const Vector& v) { return std::isfinite(v.vx) && std::isfinite(v.vy); }

/// Signed orientation of (a, b, c): > 0 counter-clockwise.
inline double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

class OrientedPoint {
 public:
  OrientedPoint(Point p, Vector v) : p_(p), v_(v) {
    if (!finite(p) || !finite(v)) throw Error("invalid-entity", "oriented point is not finite");
    if (norm(v) <= 0.0) throw Error("invalid-entity", "oriented point with zero vector");
  }
  const Point& p() const { return p_; }
  const Vector& v() const { return v_; }
  friend bool operator==(const OrientedPoint&, const OrientedPoint&) = default;

 private:
  Point p_;
  Vector v_;
};

class LineSegment {
 public:
  LineSegment(Point p1, Point p2) : p1_(p1), p2_(p2) {
    if (!finite(p1) || !finite(p2)) throw Error("invalid-entity", "segment is not finite");
    if (p1 == p2) throw Error("invalid-entity", "segment end points coincide");
  }
  const Point& p1() const { return p1_; }
  const Point& p2() const { return p2_; }
  Vector direction() const { return p2_ - p1_; }
  double length() const { return norm(direction()); }
  friend bool operator==(const LineSegment&, const LineSegment&) = default;

 private:
  Point p1_;
  Point p2_;
};

class AxisAlignedRectangle {
 public:
  AxisAlignedRectangle(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h))
      throw Error("invalid-entity", "rectangle is not finite");
    if (!(w > 0.0)) throw Error("invalid-entity", "rectangle requires 0 < w");
    if (!(h > 0.0)) throw Error("invalid-entity", "rectangle requires 0 < h");
  }
  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double x_max() const { return x_ + w_; }
  double y_max() const { return y_ + h_; }
  friend bool operator==(const AxisAlignedRectangle&, const AxisAlignedRectangle&) = default;

 private:
  double x_, y_, w_, h_;
};

/// Rectangle anchored at its bottom-left corner p with base direction v.
class Rectangle {
 public:
  Rectangle(Point p, Vector v, double w, double h) : p_(p), w_(w), h_(h) {
    if (!finite(p) || !finite(v) || !std::isfinite(w) || !std::isfinite(h))
      throw Error("invalid-entity", "rectangle is not finite");
    const double n = norm(v);
    if (!(n > 0.0)) throw Error("invalid-entity", "rectangle direction vector is zero");
    if (!(w > 0.0)) throw Error("invalid-entity", "rectangle requires 0 < w");
    if (!(h > 0.0)) throw Error("invalid-entity", "rectangle requires 0 < h");
    // vectors already of unit length are kept as given, so files round-trip
    v_ = std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? v : Vector{v.vx / n, v.vy / n};
  }
  explicit Rectangle(const AxisAlignedRectangle& r) : Rectangle({r.x(), r.y()}, {1.0, 0.0}, r.w(), r.h()) {}

  const Point& p() const { return p_; }
  /// Unit base direction.
  const Vector& v() const { return v_; }
  double w() const { return w_; }
  double h() const { return h_; }

  /// Corners in counter-clockwise order starting at p.
  std::array<Point, 4> corners() const {
    const Vector base = w_ * v_;
    const Vector up = h_ * perp(v_);
    return {p_, p_ + base, p_ + base + up, p_ + up};
  }
  friend bool operator==(const Rectangle&, const Rectangle&) = default;

 private:
  Point p_;
  Vector v_;
  double w_, h_;
};

class Circle {
 public:
  Circle(Point c, double r) : c_(c), r_(r) {
    if (!finite(c) || !std::isfinite(r)) throw Error("invalid-entity", "circle is not finite");
    if (!(r > 0.0)) throw Error("invalid-entity", "circle requires 0 < r");
  }
  const Point& c() const { return c_; }
  double r() const { return r_; }
  friend bool operator==(const Circle&, const Circle&) = default;

 private:
  Point c_;
  double r_;
};

// ---------------------------------------------------------------------------
// Segments and polygons

/// True iff q lies on the closed segment [a, b], given that a, b, q are collinear.
inline bool on_collinear_segment(const Point& a, const Point& b, const Point& q) {
  return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= q.y &&
         q.y <= std::max(a.y, b.y);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

/// Closed-segment intersection by orientation tests, with collinear overlap.
inline bool segments_intersect(const Point& a1, const Point& a2, const Point& b1, const Point& b2) {
  const int o1 = sign(orient(a1, a2, b1));
  const int o2 = sign(orient(a1, a2, b2));
  const int o3 = sign(orient(b1, b2, a1));
  const int o4 = sign(orient(b1, b2, a2));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_collinear_segment(a1, a2, b1)) return true;
  if (o2 == 0 && on_collinear_segment(a1, a2, b2)) return true;
  if (o3 == 0 && on_collinear_segment(b1, b2, a1)) return true;
  if (o4 == 0 && on_collinear_segment(b1, b2, a2)) return true;
  return false;
}

inline bool segments_intersect(const LineSegment& s1, const LineSegment& s2) {
  return segments_intersect(s1.p1(), s1.p2(), s2.p1(), s2.p2());
}

inline double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Vector ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

inline double segment_segment_distance(const Point& a1, const Point& a2, const Point& b1, const Point& b2) {
  if (segments_intersect(a1, a2, b1, b2)) return 0.0;
  return std::min({point_segment_distance(a1, b1, b2), point_segment_distance(a2, b1, b2),
                   point_segment_distance(b1, a1, a2), point_segment_distance(b2, a1, a2)});
}

/// Twice the signed area (shoelace); positive for counter-clockwise order.
inline double signed_area2(std::span<const Point> pts) {
  double s = 0.0;
  for (std::size_t i = 0, n = pts.size(); i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return s;
}

struct PolygonViolation {
  enum class Kind { too_few_vertices, non_finite, cw_orientation, self_intersection };
  Kind kind;
  /// Offending edge indices for self_intersection (edge i joins vertex i and i+1).
  std::size_t edge_i = 0;
  std::size_t edge_j = 0;

  std::string code() const {
    switch (kind) {
      case Kind::too_few_vertices: return "too-few-vertices";
      case Kind::non_finite: return "non-finite";
      case Kind::cw_orientation: return "cw-orientation";
      case Kind::self_intersection: return "self-intersection";
    }
    return "unknown";
  }
  std::string describe() const {
    if (kind == Kind::self_intersection)
      return code() + "(" + std::to_string(edge_i) + "," + std::to_string(edge_j) + ")";
    return code();
  }
};

/// Checks a vertex ring for simplicity and counter-clockwise order.
/// Self-intersection is tested before orientation, so a bow-tie (zero area)
/// reports the crossing edges. Collinear consecutive vertices are accepted.
inline std::optional<PolygonViolation> validate_polygon(std::span<const Point> pts) {
  using K = PolygonViolation::Kind;
  const std::size_t n = pts.size();
  if (n < 3) return PolygonViolation{K::too_few_vertices};
  for (const auto& p : pts)
    if (!finite(p)) return PolygonViolation{K::non_finite};
  auto vtx = [&](std::size_t i) -> const Point& { return pts[i % n]; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Point &a1 = vtx(i), &a2 = vtx(i + 1), &b1 = vtx(j), &b2 = vtx(j + 1);
      if (!adjacent) {
        if (segments_intersect(a1, a2, b1, b2)) return PolygonViolation{K::self_intersection, i, j};
        continue;
      }
      // Adjacent edges share one vertex; they may only meet there. A spike
      // (collinear fold-back) overlaps beyond the shared vertex.
      const Point& shared = (j == i + 1) ? a2 : a1;
      const Point& far_a = (j == i + 1) ? a1 : a2;
      const Point& far_b = (j == i + 1) ? b2 : b1;
      if (orient(far_a, shared, far_b) == 0.0) {
        const bool folds = dot(far_a - shared, far_b - shared) > 0.0;
        if (folds || far_a == shared || far_b == shared) return PolygonViolation{K::self_intersection, i, j};
      }
    }
  }
  if (!(signed_area2(pts) > 0.0)) return PolygonViolation{K::cw_orientation};
  return std::nullopt;
}

class SimplePolygon {
 public:
  explicit SimplePolygon(std::vector<Point> vertices) : v_(std::move(vertices)) {
    if (auto bad = validate_polygon(v_)) throw Error(bad->code(), bad->describe());
  }
  const std::vector<Point>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }
  friend bool operator==(const SimplePolygon&, const SimplePolygon&) = default;

 private:
  std::vector<Point> v_;
};

// ---------------------------------------------------------------------------
// Point location

enum class Location { interior, boundary, exterior };

inline const char* to_string(Location l) {
  switch (l) {
    case Location::interior: return "interior";
    case Location::boundary: return "boundary";
    case Location::exterior: return "exterior";
  }
  return "?";
}

/// Vector-projection membership: (p - r.p) is projected onto the base
/// direction and its perpendicular, then compared against [0,w] x [0,h].
inline Location point_in_rectangle(const Point& p, const Rectangle& r, double eps = kDefaultEps) {
  const Vector d = p - r.p();
  const double s = dot(d, r.v());
  const double t = dot(d, perp(r.v()));
  if (s < -eps || s > r.w() + eps || t < -eps || t > r.h() + eps) return Location::exterior;
  if (s > eps && s < r.w() - eps && t > eps && t < r.h() - eps) return Location::interior;
  return Location::boundary;
}

inline Location point_in_rectangle(const Point& p, const AxisAlignedRectangle& r, double eps = kDefaultEps) {
  return point_in_rectangle(p, Rectangle(r), eps);
}

inline Location point_in_circle(const Point& p, const Circle& c, double eps = kDefaultEps) {
  const double d = distance(p, c.c());
  if (d > c.r() + eps) return Location::exterior;
  if (d < c.r() - eps) return Location::interior;
  return Location::boundary;
}

/// Crossing-number test with an eps band around the boundary.
inline Location point_in_polygon(const Point& p, std::span<const Point> ring, double eps = kDefaultEps) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = ring[j];
    const Point& b = ring[i];
    if (point_segment_distance(p, a, b) <= eps) return Location::boundary;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside ? Location::interior : Location::exterior;
}

// ---------------------------------------------------------------------------
// Entities

using Entity =
    std::variant<Point, OrientedPoint, LineSegment, AxisAlignedRectangle, Rectangle, Circle, SimplePolygon>;

inline bool is_region(const Entity& e) {
  return std::holds_alternative<AxisAlignedRectangle>(e) || std::holds_alternative<Rectangle>(e) ||
         std::holds_alternative<Circle>(e) || std::holds_alternative<SimplePolygon>(e);
}

inline const char* kind_name(const Entity& e) {
  static constexpr const char* names[] = {"point", "oriented-point", "segment", "aarect",
                                          "rect",  "circle",         "polygon"};
  return names[e.index()];
}

/// Axis-aligned extent. Unlike AxisAlignedRectangle it may be degenerate.
struct Box {
  double x_min, y_min, x_max, y_max;
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

inline Box bounds_of(std::span<const Point> pts) {
  Box b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    b.x_min = std::min(b.x_min, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.x_max = std::max(b.x_max, p.x);
    b.y_max = std::max(b.y_max, p.y);
  }
  return b;
}

inline Point polygon_centroid(std::span<const Point> pts) {
  const double a2 = signed_area2(pts);
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, n = pts.size(); i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    const double w = a.x * b.y - b.x * a.y;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

inline Point centroid(const Entity& e) {
  struct V {
    Point operator()(const Point& p) const { return p; }
    Point operator()(const OrientedPoint& o) const { return o.p(); }
    Point operator()(const LineSegment& s) const {
      return {(s.p1().x + s.p2().x) / 2.0, (s.p1().y + s.p2().y) / 2.0};
    }
    Point operator()(const AxisAlignedRectangle& r) const { return {r.x() + r.w() / 2.0, r.y() + r.h() / 2.0}; }
    Point operator()(const Rectangle& r) const {
      return r.p() + (r.w() / 2.0) * r.v() + (r.h() / 2.0) * perp(r.v());
    }
    Point operator()(const Circle& c) const { return c.c(); }
    Point operator()(const SimplePolygon& p) const { return polygon_centroid(p.vertices()); }
  };
  return std::visit(V{}, e);
}

inline double area(const Entity& e) {
  struct V {
    double operator()(const Point&) const { return 0.0; }
    double operator()(const OrientedPoint&) const { return 0.0; }
    double operator()(const LineSegment&) const { return 0.0; }
    double operator()(const AxisAlignedRectangle& r) const { return r.w() * r.h(); }
    double operator()(const Rectangle& r) const { return r.w() * r.h(); }
    double operator()(const Circle& c) const { return std::numbers::pi * c.r() * c.r(); }
    double operator()(const SimplePolygon& p) const { return signed_area2(p.vertices()) / 2.0; }
  };
  return std::visit(V{}, e);
}

inline Box bbox(const Entity& e) {
  struct V {
    Box operator()(const Point& p) const { return {p.x, p.y, p.x, p.y}; }
    Box operator()(const OrientedPoint& o) const { return (*this)(o.p()); }
    Box operator()(const LineSegment& s) const {
      const std::array<Point, 2> pts{s.p1(), s.p2()};
      return bounds_of(pts);
    }
    Box operator()(const AxisAlignedRectangle& r) const { return {r.x(), r.y(), r.x_max(), r.y_max()}; }
    Box operator()(const Rectangle& r) const {
      const auto c = r.corners();
      return bounds_of(c);
    }
    Box operator()(const Circle& c) const {
      return {c.c().x - c.r(), c.c().y - c.r(), c.c().x + c.r(), c.c().y + c.r()};
    }
    Box operator()(const SimplePolygon& p) const { return bounds_of(p.vertices()); }
  };
  return std::visit(V{}, e);
}

/// Counter-clockwise vertex ring approximating a region. Circles become
/// regular n-gons inscribed in the circle.
inline std::vector<Point> to_ring(const Entity& e, int circle_segments = 64) {
  if (const auto* r = std::get_if<AxisAlignedRectangle>(&e))
    return {{r->x(), r->y()}, {r->x_max(), r->y()}, {r->x_max(), r->y_max()}, {r->x(), r->y_max()}};
  if (const auto* r = std::get_if<Rectangle>(&e)) {
    const auto c = r->corners();
    return {c.begin(), c.end()};
  }
  if (const auto* c = std::get_if<Circle>(&e)) {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(circle_segments));
    for (int k = 0; k < circle_segments; ++k) {
      const double a = 2.0 * std::numbers::pi * k / circle_segments;
      out.push_back({c->c().x + c->r() * std::cos(a), c->c().y + c->r() * std::sin(a)});
    }
    return out;
  }
  if (const auto* p = std::get_if<SimplePolygon>(&e)) return p->vertices();
  throw Error("unsupported-entity", std::string(kind_name(e)) + " has no region extent");
}

/// Point location against any region entity.
inline Location locate(const Point& p, const Entity& region, double eps = kDefaultEps) {
  if (const auto* r = std::get_if<AxisAlignedRectangle>(&region)) return point_in_rectangle(p, *r, eps);
  if (const auto* r = std::get_if<Rectangle>(&region)) return point_in_rectangle(p, *r, eps);
  if (const auto* c = std::get_if<Circle>(&region)) return point_in_circle(p, *c, eps);
  if (const auto* g = std::get_if<SimplePolygon>(&region)) return point_in_polygon(p, g->vertices(), eps);
  throw Error("unsupported-entity", std::string("point location in ") + kind_name(region));
}

}  // namespace stil::geom
