#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stil/geom.hpp"

using namespace stil;
using namespace stil::geom;

TEST(Geom, Dot) {
  EXPECT_DOUBLE_EQ(dot(Point{0, 0}, Vector{3, 4}), 0.0);
  EXPECT_DOUBLE_EQ(dot(Point{1, 2}, Vector{3, 4}), 11.0);
  EXPECT_DOUBLE_EQ(dot(Point{-2.5, 7}, Vector{0.5, -1}), -2.5 * 0.5 + 7 * -1);
}

TEST(Geom, DotSymmetricBilinear) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    Vector a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    EXPECT_EQ(dot(a, b), dot(b, a));
    const double lhs = dot(a + c, b);
    const double rhs = dot(a, b) + dot(c, b);
    const double scale = std::max({1.0, std::abs(dot(a, b)), std::abs(dot(c, b))});
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale);
  }
}

TEST(Geom, PointInRectangle) {
  EXPECT_EQ(point_in_rectangle({1, 1}, AxisAlignedRectangle(0, 0, 2, 2), 0.0), Location::interior);
  EXPECT_EQ(point_in_rectangle({0, 0}, AxisAlignedRectangle(0, 0, 2, 2), 1e-9), Location::boundary);
  EXPECT_EQ(point_in_rectangle({3, 1}, AxisAlignedRectangle(0, 0, 2, 2), 1e-9), Location::exterior);
  const double s = 1.0 / std::sqrt(2.0);
  Rectangle rot({0, 0}, {s, s}, 2, 2);
  // (1,1) sits on the base edge of this square: perpendicular projection 0
  EXPECT_EQ(point_in_rectangle({1, 1}, rot, 0.0), Location::boundary);
  EXPECT_EQ(point_in_rectangle({0, 1.4}, rot, 0.0), Location::interior);
  EXPECT_EQ(point_in_rectangle({1, 0.5}, rot, 0.0), Location::exterior);
}

// Rotated square membership against a raster of its half-plane description.
TEST(Geom, RotatedRectangleRasterOracle) {
  const double s = 1.0 / std::sqrt(2.0);
  Rectangle rot({0, 0}, {s, s}, 2, 2);
  auto inside = [&](double x, double y) {
    // local coordinates by explicit rotation by -45 degrees
    const double u = (x + y) * s, v = (y - x) * s;
    return u > 0 && u < 2 && v > 0 && v < 2;
  };
  int checked = 0;
  for (double x = -2; x <= 2; x += 1e-2)
    for (double y = -0.5; y <= 3; y += 1e-2) {
      const auto loc = point_in_rectangle({x, y}, rot, 1e-9);
      if (loc == Location::boundary) continue;
      ASSERT_EQ(loc == Location::interior, inside(x, y)) << x << "," << y;
      ++checked;
    }
  EXPECT_GT(checked, 100000);
}

TEST(Geom, AARectMatchesCoordinateComparison) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10), wd(0.1, 5);
  int n = 0;
  while (n < 10000) {
    AxisAlignedRectangle r(u(rng), u(rng), wd(rng), wd(rng));
    Point p{u(rng), u(rng)};
    const double clearance = std::min({std::abs(p.x - r.x()), std::abs(p.x - r.x_max()), std::abs(p.y - r.y()),
                                       std::abs(p.y - r.y_max())});
    if (clearance <= 1e-9) continue;
    const bool direct = r.x() < p.x && p.x < r.x_max() && r.y() < p.y && p.y < r.y_max();
    ASSERT_EQ(point_in_rectangle(p, r, 0.0) == Location::interior, direct);
    ++n;
  }
}

TEST(Geom, SegmentsIntersect) {
  EXPECT_TRUE(segments_intersect(LineSegment({0, 0}, {2, 2}), LineSegment({0, 2}, {2, 0})));
  EXPECT_FALSE(segments_intersect(LineSegment({0, 0}, {1, 0}), LineSegment({2, 0}, {3, 0})));
  EXPECT_TRUE(segments_intersect(LineSegment({0, 0}, {2, 0}), LineSegment({1, 0}, {3, 0})));
  EXPECT_TRUE(segments_intersect(LineSegment({0, 0}, {1, 0}), LineSegment({1, 0}, {1, 5})));
}

// Dense sampling along both segments; a shared sample point means overlap.
TEST(Geom, CollinearOverlapSampleOracle) {
  auto sampled_overlap = [](double a0, double a1, double b0, double b1) {
    for (int i = 0; i <= 1000; ++i) {
      const double x = a0 + (a1 - a0) * i / 1000.0;
      if (x >= std::min(b0, b1) && x <= std::max(b0, b1)) return true;
    }
    return false;
  };
  const double cases[][4] = {{0, 2, 1, 3}, {0, 1, 2, 3}, {0, 4, 1, 2}, {3, 1, 0, 2}, {0, 1, 1.5, 1.6}};
  for (const auto& c : cases)
    EXPECT_EQ(segments_intersect(LineSegment({c[0], 0}, {c[1], 0}), LineSegment({c[2], 0}, {c[3], 0})),
              sampled_overlap(c[0], c[1], c[2], c[3]));
}

TEST(Geom, SegmentsIntersectSymmetric) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 4);  // small grid gives many touching and collinear cases
  for (int i = 0; i < 5000; ++i) {
    Point a{double(u(rng)), double(u(rng))}, b{double(u(rng)), double(u(rng))};
    Point c{double(u(rng)), double(u(rng))}, d{double(u(rng)), double(u(rng))};
    if (a == b || c == d) continue;
    EXPECT_EQ(segments_intersect(a, b, c, d), segments_intersect(c, d, a, b));
    EXPECT_EQ(segments_intersect(a, b, c, d), segments_intersect(b, a, d, c));
  }
}

TEST(Geom, PolygonValidate) {
  std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_FALSE(validate_polygon(sq));
  std::vector<Point> cw(sq.rbegin(), sq.rend());
  auto v = validate_polygon(cw);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->code(), "cw-orientation");
  std::vector<Point> bow{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  v = validate_polygon(bow);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->code(), "self-intersection");
  EXPECT_THROW(SimplePolygon{cw}, Error);
  std::vector<Point> two{{0, 0}, {1, 0}};
  EXPECT_EQ(validate_polygon(two)->code(), "too-few-vertices");
}

// Exhaustive edge-pair oracle for the bow-tie: edges 0 and 2 cross.
TEST(Geom, BowTieCrossingEdges) {
  std::vector<Point> bow{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  std::vector<std::pair<std::size_t, std::size_t>> crossing;
  const std::size_t n = bow.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(bow[i], bow[(i + 1) % n], bow[j], bow[(j + 1) % n])) crossing.emplace_back(i, j);
    }
  ASSERT_EQ(crossing.size(), 1u);
  auto v = validate_polygon(bow);
  EXPECT_EQ(v->describe(), "self-intersection(" + std::to_string(crossing[0].first) + "," +
                               std::to_string(crossing[0].second) + ")");
}

TEST(Geom, RandomConvexPolygons) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> cnt(3, 12);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> a(cnt(rng));
    for (auto& x : a) x = ang(rng);
    std::sort(a.begin(), a.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end()) continue;
    std::vector<Point> pts;
    for (double t : a) pts.push_back({5 + 3 * std::cos(t), 5 + 3 * std::sin(t)});
    if (std::abs(signed_area2(pts)) < 1e-9) continue;
    EXPECT_FALSE(validate_polygon(pts)) << k;
    std::reverse(pts.begin(), pts.end());
    auto v = validate_polygon(pts);
    ASSERT_TRUE(v);
    EXPECT_EQ(v->code(), "cw-orientation");
  }
}

TEST(Geom, CollinearVerticesAccepted) {
  std::vector<Point> pts{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}};
  EXPECT_FALSE(validate_polygon(pts));
}

TEST(Geom, CentroidAreaBbox) {
  const auto c = centroid(Entity{AxisAlignedRectangle(0, 0, 2, 4)});
  EXPECT_DOUBLE_EQ(c.x, 1);
  EXPECT_DOUBLE_EQ(c.y, 2);
  EXPECT_DOUBLE_EQ(area(Entity{Circle({3, 3}, 2)}), 4 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(area(Entity{SimplePolygon({{0, 0}, {1, 0}, {0, 1}})}), 0.5);
  EXPECT_DOUBLE_EQ(area(Entity{Point{1, 1}}), 0.0);
  const auto b = bbox(Entity{Circle({1, 2}, 1)});
  EXPECT_DOUBLE_EQ(b.x_min, 0);
  EXPECT_DOUBLE_EQ(b.y_max, 3);
  const auto tc = centroid(Entity{SimplePolygon({{0, 0}, {3, 0}, {0, 3}})});
  EXPECT_NEAR(tc.x, 1, 1e-12);
  EXPECT_NEAR(tc.y, 1, 1e-12);
}

TEST(Geom, ConstructionErrors) {
  EXPECT_THROW(AxisAlignedRectangle(0, 0, 0, 1), Error);
  EXPECT_THROW(Rectangle({0, 0}, {0, 0}, 1, 1), Error);
  EXPECT_THROW(Circle({0, 0}, 0), Error);
  EXPECT_THROW(LineSegment({1, 1}, {1, 1}), Error);
  EXPECT_THROW(OrientedPoint({0, 0}, {0, 0}), Error);
  Rectangle r({0, 0}, {3, 4}, 1, 1);
  EXPECT_DOUBLE_EQ(r.v().vx, 0.6);
  EXPECT_DOUBLE_EQ(r.v().vy, 0.8);
}

TEST(Geom, PointLocation) {
  EXPECT_EQ(point_in_circle({0, 0}, Circle({0, 0}, 1)), Location::interior);
  EXPECT_EQ(point_in_circle({1, 0}, Circle({0, 0}, 1)), Location::boundary);
  EXPECT_EQ(point_in_circle({2, 0}, Circle({0, 0}, 1)), Location::exterior);
  std::vector<Point> tri{{0, 0}, {4, 0}, {0, 4}};
  EXPECT_EQ(point_in_polygon({1, 1}, tri), Location::interior);
  EXPECT_EQ(point_in_polygon({2, 2}, tri), Location::boundary);
  EXPECT_EQ(point_in_polygon({3, 3}, tri), Location::exterior);
}

TEST(Geom, Distances) {
  EXPECT_DOUBLE_EQ(point_segment_distance({0, 1}, {-1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(point_segment_distance({3, 4}, {0, 0}, {0, 0}), 5.0);
  EXPECT_DOUBLE_EQ(segment_segment_distance({0, 0}, {1, 0}, {0, 2}, {1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(segment_segment_distance({0, 0}, {2, 2}, {0, 2}, {2, 0}), 0.0);
}
