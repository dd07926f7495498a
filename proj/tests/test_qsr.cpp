#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "oracles.hpp"
#include "stil/data/generators.hpp"
#include "stil/qsr.hpp"

using namespace stil;
using namespace stil::geom;
using namespace stil::qsr;

namespace {

bool has(const std::vector<Rel>& v, Rel r) { return std::find(v.begin(), v.end(), r) != v.end(); }

SceneObject box(const std::string& id, double x, double y, double w, double h) {
  return {id, ObjectKind::person, AxisAlignedRectangle(x, y, w, h), std::nullopt};
}

}  // namespace

TEST(Rcc8, Examples) {
  EXPECT_EQ(rcc8(AxisAlignedRectangle(1, 1, 1, 1), AxisAlignedRectangle(0, 0, 4, 4)), Rel::ntpp);
  EXPECT_EQ(rcc8(Circle({2, 2}, 1.5), Circle({2, 2}, 1.5)), Rel::eq);
  EXPECT_EQ(rcc8(Circle({0, 0}, 1), Circle({3, 0}, 1)), Rel::dc);
  EXPECT_EQ(rcc8(Circle({0, 0}, 1), Circle({2, 0}, 1)), Rel::ec);
  EXPECT_EQ(rcc8(AxisAlignedRectangle(0, 0, 2, 2), AxisAlignedRectangle(0, 0, 4, 4)), Rel::tpp);
  EXPECT_EQ(rcc8(AxisAlignedRectangle(0, 0, 4, 4), AxisAlignedRectangle(1, 1, 4, 4)), Rel::po);
  EXPECT_EQ(rcc8(AxisAlignedRectangle(0, 0, 4, 4), AxisAlignedRectangle(1, 1, 1, 1)), Rel::ntppi);
}

TEST(Rcc8, MixedKinds) {
  const Entity sq = SimplePolygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  EXPECT_EQ(rcc8(Circle({5, 5}, 1), sq), Rel::ntpp);
  EXPECT_EQ(rcc8(sq, Circle({5, 5}, 1)), Rel::ntppi);
  EXPECT_EQ(rcc8(Circle({20, 5}, 1), sq), Rel::dc);
  EXPECT_EQ(rcc8(AxisAlignedRectangle(10, 0, 5, 5), sq), Rel::ec);
  EXPECT_EQ(rcc8(Rectangle({5, 5}, {1, 1}, 2, 2), sq), Rel::ntpp);
}

TEST(Rcc8, UnsupportedPair) {
  try {
    (void)rcc8(Point{0, 0}, AxisAlignedRectangle(0, 0, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unsupported-entity-pair");
  }
}

TEST(Rcc8, Coarsening) {
  EXPECT_EQ(rcc5_coarsen(Rel::ntpp), Rel::pp);
  EXPECT_EQ(rcc5_coarsen(Rel::eq), Rel::eq);
  EXPECT_EQ(rcc5_coarsen(Rel::ec), Rel::dr);
  EXPECT_TRUE(satisfies(Rel::ec, Rel::c));
  EXPECT_FALSE(satisfies(Rel::dc, Rel::c));
  // every union symbol is the union of the RCC-5 classes it is defined over
  for (Rel r : kRcc8) {
    const Rel r5 = rcc5_coarsen(r);
    EXPECT_EQ(satisfies(r, Rel::p), r5 == Rel::pp || r5 == Rel::eq);
    EXPECT_EQ(satisfies(r, Rel::o), r5 != Rel::dr);
    EXPECT_EQ(satisfies(r, Rel::c), r != Rel::dc);
    EXPECT_TRUE(satisfies(r, r5));
  }
}

TEST(Rcc8, JepdAndConverse) {
  std::mt19937_64 rng(2024);
  std::map<Rel, int> seen;
  for (int i = 0; i < 2000; ++i) {
    auto [a, b] = oracle::random_pair(rng);
    const Rel ab = rcc8(a, b);
    const Rel ba = rcc8(b, a);
    ASSERT_TRUE(is_rcc8(ab));
    ASSERT_EQ(ab, converse(ba)) << i;
    ++seen[ab];
  }
  EXPECT_GE(seen.size(), 4u);
}

TEST(Rcc8, RasterOracle) {
  std::mt19937_64 rng(99);
  int n = 0;
  while (n < 100) {
    auto [a, b] = oracle::random_pair(rng);
    if (oracle::clearance(a, b) <= 2 * kDefaultEps) continue;
    ASSERT_EQ(rcc8(a, b), oracle::raster_rcc8(a, b)) << n;
    ++n;
  }
}

TEST(Rcc8, BoxesAgreeWithNestingFormula) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    auto a = std::get<AxisAlignedRectangle>(oracle::random_aarect(rng));
    auto b = std::get<AxisAlignedRectangle>(oracle::random_aarect(rng));
    EXPECT_EQ(rcc8(a, b) == Rel::ntpp, oracle::ntpp_formula(a, b));
  }
}

TEST(Allen, Examples) {
  EXPECT_EQ(interval_relation({0, 1}, {2, 3}), Rel::precedes);
  EXPECT_EQ(interval_relation({0, 2}, {0, 5}), Rel::starts);
  EXPECT_EQ(interval_relation({1, 4}, {2, 3}), Rel::contains);
  EXPECT_THROW(interval_relation({1, 1}, {2, 3}), Error);
}

TEST(Allen, EndpointEnumeration) {
  std::set<Rel> covered;
  for (auto [a, b] : oracle::allen_battery()) {
    const auto m = oracle::allen_matches(a, b);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(interval_relation({a.lo, a.hi}, {b.lo, b.hi}), m[0]);
    // invariant under a common affine change
    EXPECT_EQ(interval_relation({3 * a.lo + 7, 3 * a.hi + 7}, {3 * b.lo + 7, 3 * b.hi + 7}), m[0]);
    EXPECT_EQ(converse(interval_relation({a.lo, a.hi}, {b.lo, b.hi})), interval_relation({b.lo, b.hi}, {a.lo, a.hi}));
    covered.insert(m[0]);
  }
  EXPECT_EQ(covered.size(), 13u);
}

TEST(RectangleAlgebra, Examples) {
  using R = AxisAlignedRectangle;
  EXPECT_EQ(rectangle_algebra(R(0, 0, 1, 1), R(2, 2, 1, 1)), (RectangleRelation{Rel::precedes, Rel::precedes}));
  EXPECT_EQ(rectangle_algebra(R(0, 0, 4, 4), R(1, 1, 1, 1)), (RectangleRelation{Rel::contains, Rel::contains}));
  EXPECT_EQ(rectangle_algebra(R(0, 0, 4, 4), R(0, 0, 4, 4)), (RectangleRelation{Rel::equals, Rel::equals}));
  // projection oracle
  const R a(0, 0, 4, 2), b(1, 2, 5, 1);
  const auto rr = rectangle_algebra(a, b);
  EXPECT_EQ(rr.x, oracle::allen_matches({0, 4}, {1, 6})[0]);
  EXPECT_EQ(rr.y, oracle::allen_matches({0, 2}, {2, 3})[0]);
}

TEST(Lr, Examples) {
  EXPECT_EQ(lr({0, 0}, {1, 0}, {0.5, 1}), Rel::left);
  EXPECT_EQ(lr({0, 0}, {1, 0}, {0.5, -1}), Rel::right);
  EXPECT_EQ(lr({0, 0}, {1, 0}, {0.5, 0}), Rel::on);
  EXPECT_EQ(lr({0, 0}, {1, 0}, {2, 0}), Rel::front);
  EXPECT_EQ(lr({0, 0}, {1, 0}, {-1, 0}), Rel::back);
  EXPECT_EQ(lr({0, 0}, {1, 0}, {0, 0}), Rel::start);
  EXPECT_EQ(lr({0, 0}, {1, 0}, {1, 0}), Rel::end);
  EXPECT_TRUE(is_collinear(Rel::front));
  try {
    (void)lr({1, 1}, {1, 1}, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate-axis");
  }
}

TEST(Lr, ReflectionFlipsSide) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-50, 50);
  int n = 0;
  while (n < 5000) {
    Point o{u(rng), u(rng)}, d{u(rng), u(rng)}, r{u(rng), u(rng)};
    const double ux = d.x - o.x, uy = d.y - o.y, len2 = ux * ux + uy * uy;
    if (len2 < 1) continue;
    // reflect r across the line through o and d
    const double t = ((r.x - o.x) * ux + (r.y - o.y) * uy) / len2;
    const Point foot{o.x + t * ux, o.y + t * uy};
    const Point m{2 * foot.x - r.x, 2 * foot.y - r.y};
    if (std::hypot(r.x - foot.x, r.y - foot.y) < 1e-6) continue;
    const Rel a = lr(o, d, r), b = lr(o, d, m);
    ASSERT_TRUE(a == Rel::left || a == Rel::right);
    EXPECT_EQ(b, a == Rel::left ? Rel::right : Rel::left);
    ++n;
  }
}

TEST(Orientation, Examples) {
  auto r = orientation_relation(OrientedPoint({0, 0}, {1, 0}), OrientedPoint({5, 0}, {-1, 0}));
  EXPECT_EQ(r.size(), 2u);
  EXPECT_TRUE(has(r, Rel::facing_towards));
  EXPECT_TRUE(has(r, Rel::opposite_direction));

  r = orientation_relation(OrientedPoint({0, 0}, {0, 1}), OrientedPoint({5, 0}, {0, 1}));
  EXPECT_EQ(r, std::vector<Rel>{Rel::same_direction});

  // bearing is pi, beyond pi - tol
  r = orientation_relation(OrientedPoint({0, 0}, {1, 0}), OrientedPoint({-5, 0}, {1, 0}));
  EXPECT_EQ(r.size(), 2u);
  EXPECT_TRUE(has(r, Rel::facing_away));
  EXPECT_TRUE(has(r, Rel::same_direction));

  try {
    (void)orientation_relation(OrientedPoint({0, 0}, {1, 0}), OrientedPoint({0, 0}, {0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "coincident-points");
  }
}

TEST(Qdc, Distance) {
  QualificationContext ctx;
  EXPECT_EQ(qdc_distance(AxisAlignedRectangle(0, 0, 2, 2), AxisAlignedRectangle(1, 1, 2, 2), ctx), Rel::adjacent);
  // gap = half the near threshold
  const double gap = 0.5 * ctx.near_threshold;
  EXPECT_EQ(qdc_distance(Circle({0, 0}, 1), Circle({2 + gap, 0}, 1), ctx), Rel::near);
  const Entity a = AxisAlignedRectangle(0, 0, 1, 1), b = AxisAlignedRectangle(10, 10, 1, 1);
  EXPECT_NEAR(boundary_gap(a, b, ctx), std::sqrt(81.0 + 81.0), 1e-9);
  EXPECT_EQ(qdc_distance(a, b, ctx), Rel::far);
}

TEST(Qdc, Size) {
  QualificationContext ctx;
  EXPECT_EQ(size_relation(AxisAlignedRectangle(0, 0, 1, 1), AxisAlignedRectangle(5, 5, 1, 1), ctx), Rel::equi_sized);
  EXPECT_EQ(size_relation(Circle({0, 0}, 1), AxisAlignedRectangle(0, 0, 10, 10), ctx), Rel::smaller);
  EXPECT_EQ(size_relation(AxisAlignedRectangle(0, 0, 10, 10), Circle({0, 0}, 1), ctx), Rel::larger);
  ctx.size_ratio_tol = 0.1;
  EXPECT_EQ(size_relation(100.0, 106.0, ctx), Rel::equi_sized);
  EXPECT_EQ(size_relation(100.0, 112.0, ctx), Rel::smaller);
  try {
    (void)size_relation(Point{0, 0}, Point{1, 1}, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "zero-area");
  }
}

TEST(QualifyScene, DisjointPeople) {
  Scene s{"s", 100, 100, {box("p1", 0, 0, 10, 10), box("p2", 50, 50, 10, 10)}, std::nullopt, {}};
  const auto res = qualify_scene(s, {Family::mereotopology}, for_scene(100, 100));
  ASSERT_EQ(res.tuples.size(), 2u);
  EXPECT_EQ(to_string(res.tuples[0]), "dc(p1,p2)");
  EXPECT_EQ(to_string(res.tuples[1]), "dc(p2,p1)");
}

TEST(QualifyScene, OrderedPairCounts) {
  Scene s{"s", 100, 100, {box("a", 0, 0, 10, 10), box("b", 20, 20, 10, 30), box("c", 5, 5, 50, 50)}, std::nullopt, {}};
  const auto res = qualify_scene(s, {Family::mereotopology, Family::size}, for_scene(100, 100));
  EXPECT_EQ(res.tuples.size(), 12u);
  EXPECT_TRUE(res.diagnostics.empty());
  // pure function of its inputs
  const auto again = qualify_scene(s, {Family::mereotopology, Family::size}, for_scene(100, 100));
  EXPECT_EQ(res.tuples, again.tuples);
}

TEST(QualifyScene, DiagnosticsForInapplicablePairs) {
  Scene s{"s", 100, 100, {box("a", 0, 0, 10, 10), {"pt", ObjectKind::gaze, Point{50, 50}, std::nullopt}}, std::nullopt, {}};
  const auto res = qualify_scene(s, {Family::mereotopology}, for_scene(100, 100));
  EXPECT_TRUE(res.tuples.empty());
  EXPECT_EQ(res.diagnostics.size(), 2u);
}

TEST(QualifyScene, SymmetryAxisSides) {
  data::SymmetryParams p;
  p.n_pos = 3;
  p.n_neg = 3;
  p.seed = 4;
  const auto d = data::generate_symmetry(p);
  for (const auto& ex : d.examples) {
    if (!ex.positive) continue;
    const auto& s = std::get<Scene>(ex.payload);
    const auto res = qualify_scene(s, {Family::orientation}, for_scene(s.width, s.height));
    std::set<std::string> facts;
    for (const auto& t : res.tuples) facts.insert(to_string(t));
    EXPECT_TRUE(facts.count("left(axis,p1)")) << ex.id;
    EXPECT_TRUE(facts.count("right(axis,p2)")) << ex.id;
    EXPECT_TRUE(facts.count("facing_towards(p1,p2)")) << ex.id;
  }
}

TEST(Context, SceneRelativeThresholds) {
  const auto ctx = for_scene(300, 400);
  EXPECT_DOUBLE_EQ(ctx.near_threshold, 0.2 * 500);
  EXPECT_DOUBLE_EQ(ctx.adjacent_threshold, 0.01 * 500);
  EXPECT_DOUBLE_EQ(ctx.scene_width, 300);
  ContextFactors f;
  f.size_ratio_tol = 1.5;
  EXPECT_THROW(f.resolve(1, 1), Error);
}
