#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "stil/data/generators.hpp"
#include "stil/fluents.hpp"

using namespace stil;
using namespace stil::fluents;
using geom::AxisAlignedRectangle;
using geom::Point;

namespace {

bool has(const std::vector<Rel>& v, Rel r) { return std::find(v.begin(), v.end(), r) != v.end(); }

Track static_box(const std::string& id, AxisAlignedRectangle r, int from, int to) {
  Track t{id, ObjectKind::person, {}};
  for (int f = from; f <= to; ++f) t.samples.push_back({TimePoint{f, std::nullopt}, r, std::nullopt});
  return t;
}

template <class F>
Track moving(const std::string& id, ObjectKind kind, int n, F&& at) {
  Track t{id, kind, {}};
  for (int f = 0; f < n; ++f) t.samples.push_back({TimePoint{f, std::nullopt}, at(f), std::nullopt});
  return t;
}

// Frame f becomes last - f, order reversed.
Track reversed(const Track& tr) {
  Track out{tr.id, tr.kind, {}};
  const auto last = tr.last();
  for (auto it = tr.samples.rbegin(); it != tr.samples.rend(); ++it) {
    auto s = *it;
    s.t.index = last - s.t.index;
    out.samples.push_back(s);
  }
  return out;
}

qsr::QualificationContext ctx100() { return qsr::for_scene(100, 100); }

}  // namespace

TEST(HoldsIn, Examples) {
  std::vector<Track> tracks{static_box("p1", {10, 10, 20, 40}, 0, 5), static_box("p2", {60, 10, 20, 40}, 0, 5),
                            moving("g", ObjectKind::gaze, 6, [](int) { return geom::Entity{Point{15, 20}}; })};
  EXPECT_TRUE(holds_in(Fluent{"gaze_on", "g", "p1"}, 3, tracks, ctx100()));
  EXPECT_FALSE(holds_in(Fluent{"gaze_on", "g", "p2"}, 3, tracks, ctx100()));
  EXPECT_TRUE(holds_in(parse_relation_tuple("eq(p1,p1)"), 2, tracks, ctx100()));
  EXPECT_TRUE(holds_in(parse_relation_tuple("dc(p1,p2)"), 0, tracks, ctx100()));
  try {
    (void)holds_in(Fluent{"dc", "p1", "p2"}, 9, tracks, ctx100());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "missing-sample");
  }
}

TEST(HoldsIn, GeneratorGazeInsideBox) {
  data::AttentionParams p;
  p.n_pos = 4;
  p.n_neg = 4;
  p.seed = 12;
  const auto d = data::generate_attention(p);
  const auto& e = std::get<Episode>(d.examples[0].payload);
  const auto ctx = qsr::for_scene(e.width, e.height);
  // at frame 1 the gaze is inside exactly one person's box
  const bool on_a = holds_in(Fluent{"gaze_on", "g", "pa"}, 1, e.tracks, ctx);
  const bool on_b = holds_in(Fluent{"gaze_on", "g", "pb"}, 1, e.tracks, ctx);
  EXPECT_NE(on_a, on_b);
  // cross-check against the raw coordinates
  const auto gp = std::get<Point>(e.find("g")->at(1)->geometry);
  const auto box = std::get<AxisAlignedRectangle>(e.find(on_a ? "pa" : "pb")->at(1)->geometry);
  EXPECT_TRUE(box.x() < gp.x && gp.x < box.x_max() && box.y() < gp.y && gp.y < box.y_max());
}

TEST(DeriveFluents, StaticDisjointBoxes) {
  std::vector<Track> tracks{static_box("a", {0, 0, 10, 10}, 0, 9), static_box("b", {50, 50, 10, 10}, 0, 9)};
  const auto iv = derive_fluents(tracks, {"mereotopology"}, ctx100());
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_EQ(to_string(iv[0]), to_string(FluentInterval{{"dc", "a", "b"}, 0, 9}));
  EXPECT_EQ(iv[0].first, 0);
  EXPECT_EQ(iv[0].last, 9);
  EXPECT_EQ(iv[1].fluent.a, "b");
}

TEST(DeriveFluents, DisjointTimeDomains) {
  std::vector<Track> tracks{static_box("a", {0, 0, 10, 10}, 0, 4), static_box("b", {50, 50, 10, 10}, 5, 9)};
  EXPECT_TRUE(derive_fluents(tracks, {"mereotopology"}, ctx100()).empty());
}

TEST(DeriveFluents, GazeCrossing) {
  std::vector<Track> tracks{static_box("p1", {10, 10, 20, 40}, 0, 9), static_box("p2", {60, 10, 20, 40}, 0, 9),
                            moving("g", ObjectKind::gaze, 10, [](int f) {
                              return geom::Entity{Point{f < 5 ? 20.0 : 70.0, 30}};
                            })};
  std::vector<FluentInterval> on;
  for (const auto& iv : derive_fluents(tracks, {"gaze_on"}, ctx100()))
    if (iv.fluent.a == "g") on.push_back(iv);
  ASSERT_EQ(on.size(), 2u);
  EXPECT_EQ(on[0].fluent.b, "p1");
  EXPECT_EQ(on[1].fluent.b, "p2");
  EXPECT_LT(on[0].last, on[1].first);
}

// holds_in(r, t) iff some derived interval of r contains t; intervals per
// pair and family never overlap and cover every common frame.
TEST(DeriveFluents, CoherentWithHoldsIn) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 70), s(5, 30), step(-4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Track> tracks;
    for (const char* id : {"a", "b", "c"}) {
      double x = u(rng), y = u(rng);
      const double w = s(rng), h = s(rng);
      tracks.push_back(moving(id, ObjectKind::person, 12, [&](int) {
        x = std::clamp(x + step(rng), 0.0, 70.0);
        y = std::clamp(y + step(rng), 0.0, 70.0);
        return geom::Entity{AxisAlignedRectangle(x, y, w, h)};
      }));
    }
    const auto ctx = ctx100();
    const auto ivs = derive_fluents(tracks, {"mereotopology", "size"}, ctx);
    for (const auto& a : tracks)
      for (const auto& b : tracks) {
        if (&a == &b) continue;
        for (int t = 0; t < 12; ++t) {
          int rcc_cover = 0;
          for (Rel r : kRcc8) {
            const bool h = holds_in(Fluent{std::string(to_string(r)), a.id, b.id}, t, tracks, ctx);
            const bool in = std::any_of(ivs.begin(), ivs.end(), [&](const FluentInterval& iv) {
              return iv.fluent.a == a.id && iv.fluent.b == b.id && iv.fluent.relation == to_string(r) &&
                     iv.first <= t && t <= iv.last;
            });
            ASSERT_EQ(h, in);
            rcc_cover += in;
          }
          EXPECT_EQ(rcc_cover, 1);
        }
      }
  }
}

TEST(FluentIntervals, SingleFluent) {
  std::vector<Track> tracks{static_box("p", {10, 10, 20, 20}, 0, 7),
                            moving("g", ObjectKind::gaze, 8, [](int f) {
                              return geom::Entity{Point{(f == 3 || f == 4) ? 80.0 : 15.0, 15}};
                            })};
  const auto iv = fluent_intervals(Fluent{"gaze_on", "g", "p"}, tracks, ctx100());
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_EQ(iv[0].first, 0);
  EXPECT_EQ(iv[0].last, 2);
  EXPECT_EQ(iv[1].first, 5);
  EXPECT_EQ(iv[1].last, 7);
}

TEST(Motion, Converging) {
  auto a = moving("a", ObjectKind::generic, 5, [](int f) { return geom::Entity{Point{double(f) * 5, 0}}; });
  auto b = moving("b", ObjectKind::generic, 5, [](int) { return geom::Entity{Point{50, 0}}; });
  const auto r = motion_relation(a, b, {0, 5}, ctx100());
  EXPECT_EQ(r, std::vector<Rel>{Rel::moving_towards});
  const auto rr = motion_relation(reversed(a), reversed(b), {0, 5}, ctx100());
  EXPECT_EQ(rr, std::vector<Rel>{Rel::moving_away});
}

TEST(Motion, Splitting) {
  auto a = moving("a", ObjectKind::generic, 5, [](int f) { return geom::Entity{AxisAlignedRectangle(10 + 6.0 * f, 10, 10, 10)}; });
  auto b = moving("b", ObjectKind::generic, 5, [](int) { return geom::Entity{AxisAlignedRectangle(10, 10, 10, 10)}; });
  const auto r = motion_relation(a, b, {0, 5}, ctx100());
  EXPECT_TRUE(has(r, Rel::splitting));
  EXPECT_FALSE(has(r, Rel::merging));
  const auto rr = motion_relation(reversed(a), reversed(b), {0, 5}, ctx100());
  EXPECT_TRUE(has(rr, Rel::merging));
  EXPECT_FALSE(has(rr, Rel::splitting));
}

TEST(Motion, PassingInFront) {
  auto a = moving("a", ObjectKind::generic, 5, [](int f) { return geom::Entity{Point{5, -2.0 + f}}; });
  Track b{"b", ObjectKind::person, {}};
  for (int f = 0; f < 5; ++f) b.samples.push_back({TimePoint{f, std::nullopt}, geom::OrientedPoint({0, 0}, {1, 0}), std::nullopt});
  auto ctx = ctx100();
  const auto r = motion_relation(a, b, {0, 5}, ctx);
  EXPECT_TRUE(has(r, Rel::passing_in_front));
  EXPECT_FALSE(has(r, Rel::passing_behind));
  auto behind = moving("a", ObjectKind::generic, 5, [](int f) { return geom::Entity{Point{-5, -2.0 + f}}; });
  EXPECT_TRUE(has(motion_relation(behind, b, {0, 5}, ctx), Rel::passing_behind));
}

TEST(Motion, Parallel) {
  auto a = moving("a", ObjectKind::generic, 5, [](int f) { return geom::Entity{Point{10.0 + 5 * f, 0}}; });
  auto b = moving("b", ObjectKind::generic, 5, [](int f) { return geom::Entity{Point{10.0 + 5 * f, 20}}; });
  EXPECT_EQ(motion_relation(a, b, {0, 5}, ctx100()), std::vector<Rel>{Rel::moving_parallel});
}

TEST(Motion, TowardsAwayExclusiveAndReversal) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 100), st(-10, 10);
  for (int k = 0; k < 500; ++k) {
    double ax = u(rng), ay = u(rng), bx = u(rng), by = u(rng);
    const double dax = st(rng), day = st(rng), dbx = st(rng), dby = st(rng);
    auto a = moving("a", ObjectKind::generic, 5, [&](int f) { return geom::Entity{Point{ax + dax * f, ay + day * f}}; });
    auto b = moving("b", ObjectKind::generic, 5, [&](int f) { return geom::Entity{Point{bx + dbx * f, by + dby * f}}; });
    const auto r = motion_relation(a, b, {0, 5}, ctx100());
    EXPECT_FALSE(has(r, Rel::moving_towards) && has(r, Rel::moving_away));
    const auto rr = motion_relation(reversed(a), reversed(b), {0, 5}, ctx100());
    EXPECT_EQ(has(r, Rel::moving_towards), has(rr, Rel::moving_away));
    EXPECT_EQ(has(r, Rel::moving_away), has(rr, Rel::moving_towards));
  }
}

TEST(Motion, WindowUncovered) {
  auto a = moving("a", ObjectKind::generic, 3, [](int f) { return geom::Entity{Point{double(f), 0}}; });
  try {
    (void)motion_relation(a, a, {0, 5}, ctx100());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "window-uncovered");
  }
}

TEST(Growth, Examples) {
  auto doubling = moving("a", ObjectKind::generic, 5, [](int f) { return geom::Entity{AxisAlignedRectangle(0, 0, 10, 10.0 * (1 << f))}; });
  EXPECT_EQ(growth_relation(doubling, {0, 5}, ctx100()), std::vector<Rel>{Rel::growing_vertically});
  auto still = static_box("s", {0, 0, 10, 10}, 0, 4);
  EXPECT_TRUE(growth_relation(still, {0, 5}, ctx100()).empty());
  auto shrinking = moving("w", ObjectKind::generic, 5, [](int f) {
    return geom::Entity{AxisAlignedRectangle(0, 0, 10.0 * std::pow(0.9, f), 10)};
  });
  qsr::QualificationContext ctx;
  ctx.eps_motion = 1e-6;
  EXPECT_EQ(growth_relation(shrinking, {0, 5}, ctx), std::vector<Rel>{Rel::shrinking_horizontally});
  auto pt = moving("p", ObjectKind::generic, 5, [](int) { return geom::Entity{Point{1, 1}}; });
  try {
    (void)growth_relation(pt, {0, 5}, ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "no-extent");
  }
}
