#pragma once

// Synthetic datasets for the two case studies. Every label is checked
// against the target clause with the learner's own coverage test.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stil/data/io.hpp"
#include "stil/ilp/learner.hpp"
#include "stil/qsr.hpp"

namespace stil::data {

inline constexpr const char* kSymmetryTarget =
    "symmetric(S) :- axis(S,A), left(A,P1), right(A,P2), equi_sized(P1,P2), equidistant_from(P1,P2,A).";
inline constexpr const char* kSymmetryTypes = "S:scene,A:axis,P1:person,P2:person";
inline constexpr const char* kAttentionTarget =
    "attention_switch(E) :- gaze(E,G), holds_in(gaze_on(G,P1),I1), holds_in(gaze_on(G,P2),I2), before(I1,I2).";
inline constexpr const char* kAttentionTypes = "E:episode,G:gaze,P1:person,I1:interval,P2:person,I2:interval";

/// Parses a target clause and attaches its variable types.
inline ilp::Clause typed_clause(const std::string& text, const std::string& types) {
  std::map<std::string, int> names;
  ilp::Clause c = ilp::parse_clause(text, &names);
  std::stringstream ss(types);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto p = item.find(':');
    c.types[names.at(item.substr(0, p))] = item.substr(p + 1);
  }
  return c;
}

namespace detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 g_;
};

inline std::string example_id(const char* prefix, bool positive, int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%s_%03d", prefix, positive ? "pos" : "neg", k);
  return buf;
}

/// Checks every label against the target clause; throws on the first
/// mismatch.
inline void check_labels(const Dataset& d, const ilp::Clause& target, const qsr::ContextFactors& factors) {
  const auto bg = ilp::Background::standard();
  for (const auto& ex : to_examples(d)) {
    const auto ctx = factors.resolve(ilp::example_width(ex), ilp::example_height(ex));
    ilp::World w(ex, ctx, bg);
    if (ilp::covers(target, w) != ex.positive)
      throw Error("generator-label-mismatch", ex.id + " is labelled " + (ex.positive ? "pos" : "neg") +
                                                  " but the target clause says otherwise");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Symmetry

struct SymmetryParams {
  int n_pos = 20;
  int n_neg = 20;
  std::uint64_t seed = 0;
  double width = 1280.0;
  double height = 720.0;
  /// Positional and size noise on the mirrored partner, as a fraction of
  /// the scene width (positions) or of the partner's size.
  double jitter = 0.01;
};

namespace detail {

struct PersonBox {
  double x, y, w, h;
};

inline void add_person(Scene& s, const std::string& id, const PersonBox& b, double facing_x) {
  s.objects.push_back({id, ObjectKind::person, geom::AxisAlignedRectangle(b.x, b.y, b.w, b.h), geom::Vector{facing_x, 0.0}});
  // Face: upper part of the body box, well inside it.
  const double fw = b.w * 0.4, fh = b.h * 0.2;
  const geom::AxisAlignedRectangle face(b.x + (b.w - fw) / 2.0, b.y + b.h * 0.72, fw, fh);
  s.objects.push_back({"face_" + id, ObjectKind::face, face, geom::Vector{facing_x, 0.0}});
}

inline PersonBox random_left_person(Rng& rng, const SymmetryParams& p) {
  PersonBox b{};
  b.w = rng.uniform(0.07, 0.12) * p.width;
  b.h = rng.uniform(0.35, 0.6) * p.height;
  // Centroid distance to the axis in [0.08W, 0.4W].
  const double d = rng.uniform(0.08, 0.4) * p.width;
  b.x = p.width / 2.0 - d - b.w / 2.0;
  b.y = rng.uniform(0.05, 0.9) * p.height - 0.0;
  b.y = std::min(b.y, p.height * 0.98 - b.h);
  b.y = std::max(b.y, p.height * 0.02);
  return b;
}

/// Reflection across x = W/2 with optional jitter.
inline PersonBox mirror(const PersonBox& b, Rng& rng, const SymmetryParams& p) {
  PersonBox m = b;
  m.x = p.width - b.x - b.w;
  if (p.jitter > 0.0) {
    m.x += rng.uniform(-p.jitter, p.jitter) * p.width;
    m.w *= 1.0 + rng.uniform(-p.jitter, p.jitter);
    m.h *= 1.0 + rng.uniform(-p.jitter, p.jitter);
    m.y += rng.uniform(-p.jitter, p.jitter) * p.height;
    m.y = std::clamp(m.y, 0.0, p.height - m.h);
  }
  return m;
}

}  // namespace detail

/// Positives: one person pair mirrored across the vertical centre axis,
/// each with a face, facing each other. Negatives break one of side split,
/// equidistance or size parity (cycled in that order).
inline Dataset generate_symmetry(const SymmetryParams& p, const qsr::ContextFactors& factors = {}) {
  if (p.n_pos <= 0 || p.n_neg <= 0) throw Error("invalid-argument", "counts must be positive");
  detail::Rng rng(p.seed);
  Dataset d;
  d.generator = "symmetry";
  d.seed = p.seed;
  d.target = "symmetric";
  d.params = {{"n_pos", p.n_pos}, {"n_neg", p.n_neg}, {"width", p.width}, {"height", p.height}, {"jitter", p.jitter}};
  const double tol = factors.size_ratio_tol;

  auto base = [&](const std::string& id) {
    Scene s;
    s.id = id;
    s.width = p.width;
    s.height = p.height;
    inject_axis(s);
    return s;
  };
  auto finish = [&](Scene& s, bool positive) {
    const auto ctx = factors.resolve(s.width, s.height);
    s.facts = qsr::qualify_scene(s, {Family::orientation, Family::size, Family::mereotopology}, ctx).tuples;
    validate(s);
    d.examples.push_back({s.id, positive, std::move(s)});
  };

  for (int k = 0; k < p.n_pos; ++k) {
    Scene s = base(detail::example_id("sym", true, k));
    const auto left = detail::random_left_person(rng, p);
    const auto right = detail::mirror(left, rng, p);
    detail::add_person(s, "p1", left, 1.0);
    detail::add_person(s, "p2", right, -1.0);
    finish(s, true);
  }
  for (int k = 0; k < p.n_neg; ++k) {
    Scene s = base(detail::example_id("sym", false, k));
    auto left = detail::random_left_person(rng, p);
    auto other = detail::mirror(left, rng, p);
    switch (k % 3) {
      case 0: {
        // Side split: an equal-sized partner on the same side.
        const auto again = detail::random_left_person(rng, p);
        other = left;
        other.x = again.x + (again.w - left.w) / 2.0;
        other.y = std::clamp(again.y, 0.02 * p.height, 0.98 * p.height - other.h);
        break;
      }
      case 1: {
        // Equidistance: axis distances differ by more than 1.5 tol W.
        const double near_d = rng.uniform(0.06, 0.12) * p.width;
        const double far_d = near_d + rng.uniform(1.6, 2.0) * tol * p.width;
        const bool left_near = rng.coin();
        const double dl = left_near ? near_d : far_d, dr = left_near ? far_d : near_d;
        left.x = p.width / 2.0 - dl - left.w / 2.0;
        other.x = p.width / 2.0 + dr - other.w / 2.0;
        break;
      }
      default: {
        // Size parity: shrink the partner's area to at most 0.6 of the original.
        const double ratio = rng.uniform(0.4, 0.6);
        const double f = std::sqrt(ratio);
        const double cx = other.x + other.w / 2.0;
        other.w *= f;
        other.h *= f;
        other.x = cx - other.w / 2.0;
        break;
      }
    }
    detail::add_person(s, "p1", left, 1.0);
    detail::add_person(s, "p2", other, k % 3 == 0 ? 1.0 : -1.0);
    finish(s, false);
  }
  detail::check_labels(d, typed_clause(kSymmetryTarget, kSymmetryTypes), factors);
  return d;
}

// ---------------------------------------------------------------------------
// Attention

struct AttentionParams {
  int n_pos = 15;
  int n_neg = 15;
  std::uint64_t seed = 0;
  double width = 1280.0;
  double height = 720.0;
  int frames = 12;
};

/// Two static people and a gaze point track. Positives: the gaze rests on
/// one person up to a switch frame, then on the other. Negatives alternate
/// between a gaze fixed on one person and a gaze that never enters either.
inline Dataset generate_attention(const AttentionParams& p, const qsr::ContextFactors& factors = {}) {
  if (p.n_pos <= 0 || p.n_neg <= 0) throw Error("invalid-argument", "counts must be positive");
  if (p.frames < 3) throw Error("invalid-argument", "attention episodes need at least 3 frames");
  detail::Rng rng(p.seed);
  Dataset d;
  d.generator = "attention";
  d.seed = p.seed;
  d.target = "attention_switch";
  d.params = {{"n_pos", p.n_pos}, {"n_neg", p.n_neg}, {"width", p.width}, {"height", p.height}, {"frames", p.frames}};

  using Box = geom::AxisAlignedRectangle;
  auto people = [&](Episode& e) {
    std::vector<Box> boxes;
    const double w = rng.uniform(0.1, 0.16) * p.width, h = rng.uniform(0.4, 0.6) * p.height;
    const double xa = rng.uniform(0.05, 0.3) * p.width;
    const double xb = rng.uniform(0.55, 0.8) * p.width;
    boxes.emplace_back(xa, rng.uniform(0.05, 0.35) * p.height, w, h);
    boxes.emplace_back(xb, rng.uniform(0.05, 0.35) * p.height, w * rng.uniform(0.9, 1.1), h);
    const char* ids[] = {"pa", "pb"};
    for (std::size_t i = 0; i < 2; ++i) {
      Track t{ids[i], ObjectKind::person, {}};
      for (int f = 1; f <= p.frames; ++f) t.samples.push_back({TimePoint{f, std::nullopt}, boxes[i], std::nullopt});
      e.tracks.push_back(std::move(t));
    }
    return boxes;
  };
  auto inside = [&](const Box& b) {
    return geom::Point{b.x() + rng.uniform(0.2, 0.8) * b.w(), b.y() + rng.uniform(0.2, 0.8) * b.h()};
  };
  auto outside = [&](const std::vector<Box>& boxes) {
    // The band between the two people, or above them.
    const double lo = boxes[0].x_max() + 0.02 * p.width, hi = boxes[1].x() - 0.02 * p.width;
    return geom::Point{rng.uniform(lo, hi), rng.uniform(0.05, 0.95) * p.height};
  };
  auto gaze_track = [&](Episode& e, const std::vector<geom::Point>& pts) {
    Track t{"g", ObjectKind::gaze, {}};
    for (int f = 1; f <= p.frames; ++f) t.samples.push_back({TimePoint{f, std::nullopt}, pts[f - 1], std::nullopt});
    e.tracks.push_back(std::move(t));
  };
  auto finish = [&](Episode& e, bool positive) {
    validate(e);
    d.examples.push_back({e.id, positive, std::move(e)});
  };

  for (int k = 0; k < p.n_pos; ++k) {
    Episode e{detail::example_id("att", true, k), p.width, p.height, {}, {}};
    const auto boxes = people(e);
    const bool a_first = rng.coin();
    const Box& first = boxes[a_first ? 0 : 1];
    const Box& second = boxes[a_first ? 1 : 0];
    const int s = rng.integer(2, p.frames - 1);
    std::vector<geom::Point> pts;
    for (int f = 1; f <= p.frames; ++f) pts.push_back(f < s ? inside(first) : inside(second));
    gaze_track(e, pts);
    finish(e, true);
  }
  for (int k = 0; k < p.n_neg; ++k) {
    Episode e{detail::example_id("att", false, k), p.width, p.height, {}, {}};
    const auto boxes = people(e);
    std::vector<geom::Point> pts;
    if (k % 2 == 0) {
      const Box& target = boxes[rng.coin() ? 0 : 1];
      for (int f = 1; f <= p.frames; ++f) pts.push_back(inside(target));
    } else {
      for (int f = 1; f <= p.frames; ++f) pts.push_back(outside(boxes));
    }
    gaze_track(e, pts);
    finish(e, false);
  }
  detail::check_labels(d, typed_clause(kAttentionTarget, kAttentionTypes), factors);
  return d;
}

}  // namespace stil::data
