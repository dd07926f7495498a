#pragma once

// Space-time histories: holds_in over sampled tracks, maximal fluent
// intervals, and the motion relations of the dynamics calculus.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "stil/kernel.hpp"
#include "stil/model.hpp"
#include "stil/qsr.hpp"

namespace stil::fluents {

/// A binary relation between two tracks, named by relation symbol or
/// derived relation (e.g. gaze_on).
struct Fluent {
  std::string relation;
  std::string a;
  std::string b;
  friend auto operator<=>(const Fluent&, const Fluent&) = default;
};

inline std::string to_string(const Fluent& f) { return f.relation + "(" + f.a + "," + f.b + ")"; }

/// Maximal span [first, last] (inclusive frame indices) over which the
/// fluent holds at every common sample.
struct FluentInterval {
  Fluent fluent;
  std::int64_t first = 0;
  std::int64_t last = 0;
  friend auto operator<=>(const FluentInterval&, const FluentInterval&) = default;
  bool contains(std::int64_t t) const { return first <= t && t <= last; }
};

inline std::string to_string(const FluentInterval& iv) {
  return "holds_in(" + to_string(iv.fluent) + ",[" + std::to_string(iv.first) + "," + std::to_string(iv.last) + "])";
}

/// Axis tracks are time-invariant: their first sample stands for every frame.
inline bool time_invariant(const Track& t) { return t.kind == ObjectKind::axis; }

inline const TrackSample* sample_at(const Track& tr, std::int64_t t) {
  if (time_invariant(tr)) return &tr.samples.front();
  return tr.at(t);
}

inline const Track& require_track(const std::vector<Track>& tracks, std::string_view id) {
  for (const auto& t : tracks)
    if (t.id == id) return t;
  throw Error("unknown-object", std::string(id));
}

inline kernel::Placed placed(const TrackSample& s) { return {&s.geometry, s.facing}; }

/// Whether the fluent holds at frame t; throws missing-sample when either
/// object has no sample there.
inline bool holds_in(const Fluent& f, std::int64_t t, const std::vector<Track>& tracks,
                     const qsr::QualificationContext& ctx) {
  const Track& ta = require_track(tracks, f.a);
  const Track& tb = require_track(tracks, f.b);
  const TrackSample* sa = sample_at(ta, t);
  const TrackSample* sb = sample_at(tb, t);
  if (!sa) throw Error("missing-sample", f.a + "@" + std::to_string(t));
  if (!sb) throw Error("missing-sample", f.b + "@" + std::to_string(t));
  if (f.a == f.b && (f.relation == "eq" || f.relation == "equals")) return true;
  return kernel::relation_holds(f.relation, placed(*sa), placed(*sb), ctx);
}

inline bool holds_in(const RelationTuple& rel, std::int64_t t, const std::vector<Track>& tracks,
                     const qsr::QualificationContext& ctx) {
  if (rel.args.size() != 2) throw Error("bad-arity", to_string(rel));
  return holds_in(Fluent{std::string(to_string(rel.rel)), rel.args[0], rel.args[1]}, t, tracks, ctx);
}

/// Frames where both tracks have a sample, ascending.
inline std::vector<std::int64_t> common_frames(const Track& a, const Track& b) {
  std::vector<std::int64_t> out;
  if (time_invariant(a) && time_invariant(b)) return {a.first()};
  const Track& driver = time_invariant(a) ? b : a;
  const Track& other = time_invariant(a) ? a : b;
  for (const auto& s : driver.samples)
    if (sample_at(other, s.t.index)) out.push_back(s.t.index);
  return out;
}

/// Relation names of one family (or one derived relation) that hold for a
/// sample pair. Families without an applicable relation yield nothing.
inline std::vector<std::string> relations_at(const TrackSample& a, const TrackSample& b, const std::string& group,
                                             const qsr::QualificationContext& ctx, const std::string& ida,
                                             const std::string& idb) {
  std::vector<std::string> out;
  if (kernel::is_derived_relation(group)) {
    if (kernel::relation_holds(group, placed(a), placed(b), ctx)) out.push_back(group);
    return out;
  }
  const auto fam = parse_family(group);
  if (!fam) throw Error("unknown-family", group);
  try {
    for (const auto& t : qsr::qualify_pair(ida, a.geometry, a.facing, idb, b.geometry, b.facing, *fam, ctx))
      out.push_back(t.qualifier.empty() ? std::string(to_string(t.rel))
                                        : t.qualifier + ":" + std::string(to_string(t.rel)));
  } catch (const Error&) {
  }
  return out;
}

/// Maximal constant-relation intervals per ordered pair of distinct tracks
/// and per requested group (family name or derived relation).
inline std::vector<FluentInterval> derive_fluents(const std::vector<Track>& tracks,
                                                  const std::vector<std::string>& groups,
                                                  const qsr::QualificationContext& ctx) {
  std::vector<FluentInterval> out;
  for (const auto& ta : tracks) {
    for (const auto& tb : tracks) {
      if (&ta == &tb) continue;
      const auto frames = common_frames(ta, tb);
      for (const auto& g : groups) {
        // open runs: relation -> first frame, last frame seen
        std::map<std::string, std::pair<std::int64_t, std::int64_t>> open;
        for (std::int64_t t : frames) {
          const auto now = relations_at(*sample_at(ta, t), *sample_at(tb, t), g, ctx, ta.id, tb.id);
          for (auto it = open.begin(); it != open.end();) {
            if (std::find(now.begin(), now.end(), it->first) == now.end()) {
              out.push_back({{it->first, ta.id, tb.id}, it->second.first, it->second.second});
              it = open.erase(it);
            } else {
              ++it;
            }
          }
          for (const auto& r : now) {
            auto [it, fresh] = open.try_emplace(r, t, t);
            if (!fresh) it->second.second = t;
          }
        }
        for (const auto& [r, span] : open) out.push_back({{r, ta.id, tb.id}, span.first, span.second});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const FluentInterval& x, const FluentInterval& y) {
    return std::tie(x.fluent.a, x.fluent.b, x.first, x.fluent.relation) <
           std::tie(y.fluent.a, y.fluent.b, y.first, y.fluent.relation);
  });
  return out;
}

/// Maximal intervals of one fluent, without qualifying anything else.
inline std::vector<FluentInterval> fluent_intervals(const Fluent& f, const std::vector<Track>& tracks,
                                                    const qsr::QualificationContext& ctx) {
  const Track& ta = require_track(tracks, f.a);
  const Track& tb = require_track(tracks, f.b);
  std::vector<FluentInterval> out;
  bool open = false;
  for (std::int64_t t : common_frames(ta, tb)) {
    const bool on = kernel::relation_holds(f.relation, placed(*sample_at(ta, t)), placed(*sample_at(tb, t)), ctx);
    if (on && open) {
      out.back().last = t;
    } else if (on) {
      out.push_back({f, t, t});
      open = true;
    } else {
      open = false;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dynamics

struct Window {
  std::int64_t start = 0;
  std::int64_t length = 5;
};

inline std::vector<const TrackSample*> window_samples(const Track& tr, const Window& w) {
  if (w.length < 2) throw Error("window-uncovered", "window needs at least two frames");
  std::vector<const TrackSample*> out;
  for (std::int64_t t = w.start; t < w.start + w.length; ++t) {
    const TrackSample* s = sample_at(tr, t);
    if (!s) throw Error("window-uncovered", tr.id + "@" + std::to_string(t));
    out.push_back(s);
  }
  return out;
}

/// Motion of track a relative to track b over the frames of `w`.
inline std::vector<Rel> motion_relation(const Track& a, const Track& b, const Window& w,
                                        const qsr::QualificationContext& ctx) {
  const auto sa = window_samples(a, w);
  const auto sb = window_samples(b, w);
  const std::size_t n = sa.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k)
    d[k] = geom::distance(geom::centroid(sa[k]->geometry), geom::centroid(sb[k]->geometry));

  std::vector<Rel> out;
  bool dec = true, inc = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    dec = dec && d[k + 1] < d[k];
    inc = inc && d[k + 1] > d[k];
  }
  if (dec && d[0] - d[n - 1] > ctx.eps_motion) out.push_back(Rel::moving_towards);
  if (inc && d[n - 1] - d[0] > ctx.eps_motion) out.push_back(Rel::moving_away);

  const geom::Vector ha = geom::centroid(sa[n - 1]->geometry) - geom::centroid(sa[0]->geometry);
  const geom::Vector hb = geom::centroid(sb[n - 1]->geometry) - geom::centroid(sb[0]->geometry);
  if (geom::norm(ha) > ctx.eps_motion && geom::norm(hb) > ctx.eps_motion &&
      qsr::angle_between(ha, hb) <= ctx.angle_tol && std::abs(d[n - 1] - d[0]) <= ctx.eps_motion)
    out.push_back(Rel::moving_parallel);

  auto overlap_state = [&](std::size_t k) -> std::optional<bool> {
    const auto& ga = sa[k]->geometry;
    const auto& gb = sb[k]->geometry;
    if (!geom::is_region(ga) || !geom::is_region(gb)) return std::nullopt;
    return qsr::satisfies(qsr::rcc8(ga, gb, ctx), Rel::o);
  };
  const auto first = overlap_state(0);
  const auto last = overlap_state(n - 1);
  if (first && last) {
    if (*first && !*last) out.push_back(Rel::splitting);
    if (!*first && *last) out.push_back(Rel::merging);
  }

  // Passing: a's centroid crosses b's facing line while near b.
  bool front = false, behind = false;
  int prev_side = 0;
  std::size_t prev_k = 0;
  for (std::size_t k = 0; k < n; ++k) {
    auto ob = oriented_view(sb[k]->geometry, sb[k]->facing);
    if (!ob) break;
    const geom::Point pa = geom::centroid(sa[k]->geometry);
    const double side = geom::cross(ob->v(), pa - ob->p()) / geom::norm(ob->v());
    const int s = side > ctx.eps_contact ? 1 : (side < -ctx.eps_contact ? -1 : 0);
    if (s == 0) continue;
    if (prev_side != 0 && s != prev_side) {
      const geom::Point p0 = geom::centroid(sa[prev_k]->geometry);
      const double s0 = geom::cross(ob->v(), p0 - ob->p()) / geom::norm(ob->v());
      const double lambda = s0 / (s0 - side);
      const geom::Point cross_pt = p0 + lambda * (pa - p0);
      const double along = geom::dot(cross_pt - ob->p(), ob->v());
      if (qsr::boundary_gap(sa[k]->geometry, sb[k]->geometry, ctx) <= ctx.near_threshold) {
        if (along > 0.0) front = true;
        if (along < 0.0) behind = true;
      }
    }
    prev_side = s;
    prev_k = k;
  }
  if (front) out.push_back(Rel::passing_in_front);
  if (behind) out.push_back(Rel::passing_behind);
  return out;
}

inline std::vector<Rel> growth_relation(const Track& tr, const Window& w, const qsr::QualificationContext& ctx) {
  const auto s = window_samples(tr, w);
  auto extent = [&](const geom::Entity& g) -> std::pair<double, double> {
    if (const auto* r = std::get_if<geom::AxisAlignedRectangle>(&g)) return {r->w(), r->h()};
    if (const auto* r = std::get_if<geom::Rectangle>(&g)) return {r->w(), r->h()};
    throw Error("no-extent", tr.id + " has no width/height");
  };
  std::vector<double> ws, hs;
  for (const auto* x : s) {
    auto [ww, hh] = extent(x->geometry);
    ws.push_back(ww);
    hs.push_back(hh);
  }
  auto monotone = [&](const std::vector<double>& v, int dir) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
      if (!(dir * (v[k + 1] - v[k]) > 0.0)) return false;
    return dir * (v.back() - v.front()) > ctx.eps_motion;
  };
  std::vector<Rel> out;
  if (monotone(hs, +1)) out.push_back(Rel::growing_vertically);
  if (monotone(ws, +1)) out.push_back(Rel::growing_horizontally);
  if (monotone(hs, -1)) out.push_back(Rel::shrinking_vertically);
  if (monotone(ws, -1)) out.push_back(Rel::shrinking_horizontally);
  return out;
}

}  // namespace stil::fluents
