#pragma once

// Scene and track carriers shared by the qualifier, the fluent layer, the
// learner and the file formats.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stil/geom.hpp"
#include "stil/relations.hpp"

namespace stil {

enum class ObjectKind : std::uint8_t { person, face, gaze, axis, generic };

inline std::string_view to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::person: return "person";
    case ObjectKind::face: return "face";
    case ObjectKind::gaze: return "gaze";
    case ObjectKind::axis: return "axis";
    case ObjectKind::generic: return "generic";
  }
  return "?";
}

inline std::optional<ObjectKind> parse_object_kind(std::string_view s) {
  for (auto k : {ObjectKind::person, ObjectKind::face, ObjectKind::gaze, ObjectKind::axis, ObjectKind::generic})
    if (to_string(k) == s) return k;
  if (s == "abstract" || s == "object") return ObjectKind::generic;
  return std::nullopt;
}

struct SceneObject {
  std::string id;
  ObjectKind kind = ObjectKind::generic;
  geom::Entity geometry = geom::Point{};
  /// Unit facing direction, when the detector supplied one.
  std::optional<geom::Vector> facing;
};

/// The oriented-point view of an object: centroid plus facing direction.
inline std::optional<geom::OrientedPoint> oriented_view(const geom::Entity& g, const std::optional<geom::Vector>& facing) {
  if (const auto* op = std::get_if<geom::OrientedPoint>(&g)) return *op;
  if (!facing || geom::norm(*facing) <= 0.0) return std::nullopt;
  return geom::OrientedPoint(geom::centroid(g), *facing);
}

struct Scene {
  std::string id;
  double width = 0.0;
  double height = 0.0;
  std::vector<SceneObject> objects;
  std::optional<TimePoint> timestamp;
  /// Optional pre-ground qualitative facts (mixed qualitative/quantitative data).
  std::vector<RelationTuple> facts;

  const SceneObject* find(std::string_view object_id) const {
    for (const auto& o : objects)
      if (o.id == object_id) return &o;
    return nullptr;
  }
  double diagonal() const { return std::hypot(width, height); }
};

/// Throws Error("invariant-violation", "<object>: <rule>") on the first
/// broken invariant. Geometry must lie inside the frame up to `slack`.
inline void validate(const Scene& s, double slack = 1e-6) {
  if (!(s.width > 0.0) || !(s.height > 0.0)) throw Error("invariant-violation", s.id + ": scene dimensions must be positive");
  std::set<std::string> seen;
  for (const auto& o : s.objects) {
    if (o.id.empty()) throw Error("invariant-violation", "object with empty id");
    if (!seen.insert(o.id).second) throw Error("invariant-violation", o.id + ": duplicate object id");
    const auto b = geom::bbox(o.geometry);
    if (b.x_min < -slack || b.y_min < -slack || b.x_max > s.width + slack || b.y_max > s.height + slack)
      throw Error("invariant-violation", o.id + ": geometry outside frame");
    if (o.facing && !(geom::norm(*o.facing) > 0.0)) throw Error("invariant-violation", o.id + ": zero facing vector");
  }
}

struct TrackSample {
  TimePoint t;
  geom::Entity geometry = geom::Point{};
  std::optional<geom::Vector> facing;
};

/// One object's geometry over ordered time points (a space-time history).
struct Track {
  std::string id;
  ObjectKind kind = ObjectKind::generic;
  std::vector<TrackSample> samples;

  /// Sample at frame index t, or nullptr.
  const TrackSample* at(std::int64_t t) const {
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const TrackSample& s, std::int64_t v) { return s.t.index < v; });
    if (it == samples.end() || it->t.index != t) return nullptr;
    return &*it;
  }
  std::int64_t first() const { return samples.front().t.index; }
  std::int64_t last() const { return samples.back().t.index; }
};

inline void validate(const Track& tr) {
  if (tr.id.empty()) throw Error("invariant-violation", "track with empty id");
  if (tr.samples.empty()) throw Error("invariant-violation", tr.id + ": track needs at least one sample");
  const auto kind = tr.samples.front().geometry.index();
  for (std::size_t i = 0; i < tr.samples.size(); ++i) {
    const auto& s = tr.samples[i];
    if (s.t.index < 0) throw Error("invariant-violation", tr.id + ": negative time index");
    if (i > 0 && !(tr.samples[i - 1].t.index < s.t.index))
      throw Error("invariant-violation", tr.id + ": time indices not strictly increasing");
    if (s.geometry.index() != kind) throw Error("invariant-violation", tr.id + ": mixed geometry kinds");
  }
}

struct Episode {
  std::string id;
  double width = 0.0;
  double height = 0.0;
  std::vector<Track> tracks;
  std::vector<RelationTuple> facts;

  const Track* find(std::string_view track_id) const {
    for (const auto& t : tracks)
      if (t.id == track_id) return &t;
    return nullptr;
  }
  double diagonal() const { return std::hypot(width, height); }
};

inline void validate(const Episode& e, double slack = 1e-6) {
  if (!(e.width > 0.0) || !(e.height > 0.0)) throw Error("invariant-violation", e.id + ": episode dimensions must be positive");
  std::set<std::string> seen;
  for (const auto& t : e.tracks) {
    validate(t);
    if (!seen.insert(t.id).second) throw Error("invariant-violation", t.id + ": duplicate track id");
    for (const auto& s : t.samples) {
      const auto b = geom::bbox(s.geometry);
      if (b.x_min < -slack || b.y_min < -slack || b.x_max > e.width + slack || b.y_max > e.height + slack)
        throw Error("invariant-violation", t.id + ": geometry outside frame at t=" + std::to_string(s.t.index));
    }
  }
}

}  // namespace stil
