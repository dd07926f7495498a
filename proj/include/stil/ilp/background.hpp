#pragma once

// Background knowledge: the per-example evaluation world and the library of
// predicates the learner may use. Spatial predicates are evaluated by the
// kernel on the example's geometry. Pre-ground facts in the payload are
// never consulted.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "stil/fluents.hpp"
#include "stil/ilp/clause.hpp"
#include "stil/kernel.hpp"
#include "stil/model.hpp"

namespace stil::ilp {

struct Example {
  std::string id;
  bool positive = true;
  /// Target predicate; the target atom is target(id).
  std::string target;
  std::variant<Scene, Episode> payload;
};

inline double example_width(const Example& e) {
  return std::visit([](const auto& p) { return p.width; }, e.payload);
}
inline double example_height(const Example& e) {
  return std::visit([](const auto& p) { return p.height; }, e.payload);
}

class Background;

/// Everything a predicate may look at for one example.
class World {
 public:
  struct Object {
    std::string id;
    ObjectKind kind;
    const SceneObject* scene_object = nullptr;
    const Track* track = nullptr;
  };

  World(const Example& ex, const qsr::QualificationContext& ctx, const Background& bg);

  const Example& example() const { return *ex_; }
  const std::string& id() const { return ex_->id; }
  const qsr::QualificationContext& ctx() const { return ctx_; }
  const Background& background() const { return *bg_; }
  bool is_episode() const { return std::holds_alternative<Episode>(ex_->payload); }
  const std::vector<Object>& objects() const { return objects_; }
  const std::vector<std::int64_t>& frames() const { return frames_; }
  std::size_t kernel_calls() const { return kernel_calls_; }

  const Object* object(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &objects_[it->second];
  }

  bool is_a(const Value& v, const std::string& type) const;
  std::vector<Value> domain(const std::string& type) const;

  /// Binary relation (base symbol, union, alias or derived) between two
  /// objects; at a frame for episodes, or across every common frame when
  /// `t` is empty.
  bool relation(const std::string& name, const std::string& a, const std::string& b,
                std::optional<std::int64_t> t = std::nullopt);

  /// Maximal frame intervals over which relation(name, a, b, t) holds.
  const std::vector<std::pair<std::int64_t, std::int64_t>>& intervals(const std::string& name, const std::string& a,
                                                                      const std::string& b);

  /// Motion relation over some window of ctx.motion_window frames
  /// (starting at `start` when given).
  bool motion(const std::string& name, const std::string& a, const std::string& b,
              std::optional<std::int64_t> start = std::nullopt);
  bool growth(const std::string& name, const std::string& a, std::optional<std::int64_t> start = std::nullopt);

 private:
  using Key = std::tuple<std::string, std::string, std::string, std::int64_t>;
  static constexpr std::int64_t kStatic = -1;

  bool compute(const std::string& name, const Object& a, const Object& b, std::optional<std::int64_t> t);
  std::optional<kernel::Placed> placed_at(const Object& o, std::optional<std::int64_t> t) const;

  const Example* ex_;
  qsr::QualificationContext ctx_;
  const Background* bg_;
  std::vector<Object> objects_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::int64_t> frames_;
  std::map<Key, bool> cache_;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::pair<std::int64_t, std::int64_t>>>
      interval_cache_;
  std::size_t kernel_calls_ = 0;
};

using Slots = std::vector<std::optional<Value>>;
/// Receives one complete slot assignment; returns false to stop.
using Emit = std::function<bool(const std::vector<Value>&)>;

struct Predicate {
  std::string name;
  std::size_t arity = 0;  // number of leaf slots
  std::function<bool(World&, const Literal&, const std::vector<Value>&)> test;
  /// Optional generator for slots that typed domains cannot enumerate.
  std::function<void(World&, const Literal&, const Slots&, const std::vector<std::string>&, const Emit&)> generate;
};

class Background {
 public:
  /// The standard library: structure, relations, derived and temporal
  /// predicates.
  static Background standard();

  void add(Predicate p) {
    const std::string k = p.name + "/" + std::to_string(p.arity);
    preds_[k] = std::move(p);
  }
  const Predicate* find(const std::string& name, std::size_t arity) const {
    auto it = preds_.find(name + "/" + std::to_string(arity));
    return it == preds_.end() ? nullptr : &it->second;
  }
  const std::map<std::string, Predicate>& predicates() const { return preds_; }

  /// A derived relation that holds when any of its members holds.
  void add_alias(const std::string& name, std::vector<std::string> members);
  const std::map<std::string, std::vector<std::string>>& aliases() const { return aliases_; }

  bool is_relation(const std::string& name) const {
    return aliases_.count(name) || (kernel::is_known_relation(name));
  }

 private:
  std::map<std::string, Predicate> preds_;
  std::map<std::string, std::vector<std::string>> aliases_;
};

// ---------------------------------------------------------------------------
// World

inline World::World(const Example& ex, const qsr::QualificationContext& ctx, const Background& bg)
    : ex_(&ex), ctx_(ctx), bg_(&bg) {
  if (const auto* s = std::get_if<Scene>(&ex.payload)) {
    for (const auto& o : s->objects) objects_.push_back({o.id, o.kind, &o, nullptr});
    frames_.push_back(s->timestamp ? s->timestamp->index : 0);
  } else {
    const auto& e = std::get<Episode>(ex.payload);
    std::set<std::int64_t> fr;
    for (const auto& t : e.tracks) {
      objects_.push_back({t.id, t.kind, nullptr, &t});
      for (const auto& smp : t.samples) fr.insert(smp.t.index);
    }
    frames_.assign(fr.begin(), fr.end());
  }
  for (std::size_t i = 0; i < objects_.size(); ++i) index_[objects_[i].id] = i;
}

inline bool World::is_a(const Value& v, const std::string& type) const {
  switch (v.kind) {
    case Value::Kind::time: return type == "timepoint" || type == "time";
    case Value::Kind::interval: return type == "interval";
    case Value::Kind::symbol: break;
  }
  if (v.sym == ex_->id) return type == "scene" || type == "episode" || type == "example";
  if (const Object* o = object(v.sym)) return type == "object" || type == "any" || type == to_string(o->kind);
  if (type == "relation") return bg_->is_relation(v.sym);
  return false;
}

inline std::vector<Value> World::domain(const std::string& type) const {
  std::vector<Value> out;
  if (type == "scene" || type == "episode" || type == "example") {
    out.push_back(Value::symbol(ex_->id));
  } else if (type == "timepoint" || type == "time") {
    for (auto t : frames_) out.push_back(Value::time(t));
  } else if (type == "relation") {
    for (const auto& info : stil::detail::kRelTable)
      if (family_of(info.rel) != Family::motion) out.push_back(Value::symbol(std::string(info.name)));
    out.push_back(Value::symbol("gaze_on"));
    for (const auto& [name, members] : bg_->aliases()) out.push_back(Value::symbol(name));
  } else if (type != "interval") {
    for (const auto& o : objects_)
      if (type == "object" || type == "any" || type == to_string(o.kind)) out.push_back(Value::symbol(o.id));
  }
  return out;
}

inline std::optional<kernel::Placed> World::placed_at(const Object& o, std::optional<std::int64_t> t) const {
  if (o.scene_object) return kernel::Placed{&o.scene_object->geometry, o.scene_object->facing};
  const TrackSample* s = fluents::sample_at(*o.track, t.value_or(o.track->first()));
  if (!s) return std::nullopt;
  return kernel::Placed{&s->geometry, s->facing};
}

inline bool World::compute(const std::string& name, const Object& a, const Object& b, std::optional<std::int64_t> t) {
  if (auto al = bg_->aliases().find(name); al != bg_->aliases().end()) {
    for (const auto& m : al->second)
      if (relation(m, a.id, b.id, t)) return true;
    return false;
  }
  if (is_episode() && !t) {
    // Static reading over an episode: holds at every common frame.
    bool any = false;
    for (auto f : frames_) {
      auto pa = placed_at(a, f);
      auto pb = placed_at(b, f);
      if (!pa || !pb) continue;
      any = true;
      if (!relation(name, a.id, b.id, f)) return false;
    }
    return any;
  }
  auto pa = placed_at(a, t);
  auto pb = placed_at(b, t);
  if (!pa || !pb) return false;
  if (a.id == b.id && (name == "eq" || name == "equals")) return true;
  ++kernel_calls_;
  return kernel::relation_holds(name, *pa, *pb, ctx_);
}

inline bool World::relation(const std::string& name, const std::string& a, const std::string& b,
                            std::optional<std::int64_t> t) {
  const Object* oa = object(a);
  const Object* ob = object(b);
  if (!oa || !ob) return false;
  const std::int64_t tk = is_episode() && t ? *t : kStatic;
  const Key key{name, a, b, tk};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const bool v = compute(name, *oa, *ob, is_episode() ? t : std::nullopt);
  cache_[key] = v;
  return v;
}

inline const std::vector<std::pair<std::int64_t, std::int64_t>>& World::intervals(const std::string& name,
                                                                                  const std::string& a,
                                                                                  const std::string& b) {
  auto key = std::make_tuple(name, a, b);
  if (auto it = interval_cache_.find(key); it != interval_cache_.end()) return it->second;
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  bool open = false;
  for (auto f : frames_) {
    const bool on = relation(name, a, b, f);
    if (on && open)
      out.back().second = f;
    else if (on)
      out.emplace_back(f, f);
    open = on;
  }
  return interval_cache_[key] = std::move(out);
}

inline bool World::motion(const std::string& name, const std::string& a, const std::string& b,
                          std::optional<std::int64_t> start) {
  const Object* oa = object(a);
  const Object* ob = object(b);
  if (!oa || !ob || !oa->track || !ob->track || a == b) return false;
  const auto rel = parse_rel(name);
  if (!rel) return false;
  const std::int64_t len = std::max(2, ctx_.motion_window);
  for (auto f : frames_) {
    if (start && f != *start) continue;
    const Key key{name + "@motion", a, b, f};
    auto it = cache_.find(key);
    bool v = false;
    if (it != cache_.end()) {
      v = it->second;
    } else {
      try {
        ++kernel_calls_;
        const auto rs = fluents::motion_relation(*oa->track, *ob->track, {f, len}, ctx_);
        v = std::find(rs.begin(), rs.end(), *rel) != rs.end();
      } catch (const Error&) {
      }
      cache_[key] = v;
    }
    if (v) return true;
  }
  return false;
}

inline bool World::growth(const std::string& name, const std::string& a, std::optional<std::int64_t> start) {
  const Object* oa = object(a);
  if (!oa || !oa->track) return false;
  const auto rel = parse_rel(name);
  if (!rel) return false;
  const std::int64_t len = std::max(2, ctx_.motion_window);
  for (auto f : frames_) {
    if (start && f != *start) continue;
    try {
      ++kernel_calls_;
      const auto rs = fluents::growth_relation(*oa->track, {f, len}, ctx_);
      if (std::find(rs.begin(), rs.end(), *rel) != rs.end()) return true;
    } catch (const Error&) {
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Standard library

namespace detail {

inline bool sym(const Value& v) { return v.kind == Value::Kind::symbol; }

inline Predicate relation_predicate(const std::string& name) {
  return {name, 2,
          [name](World& w, const Literal&, const std::vector<Value>& v) {
            return sym(v[0]) && sym(v[1]) && w.relation(name, v[0].sym, v[1].sym);
          },
          {}};
}

// before/2 over timepoints or intervals (strictly earlier end than start).
inline bool before(const Value& x, const Value& y) {
  if (x.kind != y.kind || x.kind == Value::Kind::symbol) return false;
  return x.b < y.a;
}

inline double axis_distance(const World& w, const std::string& obj, const std::string& axis) {
  const auto* o = w.object(obj);
  const auto* a = w.object(axis);
  auto geometry = [](const World::Object* x) -> const geom::Entity* {
    if (x->scene_object) return &x->scene_object->geometry;
    return &x->track->samples.front().geometry;
  };
  const auto* seg = std::get_if<geom::LineSegment>(geometry(a));
  if (!seg) return -1.0;
  return geom::point_segment_distance(geom::centroid(*geometry(o)), seg->p1(), seg->p2());
}

}  // namespace detail

inline void Background::add_alias(const std::string& name, std::vector<std::string> members) {
  if (members.empty()) throw Error("invalid-background", "alias " + name + " has no members");
  for (const auto& m : members)
    if (!is_relation(m)) throw Error("unknown-relation", m + " in alias " + name);
  aliases_[name] = std::move(members);
  add(detail::relation_predicate(name));
}

inline Background Background::standard() {
  using detail::sym;
  Background bg;

  // Structure: kind(Example, Object).
  for (std::string kind : {"person", "face", "gaze", "axis", "generic", "object"}) {
    bg.add({kind, 2,
            [kind](World& w, const Literal&, const std::vector<Value>& v) {
              if (!sym(v[0]) || !sym(v[1]) || v[0].sym != w.id()) return false;
              const auto* o = w.object(v[1].sym);
              return o && (kind == "object" || to_string(o->kind) == kind);
            },
            {}});
  }

  // Spatial relations evaluated by the kernel.
  for (const auto& info : stil::detail::kRelTable) {
    const std::string name(info.name);
    if (info.family == Family::motion) continue;
    bg.add(detail::relation_predicate(name));
  }
  bg.add(detail::relation_predicate("gaze_on"));

  // Dynamics over episodes.
  for (const auto& info : stil::detail::kRelTable) {
    if (info.family != Family::motion) continue;
    const std::string name(info.name);
    const bool unary = name.rfind("growing", 0) == 0 || name.rfind("shrinking", 0) == 0;
    if (unary) {
      bg.add({name, 1,
              [name](World& w, const Literal&, const std::vector<Value>& v) { return sym(v[0]) && w.growth(name, v[0].sym); },
              {}});
    } else {
      bg.add({name, 2,
              [name](World& w, const Literal&, const std::vector<Value>& v) {
                return sym(v[0]) && sym(v[1]) && w.motion(name, v[0].sym, v[1].sym);
              },
              {}});
    }
  }

  // equidistant_from(P1, P2, Axis): centroid distances to the axis agree
  // within size_ratio_tol * scene width.
  bg.add({"equidistant_from", 3,
          [](World& w, const Literal&, const std::vector<Value>& v) {
            if (!sym(v[0]) || !sym(v[1]) || !sym(v[2])) return false;
            if (!w.object(v[0].sym) || !w.object(v[1].sym) || !w.object(v[2].sym)) return false;
            const double d1 = detail::axis_distance(w, v[0].sym, v[2].sym);
            const double d2 = detail::axis_distance(w, v[1].sym, v[2].sym);
            if (d1 < 0.0 || d2 < 0.0) return false;
            return std::abs(d1 - d2) <= w.ctx().size_ratio_tol * w.ctx().scene_width;
          },
          {}});

  bg.add({"before", 2, [](World&, const Literal&, const std::vector<Value>& v) { return detail::before(v[0], v[1]); },
          {}});
  bg.add({"distinct", 2, [](World&, const Literal&, const std::vector<Value>& v) { return !(v[0] == v[1]); }, {}});

  // rel(R, X, Y) with R a relation name constant.
  bg.add({"rel", 3,
          [](World& w, const Literal&, const std::vector<Value>& v) {
            return sym(v[0]) && sym(v[1]) && sym(v[2]) && w.background().is_relation(v[0].sym) &&
                   w.relation(v[0].sym, v[1].sym, v[2].sym);
          },
          {}});

  // holds_in(R(X, Y), T): T a frame or a maximal interval of the fluent.
  Predicate holds;
  holds.name = "holds_in";
  holds.arity = 3;
  holds.test = [](World& w, const Literal& l, const std::vector<Value>& v) {
    const std::string& rel = l.args[0].name;
    if (!sym(v[0]) || !sym(v[1])) return false;
    if (v[2].kind == Value::Kind::time) return w.relation(rel, v[0].sym, v[1].sym, v[2].a);
    if (v[2].kind != Value::Kind::interval) return false;
    for (const auto& [a, b] : w.intervals(rel, v[0].sym, v[1].sym))
      if (a == v[2].a && b == v[2].b) return true;
    return false;
  };
  holds.generate = [](World& w, const Literal& l, const Slots& slots, const std::vector<std::string>& types,
                      const Emit& emit) {
    const std::string& rel = l.args[0].name;
    auto cands = [&](std::size_t i) {
      return slots[i] ? std::vector<Value>{*slots[i]} : w.domain(types[i]);
    };
    for (const auto& x : cands(0)) {
      if (!sym(x)) continue;
      for (const auto& y : cands(1)) {
        if (!sym(y)) continue;
        if (slots[2]) {
          std::vector<Value> v{x, y, *slots[2]};
          // re-use the test for bound time arguments
          bool ok = false;
          if (slots[2]->kind == Value::Kind::time) {
            ok = w.relation(rel, x.sym, y.sym, slots[2]->a);
          } else if (slots[2]->kind == Value::Kind::interval) {
            for (const auto& [a, b] : w.intervals(rel, x.sym, y.sym)) ok = ok || (a == slots[2]->a && b == slots[2]->b);
          }
          if (ok && !emit(v)) return;
          continue;
        }
        if (types[2] == "interval") {
          for (const auto& [a, b] : w.intervals(rel, x.sym, y.sym))
            if (!emit({x, y, Value::interval(a, b)})) return;
        } else {
          for (auto f : w.frames())
            if (w.relation(rel, x.sym, y.sym, f) && !emit({x, y, Value::time(f)})) return;
        }
      }
    }
  };
  bg.add(std::move(holds));
  return bg;
}

/// Enumerates complete slot assignments satisfying the literal. Unbound
/// slots range over the typed domains of `types`.
inline void solve(World& w, const Predicate& p, const Literal& l, const Slots& slots,
                  const std::vector<std::string>& types, const Emit& emit) {
  if (p.generate) {
    p.generate(w, l, slots, types, emit);
    return;
  }
  std::vector<std::vector<Value>> cands(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i])
      cands[i] = {*slots[i]};
    else
      cands[i] = w.domain(types[i]);
    if (cands[i].empty()) return;
  }
  std::vector<Value> cur(slots.size());
  std::vector<std::size_t> pos(slots.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < slots.size(); ++i) cur[i] = cands[i][pos[i]];
    if (p.test(w, l, cur) && !emit(cur)) return;
    std::size_t k = slots.size();
    while (k > 0) {
      --k;
      if (++pos[k] < cands[k].size()) break;
      pos[k] = 0;
      if (k == 0) return;
    }
    if (slots.empty()) return;
  }
}

}  // namespace stil::ilp
